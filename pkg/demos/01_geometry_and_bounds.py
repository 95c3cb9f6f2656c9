"""Lower bounds for the first k Dirichlet eigenvalues of a few planar shapes.

Every bound only needs the area V and the moment of inertia I about the
centroid.  For a fixed area, a shape with small I (a disk) gets a larger
correction term V/I than an elongated one.
"""
import math

from spectral_bounds import bounds as B
from spectral_bounds.extremal import rigorous_sum_bound
from spectral_bounds.geometry import Domain, invariants

shapes = {
    "unit square": Domain.box([1.0, 1.0]),
    "2 x 0.5 rectangle": Domain.box([2.0, 0.5]),
    "disk, area 1": Domain.ball(2, 1 / math.sqrt(math.pi)),
    "L-shape, area 3": Domain.polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]),
}

print(f"{'shape':>18} {'V':>8} {'I':>8} {'V/I':>7}")
for name, dom in shapes.items():
    inv = invariants(dom)
    print(f"{name:>18} {inv.volume:8.4f} {inv.inertia:8.4f} {inv.volume / inv.inertia:7.3f}")

# Mean of the first k eigenvalues on the unit square, bounded from below.
spec = B.ProblemSpec.from_domain(shapes["unit square"])
print(f"\n{'k':>6} {'Li-Yau':>12} {'Melas':>12} {'Ilyin':>12} {'Psi-profile':>12}")
for k in (1, 10, 100, 1000):
    row = [B.li_yau(spec, k).value, B.melas(spec, k).value, B.ilyin_l1(spec, k).value,
           rigorous_sum_bound(2, 1, spec.volume, spec.inertia, k).value]
    print(f"{k:6d} " + " ".join(f"{v:12.5f}" for v in row))

# Every bound comes with its addends; the second one is where the geometry enters.
res = B.melas(spec, 1)
for term in res.terms:
    print(f"  melas term {term.name:>8}: {term.value:.6f}")
