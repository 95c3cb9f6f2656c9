"""Clamped plate and Delta^2 - a Delta on the unit square by finite differences.

There is no closed-form spectrum, so eigenvalues come from a 13-point
biharmonic stencil on two grids, Richardson-extrapolated.  A coarser grid is
solved too so the observed convergence order can be reported.  Takes ~20 s.
"""
from spectral_bounds import bounds as B
from spectral_bounds.extremal import rigorous_quad_bound
from spectral_bounds.geometry import Domain
from spectral_bounds.spectra import OperatorKind, extrapolated_spectrum, verify

square = Domain.box([1.0, 1.0])
K = 30
for a in (0.0, 10.0):
    table = extrapolated_spectrum(square, OperatorKind.quadratic(a), [96, 192], K)
    orders = table.provenance["observed_order"]
    print(f"a={a:g}: Gamma_1 = {table.eigenvalues[0]:.3f}, observed order "
          f"{min(orders):.2f}..{max(orders):.2f} on grids {table.provenance['order_grids']}")

    spec = B.ProblemSpec(2, 1.0, 1 / 6, a=a)
    results = []
    for k in range(1, K + 1):
        results += [B.levine_protter_quad(spec, k), B.thm3(spec, k),
                    rigorous_quad_bound(2, 1.0, 1 / 6, a, k)]
    report = verify(table, results, slack=0.01)
    print(f"  {len(report.rows)} comparisons at 1% slack, violations: {list(report.violations) or 'none'}")
    for k in (1, 10, 30):
        mean = table.cumulative_means[k - 1]
        print(f"  k={k:2d} mean {mean:10.2f}  thm3 {B.thm3(spec, k).value:10.2f}  "
              f"Psi-profile {rigorous_quad_bound(2, 1.0, 1 / 6, a, k).value:10.2f}")
