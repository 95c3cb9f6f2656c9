"""Check the l = 1 bounds against the exact spectrum of the unit square.

The Dirichlet eigenvalues of the square are pi^2 (p^2 + q^2).  The report
lists, for each k, the tightest certified bound and how far below the true
mean it sits.
"""
from spectral_bounds import bounds as B
from spectral_bounds.extremal import rigorous_sum_bound
from spectral_bounds.spectra import rectangle_laplacian, verify

K = 2000
table = rectangle_laplacian(1.0, 1.0, K)
spec = B.ProblemSpec(2, 1.0, 1 / 6)

results = []
for k in range(1, K + 1):
    results += [B.li_yau(spec, k), B.melas(spec, k), B.ilyin_l1(spec, k),
                B.cheng_qi_wei(spec, 1, k), rigorous_sum_bound(2, 1, 1.0, 1 / 6, k)]
report = verify(table, results)
print(f"{len(report.rows)} comparisons, violations: {list(report.violations) or 'none'}")

by_k = {}
for row in report.rows:
    if row["id"] == report.tightest[row["k"]]:
        by_k[row["k"]] = row
print(f"\n{'k':>6} {'mean':>12} {'tightest':>13} {'bound':>12} {'gap %':>7}")
for k in (1, 2, 5, 10, 50, 100, 500, 1000, 2000):
    row = by_k[k]
    print(f"{k:6d} {row['mean']:12.4f} {row['id']:>13} {row['bound']:12.4f} "
          f"{100 * row['margin'] / row['mean']:7.3f}")
