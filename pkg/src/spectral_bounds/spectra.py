"""True eigenvalues to test the bounds against.

Rectangles have the separable Dirichlet spectrum ``pi^2 (p^2/a^2 + q^2/b^2)``.
For the clamped plate and ``Delta^2 - a Delta`` there is no closed form, so
we discretise on a uniform grid (13-point biharmonic stencil, clamped
boundary by ghost reflection) and Richardson-extrapolate in ``h``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bounds import BoundResult
from .errors import InvalidArgument, NumericalBreakdown
from .geometry import Domain

__all__ = [
    "OperatorKind",
    "SpectrumTable",
    "VerificationReport",
    "rectangle_laplacian",
    "discrete_laplacian_eigenvalues",
    "fd_matrix",
    "smallest_eigs",
    "fd_spectrum",
    "extrapolated_spectrum",
    "verify",
]

MIN_GRID = 16
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class OperatorKind:
    kind: str
    a: float = 0.0

    def __post_init__(self):
        if self.kind not in ("dirichlet_laplacian", "clamped_bilaplacian", "quadratic"):
            raise InvalidArgument(f"unknown operator {self.kind!r}")
        if not self.a >= 0:
            raise InvalidArgument("a must be nonnegative")
        if self.kind != "quadratic" and self.a != 0:
            raise InvalidArgument("only the quadratic operator takes a coefficient")

    @classmethod
    def dirichlet_laplacian(cls):
        return cls("dirichlet_laplacian")

    @classmethod
    def clamped_bilaplacian(cls):
        return cls("clamped_bilaplacian")

    @classmethod
    def quadratic(cls, a: float):
        return cls("quadratic", float(a))

    @property
    def label(self) -> str:
        return f"quadratic(a={self.a:g})" if self.kind == "quadratic" else self.kind


@dataclass(frozen=True)
class SpectrumTable:
    operator: OperatorKind
    domain: Domain
    eigenvalues: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size == 0:
            raise InvalidArgument("a spectrum table needs at least one eigenvalue")
        if np.any(np.diff(ev) < 0):
            raise InvalidArgument("eigenvalues must be sorted ascending")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def count(self) -> int:
        return self.eigenvalues.size

    @property
    def cumulative_means(self) -> np.ndarray:
        return np.cumsum(self.eigenvalues) / np.arange(1, self.count + 1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "lambda_k", "cumulative_mean"])
        for k, (lam, mean) in enumerate(zip(self.eigenvalues, self.cumulative_means), 1):
            w.writerow([k, f"{lam:.17g}", f"{mean:.17g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "operator": self.operator.label,
            "domain": self.domain.to_dict(),
            "count": self.count,
            "eigenvalues": self.eigenvalues.tolist(),
            "cumulative_means": self.cumulative_means.tolist(),
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _box_sides(domain: Domain) -> tuple[float, float]:
    if domain.kind != "box" or domain.dim != 2:
        raise InvalidArgument("finite differences and the separable spectrum need a 2-D box")
    return domain.sides


def rectangle_laplacian(a_side: float, b_side: float, count: int) -> SpectrumTable:
    """Smallest ``count`` Dirichlet eigenvalues of the ``a_side x b_side``
    rectangle, with multiplicity."""
    if not (a_side > 0 and b_side > 0):
        raise InvalidArgument("sides must be positive")
    if count < 1:
        raise InvalidArgument("count must be >= 1")
    # Weyl count N(lam) ~ area lam / (4 pi) sets the first cutoff
    lam_max = 4 * math.pi * count / (a_side * b_side) * 1.5 + 2 * math.pi ** 2 * (
        1 / a_side ** 2 + 1 / b_side ** 2)
    while True:
        # every (p, q) with eigenvalue <= lam_max has p <= a sqrt(lam_max) / pi
        pmax = int(a_side * math.sqrt(lam_max) / math.pi) + 1
        qmax = int(b_side * math.sqrt(lam_max) / math.pi) + 1
        p = np.arange(1, pmax + 1)[:, None]
        q = np.arange(1, qmax + 1)[None, :]
        lam = math.pi ** 2 * (p ** 2 / a_side ** 2 + q ** 2 / b_side ** 2)
        lam = np.sort(lam[lam <= lam_max], kind="stable")
        if lam.size >= count:
            break
        lam_max *= 2
    domain = Domain.box((a_side, b_side))
    return SpectrumTable(OperatorKind.dirichlet_laplacian(), domain, lam[:count],
                         {"source": "analytic"})


def discrete_laplacian_eigenvalues(a_side: float, b_side: float, grid: int, count: int) -> np.ndarray:
    """Closed-form spectrum of the 5-point Dirichlet Laplacian on a
    ``grid x grid``-cell mesh, ``4/h^2 sin^2(p pi h / 2)`` per direction."""
    hx, hy = a_side / grid, b_side / grid
    idx = np.arange(1, grid)
    ex = 4 / hx ** 2 * np.sin(idx * math.pi / (2 * grid)) ** 2
    ey = 4 / hy ** 2 * np.sin(idx * math.pi / (2 * grid)) ** 2
    return np.sort((ex[:, None] + ey[None, :]).ravel())[:count]


def _second_difference(m: int, h: float) -> sp.csr_matrix:
    # -d^2/dx^2 on m interior nodes, homogeneous Dirichlet
    return sp.diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1],
                    format="csr") / h ** 2


def _fourth_difference(m: int, h: float) -> sp.csr_matrix:
    # d^4/dx^4 with u_0 = 0 and ghost u_{-1} = u_1 (zero normal derivative),
    # so the corner entries are 6 + 1 = 7
    main = 6 * np.ones(m)
    main[0] = main[-1] = 7
    return sp.diags([np.ones(m - 2), -4 * np.ones(m - 1), main, -4 * np.ones(m - 1), np.ones(m - 2)],
                    [-2, -1, 0, 1, 2], format="csr") / h ** 4


def fd_matrix(domain: Domain, grid: int, operator: OperatorKind) -> sp.csr_matrix:
    """Sparse SPD finite-difference matrix on ``(grid - 1)^2`` interior nodes.

    ``grid`` is the number of cells per side, so ``h = side / grid``.  Nodes
    are ordered with x fastest.
    """
    a_side, b_side = _box_sides(domain)
    if int(grid) != grid or grid < MIN_GRID:
        raise InvalidArgument(f"grid must be an integer >= {MIN_GRID}, got {grid!r}")
    m = grid - 1
    hx, hy = a_side / grid, b_side / grid
    ix = sp.identity(m, format="csr")
    lx, ly = _second_difference(m, hx), _second_difference(m, hy)
    lap = sp.kron(ix, lx) + sp.kron(ly, ix)
    if operator.kind == "dirichlet_laplacian":
        return lap.tocsr()
    bilap = (sp.kron(ix, _fourth_difference(m, hx)) + 2 * sp.kron(ly, lx)
             + sp.kron(_fourth_difference(m, hy), ix))
    if operator.kind == "quadratic" and operator.a != 0:
        bilap = bilap + operator.a * lap
    return bilap.tocsr()


def _dense_smallest(matrix, count: int) -> np.ndarray:
    # FD matrices are banded with bandwidth ~ grid; LAPACK's banded reduction
    # costs order * bandwidth^2 instead of order^3
    order = matrix.shape[0]
    if sp.issparse(matrix):
        coo = matrix.tocoo()
        bw = int(np.max(np.abs(coo.row - coo.col))) if coo.nnz else 0
        if bw < order // 4:
            bands = np.zeros((bw + 1, order))
            for d in range(bw + 1):
                bands[d, :order - d] = matrix.diagonal(-d)
            return scipy.linalg.eig_banded(bands, lower=True, eigvals_only=True,
                                           select="i", select_range=(0, count - 1))
        matrix = matrix.toarray()
    return scipy.linalg.eigh(np.asarray(matrix), eigvals_only=True, subset_by_index=[0, count - 1])


def smallest_eigs(matrix, count: int, method: str = "auto") -> np.ndarray:
    """Smallest ``count`` eigenvalues of a symmetric positive definite matrix.

    ``method="auto"`` uses a direct LAPACK solve (banded when the matrix is
    narrow) up to order 4096 and shift-invert Lanczos (sparse LU at shift 0)
    above.
    """
    order = matrix.shape[0]
    if not 1 <= count <= order:
        raise InvalidArgument(f"count must be in [1, {order}], got {count}")
    if method == "auto":
        method = "dense" if order <= DENSE_LIMIT else "sparse"
    if method == "dense":
        vals = _dense_smallest(matrix, count)
    elif method == "sparse":
        if count >= order - 1:
            raise InvalidArgument("sparse path needs count < order - 1; use method='dense'")
        try:
            vals = spla.eigsh(sp.csc_matrix(matrix), k=count, sigma=0.0, which="LM",
                              return_eigenvectors=False, tol=1e-12)
        except (RuntimeError, spla.ArpackError) as exc:
            raise NumericalBreakdown(f"shift-invert eigensolve failed: {exc}") from exc
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    return np.sort(np.asarray(vals, dtype=float), kind="stable")


def fd_spectrum(domain: Domain, grid: int, operator: OperatorKind, count: int) -> SpectrumTable:
    vals = smallest_eigs(fd_matrix(domain, grid, operator), count)
    if vals[0] <= 0:
        raise NumericalBreakdown(f"discrete operator is not positive definite (lambda_1={vals[0]})")
    return SpectrumTable(operator, domain, vals, {"source": "fd", "grid": grid, "extrapolated": False})


def extrapolated_spectrum(domain: Domain, operator: OperatorKind, grids: Sequence[int],
                          count: int) -> SpectrumTable:
    """Richardson-extrapolate sorted FD eigenvalues from the two finest grids,
    assuming ``O(h^2)`` error.

    The observed order of each eigenvalue is estimated from the finest
    three grids; with only two, a diagnostic grid of half the coarser size
    is added (it never enters the extrapolated values).  Orders outside
    ``[1.5, 2.5]`` and non-monotone sequences are flagged in the
    provenance, not raised.
    """
    grids = sorted(int(g) for g in grids)
    if len(grids) < 2:
        raise InvalidArgument("Richardson extrapolation needs at least two grids")
    runs = [smallest_eigs(fd_matrix(domain, g, operator), count) for g in grids]
    coarse, fine = runs[-2], runs[-1]
    ratio = grids[-1] / grids[-2]
    r2 = ratio ** 2
    extrap = (r2 * fine - coarse) / (r2 - 1)
    flagged: list[int] = []
    orders = None
    order_grids = grids[-3:]
    coarsest = runs[-3] if len(runs) >= 3 else None
    if coarsest is None and grids[0] % 2 == 0 and grids[0] // 2 >= MIN_GRID \
            and (grids[0] // 2 - 1) ** 2 >= count and math.isclose(ratio, 2.0):
        coarsest = smallest_eigs(fd_matrix(domain, grids[0] // 2, operator), count)
        order_grids = [grids[0] // 2] + grids
    if coarsest is not None and math.isclose(order_grids[1] / order_grids[0], ratio):
        d1, d2 = coarsest - coarse, coarse - fine
        with np.errstate(divide="ignore", invalid="ignore"):
            orders = np.log(np.abs(d1 / d2)) / math.log(ratio)
        bad = (np.sign(d1) != np.sign(d2)) | ~np.isfinite(orders) | (orders < 1.5) | (orders > 2.5)
        flagged = [int(i) + 1 for i in np.flatnonzero(bad)]
    # extrapolation can break ties in a different order; keep the table sorted
    extrap = np.sort(extrap, kind="stable")
    if extrap[0] <= 0:
        raise NumericalBreakdown("extrapolated spectrum is not positive")
    provenance = {
        "source": "fd",
        "grids": grids,
        "extrapolated": True,
        "assumed_order": 2,
        "observed_order": None if orders is None else orders.tolist(),
        "order_grids": None if orders is None else order_grids,
        "flagged": flagged,
        "raw": {str(g): r.tolist() for g, r in zip(grids, runs)},
    }
    return SpectrumTable(operator, domain, extrap, provenance)


@dataclass(frozen=True)
class VerificationReport:
    rows: tuple[dict, ...]
    violations: tuple[tuple[str, int], ...]
    tightest: dict
    slack: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "slack": self.slack,
            "violations": [{"id": i, "k": k} for i, k in self.violations],
            "tightest": {str(k): v for k, v in self.tightest.items()},
            "rows": list(self.rows),
        }


def verify(table: SpectrumTable, bound_results: Iterable[BoundResult], slack: float = 0.0) -> VerificationReport:
    """Check ``mean_k >= bound_k (1 - slack)`` for every certified bound with
    ``k <= table.count``.  Asymptotic (uncertified) results are skipped."""
    means = table.cumulative_means
    rows, violations = [], []
    best: dict[int, tuple[str, float]] = {}
    for res in bound_results:
        if not res.certified:
            continue
        k = int(res.k)
        if k != res.k or not 1 <= k <= table.count:
            continue
        mean = float(means[k - 1])
        threshold = res.value * (1 - slack)
        ok = mean >= threshold
        rows.append({"id": res.id, "k": k, "bound": res.value, "mean": mean,
                     "margin": mean - res.value, "ok": bool(ok)})
        if not ok:
            violations.append((res.id, k))
        if k not in best or res.value > best[k][1]:
            best[k] = (res.id, res.value)
    tightest = {k: best[k][0] for k in sorted(best)}
    return VerificationReport(tuple(rows), tuple(violations), tightest, slack)
