"""Closed-form lower bounds on the mean of the first ``k`` eigenvalues.

Two families of Dirichlet problems are covered:

* the poly-Laplacian ``(-Delta)^l u = lambda u`` (``l = 1`` membrane,
  ``l = 2`` clamped plate), and
* the quadratic operator ``Delta^2 u - a Delta u = Gamma u`` with ``a >= 0``.

Every function returns a :class:`BoundResult` whose ``value`` bounds
``(1/k) sum_{j<=k} lambda_j`` from below (``polya`` is the one exception: it
bounds ``lambda_k`` itself).  The result keeps the individual addends so that
callers can see which term dominates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidArgument, NotApplicable
from .geometry import Domain, invariants, unit_ball_volume

__all__ = [
    "BOUND_IDS",
    "ALPHA",
    "BETA",
    "ProblemSpec",
    "Term",
    "BoundResult",
    "weyl_leading",
    "polya",
    "li_yau",
    "melas",
    "ilyin_l1",
    "levine_protter",
    "ilyin_n2_l2",
    "cheng_wei",
    "cheng_qi_wei",
    "thm1",
    "levine_protter_quad",
    "thm2",
    "thm3",
    "thm4",
    "expansion_coefficient",
    "remark1_ratio",
]

BOUND_IDS = (
    "polya",
    "li_yau",
    "melas",
    "ilyin_l1",
    "levine_protter_l2",
    "ilyin_n2_l2",
    "cheng_wei",
    "levine_protter_general",
    "cheng_qi_wei",
    "thm1",
    "levine_protter_quad",
    "thm2",
    "thm3",
    "thm4",
    # Psi-profile bounds computed in spectral_bounds.extremal
    "rigorous",
    "rigorous_quad",
)

# Ilyin's constants for l = 1 (also used in the quadratic-operator bounds)
BETA = {2: Fraction(119, 120), 3: 0.986, 4: 0.983}
# constants of the sharper n = 2, 3, 4 bound for Delta^2 - a Delta
ALPHA = {2: Fraction(12095, 12096), 3: 0.991, 4: 0.985}

ASYMPTOTIC_NOTE = "asymptotic, not a certified bound for small k"


@dataclass(frozen=True)
class ProblemSpec:
    """Dimension, operator and the two geometric invariants a bound needs.

    ``a is None`` selects the poly-Laplacian of order ``l``; a number selects
    the quadratic operator ``Delta^2 - a Delta`` (and ``l`` is then 2).
    """

    n: int
    volume: float
    inertia: float
    l: int = 1
    a: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidArgument(f"dimension must be an integer >= 2, got {self.n!r}")
        if not self.volume > 0:
            raise InvalidArgument("volume must be positive")
        if not self.inertia > 0:
            raise InvalidArgument("moment of inertia must be positive")
        if int(self.l) != self.l or self.l < 1:
            raise InvalidArgument(f"order l must be an integer >= 1, got {self.l!r}")
        if self.a is not None:
            if not self.a >= 0:
                raise InvalidArgument("quadratic coefficient a must be nonnegative")
            object.__setattr__(self, "l", 2)

    @classmethod
    def from_domain(cls, domain: Domain, l: int = 1, a: float | None = None) -> "ProblemSpec":
        inv = invariants(domain)
        return cls(domain.dim, inv.volume, inv.inertia, l, a)

    @property
    def is_quadratic(self) -> bool:
        return self.a is not None

    @property
    def v_over_i(self) -> float:
        return self.volume / self.inertia

    def dilated(self, c: float) -> "ProblemSpec":
        """Invariants of the domain dilated by ``c`` (``a`` scales like ``c^-2``
        so that the operator stays homogeneous)."""
        n = self.n
        a = None if self.a is None else self.a * c ** -2
        return ProblemSpec(n, self.volume * c ** n, self.inertia * c ** (n + 2), self.l, a)


@dataclass(frozen=True)
class Term:
    name: str
    value: float


@dataclass(frozen=True)
class BoundResult:
    id: str
    k: float
    terms: tuple[Term, ...]
    note: str = ""
    certified: bool = True
    value: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "value", math.fsum(t.value for t in self.terms))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "k": self.k,
            "value": self.value,
            "terms": [{"name": t.name, "value": t.value} for t in self.terms],
            "note": self.note,
        }


def _check_k(k):
    if not k >= 1:
        raise InvalidArgument(f"k must be >= 1, got {k!r}")


def _weyl_factor(spec: ProblemSpec, power: int) -> float:
    # (2 pi)^power / (omega_n V)^(power/n)
    n = spec.n
    return (2 * math.pi) ** power / (unit_ball_volume(n) * spec.volume) ** (power / n)


def _require_quadratic(spec: ProblemSpec, name: str):
    if not spec.is_quadratic:
        raise NotApplicable(f"{name} is a bound for Delta^2 - a Delta; give the coefficient a")


def _require_dims(spec: ProblemSpec, dims: tuple[int, ...], name: str):
    if spec.n not in dims:
        allowed = ", ".join(str(d) for d in dims)
        raise NotApplicable(f"{name} is only proved for n in {{{allowed}}}, got n={spec.n}")


def weyl_leading(spec: ProblemSpec, l: int, k: float) -> float:
    """``n/(n+2l) (2 pi)^{2l} (omega_n V)^{-2l/n} k^{2l/n}``."""
    _check_k(k)
    n = spec.n
    return n / (n + 2 * l) * _weyl_factor(spec, 2 * l) * k ** (2 * l / n)


def polya(spec: ProblemSpec, k: float) -> BoundResult:
    """Polya's bound on the single eigenvalue ``lambda_k``; proved for tiling
    domains only, so it is never marked certified."""
    _check_k(k)
    value = _weyl_factor(spec, 2) * k ** (2 / spec.n)
    return BoundResult("polya", k, (Term("weyl", value),),
                       "bounds lambda_k (not the mean); tiling domains only", certified=False)


def li_yau(spec: ProblemSpec, k: float) -> BoundResult:
    return BoundResult("li_yau", k, (Term("weyl", weyl_leading(spec, 1, k)),))


def melas(spec: ProblemSpec, k: float) -> BoundResult:
    n = spec.n
    return BoundResult("melas", k, (
        Term("weyl", weyl_leading(spec, 1, k)),
        Term("inertia", spec.v_over_i / (24 * (n + 2))),
    ))


def ilyin_l1(spec: ProblemSpec, k: float) -> BoundResult:
    _require_dims(spec, (2, 3, 4), "ilyin_l1")
    n = spec.n
    return BoundResult("ilyin_l1", k, (
        Term("weyl", weyl_leading(spec, 1, k)),
        Term("inertia", n / 48 * float(BETA[n]) * spec.v_over_i),
    ))


def levine_protter(spec: ProblemSpec, l: int, k: float) -> BoundResult:
    bound_id = "levine_protter_l2" if l == 2 else "levine_protter_general"
    return BoundResult(bound_id, k, (Term("weyl", weyl_leading(spec, l, k)),))


def ilyin_n2_l2(spec: ProblemSpec, k: float) -> BoundResult:
    _require_dims(spec, (2,), "ilyin_n2_l2")
    _check_k(k)
    V, I = spec.volume, spec.inertia
    return BoundResult("ilyin_n2_l2", k, (
        Term("weyl", 16 * math.pi ** 2 / (3 * V ** 2) * k ** 2),
        Term("inertia", 12095 * math.pi / (3 * 12096 * I) * k),
    ))


def cheng_wei(spec: ProblemSpec, k: float) -> BoundResult:
    _check_k(k)
    n = spec.n
    r = spec.v_over_i
    bracket1 = (n + 2) / (12 * n * (n + 4)) - 1 / (1152 * n ** 2 * (n + 4))
    bracket2 = 1 / (576 * n * (n + 4)) - 1 / (27648 * n ** 2 * (n + 2) * (n + 4))
    return BoundResult("cheng_wei", k, (
        Term("weyl", weyl_leading(spec, 2, k)),
        Term("inertia", n / (n + 2) * bracket1 * _weyl_factor(spec, 2) * r * k ** (2 / n)),
        Term("inertia_sq", bracket2 * r ** 2),
    ))


def _cqw_coefficient(n: int, l: int, p: int) -> float:
    # n/(n+2l) (l+1-p) / (24^p n (n+2) ... (n+2p-2))
    rising = math.prod(n + 2 * i for i in range(p))
    return n / (n + 2 * l) * (l + 1 - p) / (24 ** p * rising)


def cheng_qi_wei(spec: ProblemSpec, l: int, k: float) -> BoundResult:
    n = spec.n
    terms = [Term("weyl", weyl_leading(spec, l, k))]
    for p in range(1, l + 1):
        value = (_cqw_coefficient(n, l, p) * _weyl_factor(spec, 2 * (l - p))
                 * spec.v_over_i ** p * k ** (2 * (l - p) / n))
        terms.append(Term(f"p={p}", value))
    return BoundResult("cheng_qi_wei", k, tuple(terms))


def _thm1_second(spec: ProblemSpec, l: int, k: float) -> float:
    n = spec.n
    return n * l / 48 * _weyl_factor(spec, 2 * l - 2) * spec.v_over_i * k ** ((2 * l - 2) / n)


def thm1(spec: ProblemSpec, l: int, k: float, epsilon_mode: str = "zero") -> BoundResult:
    """Two-term bound with the sharp ``nl/48`` second coefficient.

    ``epsilon_mode="zero"`` drops the unspecified ``eps_n(k)``; the result is
    asymptotic only and flagged uncertified.  ``"rigorous"`` evaluates the
    Psi-profile bound and reports the ``eps`` that makes the two-term form
    agree with it.
    """
    weyl = weyl_leading(spec, l, k)
    second = _thm1_second(spec, l, k)
    if epsilon_mode == "zero":
        return BoundResult("thm1", k, (Term("weyl", weyl), Term("inertia", second)),
                           ASYMPTOTIC_NOTE, certified=False)
    if epsilon_mode != "rigorous":
        raise InvalidArgument(f"epsilon_mode must be 'zero' or 'rigorous', got {epsilon_mode!r}")
    from .extremal import epsilon_effective

    # weyl + second*(1-eps) reproduces the Psi-profile bound; eps itself is
    # a small difference of large numbers and is taken in extended precision
    eps = epsilon_effective(spec.n, l, spec.volume, spec.inertia, k)
    corrected = second * (1 - eps)
    return BoundResult("thm1", k, (Term("weyl", weyl), Term("inertia*(1-eps)", corrected)),
                       f"rigorous; effective eps={eps:.6g}")


def levine_protter_quad(spec: ProblemSpec, k: float) -> BoundResult:
    _require_quadratic(spec, "levine_protter_quad")
    n, a = spec.n, spec.a
    return BoundResult("levine_protter_quad", k, (
        Term("weyl", weyl_leading(spec, 2, k)),
        Term("a", n * a / (n + 2) * _weyl_factor(spec, 2) * k ** (2 / n)),
    ))


def _quad_middle(spec: ProblemSpec, k: float, alpha: float = 1.0) -> float:
    n, a = spec.n, spec.a
    return (n / 24 * alpha * spec.v_over_i + n * a / (n + 2)) * _weyl_factor(spec, 2) * k ** (2 / n)


def thm2(spec: ProblemSpec, k: float, epsilon_mode: str = "zero") -> BoundResult:
    """Three-term bound for ``Delta^2 - a Delta``.  The constant term can be
    negative (``n > 2`` with small ``a``) and is kept signed."""
    _require_quadratic(spec, "thm2")
    n, a, r = spec.n, spec.a, spec.v_over_i
    lead = weyl_leading(spec, 2, k)
    middle = _quad_middle(spec, k)
    constant = (-n * (n * n - 4) / 3840 * r + n * a / 48) * r
    if epsilon_mode == "zero":
        return BoundResult("thm2", k, (Term("weyl", lead), Term("middle", middle),
                                       Term("constant", constant)),
                           ASYMPTOTIC_NOTE, certified=False)
    if epsilon_mode != "rigorous":
        raise InvalidArgument(f"epsilon_mode must be 'zero' or 'rigorous', got {epsilon_mode!r}")
    from .extremal import rigorous_quad_bound

    rig = rigorous_quad_bound(n, spec.volume, spec.inertia, a, k).value
    corrected = rig - lead - middle
    eps = 1 - corrected / constant if constant != 0 else math.nan
    return BoundResult("thm2", k, (Term("weyl", lead), Term("middle", middle),
                                   Term("constant*(1-eps)", corrected)),
                       f"rigorous; effective eps={eps:.6g}")


def thm3(spec: ProblemSpec, k: float) -> BoundResult:
    _require_quadratic(spec, "thm3")
    _require_dims(spec, (2, 3, 4), "thm3")
    n, a, r = spec.n, spec.a, spec.v_over_i
    return BoundResult("thm3", k, (
        Term("weyl", weyl_leading(spec, 2, k)),
        Term("middle", _quad_middle(spec, k, float(ALPHA[n]))),
        Term("constant", n * a / 48 * float(BETA[n]) * r),
    ))


def thm4(spec: ProblemSpec, k: float) -> BoundResult:
    _require_quadratic(spec, "thm4")
    _require_dims(spec, (3, 4), "thm4")
    n, a, r = spec.n, spec.a, spec.v_over_i
    return BoundResult("thm4", k, (
        Term("weyl", weyl_leading(spec, 2, k)),
        Term("middle", _quad_middle(spec, k)),
        Term("constant", (-n * (n * n - 4) / 3840 * r + n * a / 48 * float(BETA[n])) * r),
    ))


def expansion_coefficient(n: int, l: int) -> int:
    """Third-order coefficient ``C(n, l)`` of the large-k expansion of the
    Psi-profile bound (exact integer)."""
    if n < 2 or l < 1:
        raise InvalidArgument("need n >= 2 and l >= 1")
    m = n + 2 * l
    return (m - 1) * ((m - 2) * (6 * l - 7 * n + 1) + 5 * (n - 1) ** 2) + (n - 1) * (n - 3) * (2 * n + 1)


def remark1_ratio(n: int, l: int) -> float:
    """How many times larger the ``nl/48`` second term is than the first
    correction of :func:`cheng_qi_wei`: ``n(n+2l)/2``."""
    if n < 2 or l < 1:
        raise InvalidArgument("need n >= 2 and l >= 1")
    ratio = n * (n + 2 * l) / 2
    # both second terms share (2pi)^{2l-2} (omega V)^{-(2l-2)/n} (V/I) k^{(2l-2)/n}
    observed = (n * l / 48) / _cqw_coefficient(n, l, 1)
    if not math.isclose(observed, ratio, rel_tol=1e-12):
        raise ArithmeticError(f"coefficient ratio {observed} != n(n+2l)/2 = {ratio}")
    return ratio
