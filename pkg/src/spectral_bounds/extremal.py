"""The slope-constrained extremal profile and the bounds it certifies.

The symmetric decreasing rearrangement of ``h(xi) = sum_j |u_j^(xi)|^2`` is a
radial profile bounded by ``M = (2 pi)^-n V``, with slope at most
``L = 2 (2 pi)^-n sqrt(V I)`` and a prescribed ``(n-1)``-moment
``k / (n omega_n)``.  Among all such profiles the trapezoid ``Psi_s``
(plateau ``M`` on ``[0, s]``, then slope ``-L`` down to zero) has the
smallest higher moments, which turns into a certified lower bound for
eigenvalue sums.

Writing ``t = L s / M`` the moment constraint is the polynomial equation
``(t+1)^(n+1) - t^(n+1) = k_*``; most of this module is about solving and
expanding that equation accurately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import bounds
from .bounds import BoundResult, ProblemSpec, Term
from .errors import (BelowThreshold, BinomialOverflow, InfeasibleMoment, InvalidArgument,
                     NotApplicable, NumericalBreakdown, OutOfRange)
from .geometry import unit_ball_volume

__all__ = [
    "TAU",
    "SIGMA",
    "ExtremalProfile",
    "RootSolution",
    "FeasibleProfile",
    "Lemma1Report",
    "binomial_diff",
    "solve_t",
    "eta_asymptotic",
    "asymptotic_correction",
    "profile_for",
    "trapezoid_for_moment",
    "psi_moment",
    "rigorous_sum_bound",
    "rigorous_quad_bound",
    "expansion_terms",
    "expansion_remainder",
    "epsilon_effective",
    "n3_poly_lower",
    "n4_closed_form",
    "n4_poly_lower",
    "poly_lower_slack",
    "random_feasible_profile",
    "lemma1_minimality",
]

# smallest k_* reachable by any domain in R^3 / R^4
TAU = 432 * math.sqrt(15) * math.pi / 25
SIGMA = 5 * 2 ** 12 / 9

_MAX_POWER = 64
_NEWTON_ITERATIONS = 80


def binomial_diff(t: float, p: int) -> float:
    """``(t+1)^p - t^p`` evaluated as ``sum_{j<p} C(p, j) t^j``.

    The sum has only positive terms for ``t >= 0``, so there is no
    cancellation however large ``t`` is.
    """
    if int(p) != p or not 1 <= p <= _MAX_POWER:
        raise InvalidArgument(f"power must be an integer in [1, {_MAX_POWER}], got {p!r}")
    if not t >= 0:
        raise InvalidArgument(f"t must be nonnegative, got {t!r}")
    acc = 0.0
    # Horner from the t^(p-1) coefficient down
    for j in range(p - 1, -1, -1):
        acc = acc * t + math.comb(p, j)
    if math.isinf(acc):
        raise BinomialOverflow(f"(t+1)^{p} - t^{p} overflows at t={t!r}")
    return acc


def _solve_binomial(p: int, target: float) -> tuple[float, float]:
    """Nonnegative root of ``(t+1)^p - t^p = target`` (``target >= 1``).

    By the mean value theorem the left side equals ``p xi^(p-1)`` with
    ``xi`` in ``(t, t+1)``, so the root lies in ``[zeta - 1, zeta]`` where
    ``zeta = (target/p)^(1/(p-1))``.  Newton is safeguarded by bisection on
    that bracket.
    """
    zeta = (target / p) ** (1.0 / (p - 1))
    lo, hi = max(0.0, zeta - 1.0), zeta
    t = max(lo, zeta - 0.5)
    for _ in range(_NEWTON_ITERATIONS):
        f = binomial_diff(t, p) - target
        slope = p * binomial_diff(t, p - 1)
        if abs(f) <= 1e-12 * target:
            # one unguarded step takes the converged iterate to machine precision
            t = max(0.0, t - f / slope)
            break
        if f < 0:
            lo = t
        else:
            hi = t
        step = t - f / slope
        t = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, t):
            break
    return t, binomial_diff(t, p) - target


@dataclass(frozen=True)
class RootSolution:
    n: int
    k_star: float
    t: float
    method: str
    residual: float


def solve_t(n: int, k_star: float, method: str = "numeric") -> RootSolution:
    """Solve ``(t+1)^(n+1) - t^(n+1) = k_star`` for ``t >= 0``.

    ``method`` is ``"numeric"`` (any n), ``"exact3"`` / ``"exact4"``
    (radical formulas for n = 3, 4) or ``"asymptotic"`` (three-term large
    ``k_star`` expansion).
    """
    if int(n) != n or n < 1:
        raise InvalidArgument(f"n must be a positive integer, got {n!r}")
    if not k_star >= 1:
        raise OutOfRange(f"k_star must be >= 1 for a nonnegative root, got {k_star!r}")
    if method == "numeric":
        t, _ = _solve_binomial(n + 1, k_star)
    elif method == "exact3":
        if n != 3:
            raise InvalidArgument("exact3 solves the n = 3 equation only")
        # x = rho - varrho solves x^3 + x - 2 k_star = 0 with rho * varrho = 1/3;
        # varrho = 1/(3 rho) avoids the cancellation in -k + sqrt(k^2 + 1/27)
        rho = (k_star + math.sqrt(k_star * k_star + 1 / 27)) ** (1 / 3)
        t = 0.5 * (rho - 1 / (3 * rho)) - 0.5
    elif method == "exact4":
        if n != 4:
            raise InvalidArgument("exact4 solves the n = 4 equation only")
        theta = math.sqrt(math.sqrt(20 * k_star + 5) / 10 - 0.25)
        t = theta - 0.5
    elif method == "asymptotic":
        t = eta_asymptotic(n, k_star, 3) - 0.5
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    residual = binomial_diff(max(t, 0.0), n + 1) - k_star
    return RootSolution(n, k_star, t, method, residual)


def asymptotic_correction(n: int, zeta: float, terms: int = 3) -> float:
    """``eta - zeta`` from the truncated large-root expansion in powers of
    ``1/zeta``; ``terms`` counts the leading ``zeta`` itself."""
    if terms not in (1, 2, 3):
        raise InvalidArgument("terms must be 1, 2 or 3")
    corr = 0.0
    if terms >= 2:
        corr -= (n - 1) / (24 * zeta)
    if terms >= 3:
        corr += (n - 1) * (n - 3) * (2 * n + 1) / (5760 * zeta ** 3)
    return corr


def eta_asymptotic(n: int, k_star: float, terms: int = 3) -> float:
    """Approximate ``eta = t + 1/2``, the centred root, for large ``k_star``."""
    zeta = (k_star / (n + 1)) ** (1.0 / n)
    if zeta < 1:
        raise OutOfRange(f"expansion needs zeta >= 1, got zeta={zeta:.6g}")
    return zeta + asymptotic_correction(n, zeta, terms)


@dataclass(frozen=True)
class ExtremalProfile:
    """Trapezoid ``Psi_s``: height ``M`` on ``[0, s]``, then slope ``-L``."""

    n: int
    M: float
    L: float
    s: float
    t: float
    k_star: float
    m_star: float

    @property
    def support(self) -> float:
        return self.s + self.M / self.L

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.clip(self.M - self.L * (r - self.s), 0.0, self.M)


def profile_for(n: int, volume: float, inertia: float, k: float) -> ExtremalProfile:
    """Extremal trapezoid for the first ``k`` eigenfunctions on a domain with
    the given volume and moment of inertia."""
    if not (volume > 0 and inertia > 0):
        raise InvalidArgument("volume and inertia must be positive")
    if not k >= 1:
        raise InvalidArgument(f"k must be >= 1, got {k!r}")
    omega = unit_ball_volume(n)
    scale = (2 * math.pi) ** -n
    M = scale * volume
    L = 2 * scale * math.sqrt(volume * inertia)
    # k (n+1) L^n / (omega M^(n+1)), grouped to stay in range
    k_star = k * (n + 1) * (L / M) ** n / (omega * M)
    root = solve_t(n, k_star)
    return ExtremalProfile(n, M, L, root.t * M / L, root.t, k_star, k / (n * omega))


def trapezoid_for_moment(M: float, L: float, b: int, m_star: float) -> ExtremalProfile:
    """Trapezoid with caps ``M``, ``L`` whose ``b``-moment is ``m_star``."""
    if not (M > 0 and L > 0):
        raise InvalidArgument("M and L must be positive")
    target = m_star * (b + 1) * (b + 2) * (L / M) ** (b + 1) / M
    if not target >= 1:
        raise InfeasibleMoment(
            f"b-moment {m_star!r} is below that of the plateau-free trapezoid")
    t, _ = _solve_binomial(b + 2, target)
    return ExtremalProfile(b + 1, M, L, t * M / L, t, target, m_star)


def psi_moment(profile: ExtremalProfile, d: int) -> float:
    """``int_0^inf r^d Psi_s(r) dr`` in closed form."""
    if int(d) != d or d < 0:
        raise InvalidArgument(f"moment order must be a nonnegative integer, got {d!r}")
    M, L = profile.M, profile.L
    return M * (M / L) ** (d + 1) / ((d + 1) * (d + 2)) * binomial_diff(profile.t, d + 2)


def rigorous_sum_bound(n: int, l: int, volume: float, inertia: float, k: float) -> BoundResult:
    """Certified lower bound on the mean of the first ``k`` eigenvalues of
    ``(-Delta)^l``, from the ``(n+2l-1)``-moment of the extremal trapezoid."""
    p = profile_for(n, volume, inertia, k)
    omega = unit_ball_volume(n)
    value = n * omega * psi_moment(p, n + 2 * l - 1) / k
    return BoundResult("rigorous", k, (Term("psi_moment", value),), f"t={p.t:.6g}")


def rigorous_quad_bound(n: int, volume: float, inertia: float, a: float, k: float) -> BoundResult:
    """Same as :func:`rigorous_sum_bound` for ``Delta^2 - a Delta``; one
    trapezoid serves both moments."""
    if not a >= 0:
        raise InvalidArgument("a must be nonnegative")
    p = profile_for(n, volume, inertia, k)
    c = n * unit_ball_volume(n) / k
    return BoundResult("rigorous_quad", k, (
        Term("psi_moment_4", c * psi_moment(p, n + 3)),
        Term("a*psi_moment_2", c * a * psi_moment(p, n + 1)),
    ), f"t={p.t:.6g}")


def expansion_terms(n: int, l: int, volume: float, inertia: float, k: float) -> tuple[float, float, float]:
    """First three terms of the large-k expansion of ``k * rigorous_sum_bound``."""
    spec = ProblemSpec(n, volume, inertia, l)
    w = bounds._weyl_factor
    r = spec.v_over_i
    first = n / (n + 2 * l) * w(spec, 2 * l) * k ** (1 + 2 * l / n)
    second = n * l / 48 * w(spec, 2 * l - 2) * r * k ** (1 + (2 * l - 2) / n)
    third = (n * bounds.expansion_coefficient(n, l) / 92160 * w(spec, 2 * l - 4)
             * r * r * k ** (1 + (2 * l - 4) / n))
    return first, second, third


def _mp_sum_and_terms(n, l, volume, inertia, k):
    # k * (psi bound) and its three expansion terms at the caller's working
    # precision; their difference sits far below the double-precision ulp
    mp = mpmath.mp
    V, I, k = mpmath.mpf(volume), mpmath.mpf(inertia), mpmath.mpf(k)
    two_pi = 2 * mp.pi
    omega = mp.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2 + 1)
    M = V / two_pi ** n
    L = 2 * mpmath.sqrt(V * I) / two_pi ** n
    k_star = k * (n + 1) * L ** n / (omega * M ** (n + 1))
    half = mpmath.mpf(1) / 2

    def g(eta):
        return (eta + half) ** (n + 1) - (eta - half) ** (n + 1) - k_star

    t0 = _solve_binomial(n + 1, float(k_star))[0]
    eta = mpmath.findroot(g, mpmath.mpf(t0) + half)
    d = n + 2 * l - 1
    moment = M ** (d + 2) / ((d + 1) * (d + 2) * L ** (d + 1)) * (
        (eta + half) ** (d + 2) - (eta - half) ** (d + 2))
    total = n * omega * moment

    def w(power):
        return two_pi ** power / (omega * V) ** (mpmath.mpf(power) / n)

    r = V / I
    first = mpmath.mpf(n) / (n + 2 * l) * w(2 * l) * k ** (1 + mpmath.mpf(2 * l) / n)
    second = mpmath.mpf(n * l) / 48 * w(2 * l - 2) * r * k ** (1 + mpmath.mpf(2 * l - 2) / n)
    third = (mpmath.mpf(n * bounds.expansion_coefficient(n, l)) / 92160 * w(2 * l - 4)
             * r * r * k ** (1 + mpmath.mpf(2 * l - 4) / n))
    return total, first, second, third


def expansion_remainder(n: int, l: int, volume: float, inertia: float, k: float) -> float:
    """``k * rigorous_sum_bound`` minus its three-term expansion, computed in
    extended precision."""
    with mpmath.workdps(60):
        total, first, second, third = _mp_sum_and_terms(n, l, volume, inertia, k)
        return float(total - first - second - third)


def epsilon_effective(n: int, l: int, volume: float, inertia: float, k: float) -> float:
    """The ``eps`` that makes the two-term ``nl/48`` bound equal the
    Psi-profile bound at this ``k``.  Diagnostic only; may be negative."""
    if not math.isfinite(inertia):
        raise NotApplicable("infinite inertia: the second term vanishes and eps is undefined")
    if not k >= 1:
        raise InvalidArgument(f"k must be >= 1, got {k!r}")
    with mpmath.workdps(60):
        total, first, second, _ = _mp_sum_and_terms(n, l, volume, inertia, k)
        return float(1 - (total - first) / second)


def n3_poly_lower(k_star: float) -> tuple[float, float, float]:
    """``(t+1)^8 - t^8`` at the n = 3 root, with its two polynomial minorants
    (the second uses ``alpha_3``).  Valid for ``k_star >= TAU``."""
    if not k_star >= TAU:
        raise BelowThreshold(f"n = 3 bounds need k_star >= {TAU:.6g}, got {k_star!r}")
    exact = binomial_diff(solve_t(3, k_star).t, 8)
    c1 = 2 ** (1 / 3) / 4 * k_star ** (7 / 3)
    c2 = 7 * 2 ** (2 / 3) / 12 * k_star ** (5 / 3)
    lower35 = c1 + c2 - 7 / 24 * k_star
    lower36 = c1 + float(bounds.ALPHA[3]) * c2
    return exact, lower35, lower36


def n4_closed_form(k_star: float) -> float:
    """Algebraic form of ``(t+1)^9 - t^9`` at the n = 4 root, any ``k_star >= 1``."""
    if not k_star >= 1:
        raise OutOfRange(f"k_star must be >= 1, got {k_star!r}")
    q = math.sqrt(20 * k_star + 5)
    return 9 / 25 * k_star ** 2 + 6 / 25 * k_star * q - 18 / 25 * k_star + 3 / 50 * q - 7 / 50


def n4_poly_lower(k_star: float) -> tuple[float, float, float, float]:
    """``(exact, closed, lower41, lower42)`` for n = 4; needs ``k_star >= SIGMA``."""
    if not k_star >= SIGMA:
        raise BelowThreshold(f"n = 4 bounds need k_star >= {SIGMA:.6g}, got {k_star!r}")
    exact = binomial_diff(solve_t(4, k_star).t, 9)
    closed = n4_closed_form(k_star)
    if not math.isclose(exact, closed, rel_tol=1e-9):
        raise NumericalBreakdown(f"closed form {closed!r} disagrees with {exact!r}")
    c1 = 9 / 25 * k_star ** 2
    c2 = 12 * math.sqrt(5) / 25 * k_star ** 1.5
    return exact, closed, c1 + c2 - 18 / 25 * k_star, c1 + float(bounds.ALPHA[4]) * c2


def poly_lower_slack(n: int, k_star: float) -> tuple[float, float]:
    """Margins ``exact - lower`` of the two polynomial minorants for n = 3
    (``lower35``, ``lower36``) or n = 4 (``lower41``, ``lower42``).

    For large ``k_star`` the margin is many orders of magnitude below the
    spacing of doubles near the exact value, so both sides are evaluated at
    60 significant digits (exact radical roots, no iteration).
    """
    if n == 3:
        if not k_star >= TAU:
            raise BelowThreshold(f"n = 3 bounds need k_star >= {TAU:.6g}, got {k_star!r}")
    elif n == 4:
        if not k_star >= SIGMA:
            raise BelowThreshold(f"n = 4 bounds need k_star >= {SIGMA:.6g}, got {k_star!r}")
    else:
        raise InvalidArgument("polynomial minorants exist for n = 3 and n = 4 only")
    with mpmath.workdps(60):
        k = mpmath.mpf(k_star)
        third = mpmath.mpf(1) / 3
        if n == 3:
            rho = mpmath.cbrt(k + mpmath.sqrt(k * k + mpmath.mpf(1) / 27))
            t = (rho - 1 / (3 * rho)) / 2 - mpmath.mpf(1) / 2
            exact = (t + 1) ** 8 - t ** 8
            c1 = mpmath.cbrt(2) / 4 * k ** (7 * third)
            c2 = 7 * mpmath.cbrt(4) / 12 * k ** (5 * third)
            lower_a = c1 + c2 - mpmath.mpf(7) / 24 * k
            lower_b = c1 + mpmath.mpf(bounds.ALPHA[3]) * c2
        else:
            theta = mpmath.sqrt(mpmath.sqrt(20 * k + 5) / 10 - mpmath.mpf(1) / 4)
            t = theta - mpmath.mpf(1) / 2
            exact = (t + 1) ** 9 - t ** 9
            c1 = mpmath.mpf(9) / 25 * k ** 2
            c2 = 12 * mpmath.sqrt(5) / 25 * k ** mpmath.mpf(1.5)
            lower_a = c1 + c2 - mpmath.mpf(18) / 25 * k
            lower_b = c1 + mpmath.mpf(bounds.ALPHA[4]) * c2
        return float(exact - lower_a), float(exact - lower_b)


@dataclass(frozen=True)
class FeasibleProfile:
    """Piecewise-linear decreasing profile through ``(radii[i], values[i])``,
    identically zero beyond the last knot."""

    radii: np.ndarray
    values: np.ndarray
    M: float
    L: float

    @classmethod
    def trapezoid(cls, M: float, L: float, s: float) -> "FeasibleProfile":
        if s > 0:
            return cls(np.array([0.0, s, s + M / L]), np.array([M, M, 0.0]), M, L)
        return cls(np.array([0.0, M / L]), np.array([M, 0.0]), M, L)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.radii)

    def moment(self, d: int) -> float:
        r0, r1 = self.radii[:-1], self.radii[1:]
        f0 = self.values[:-1]
        m = self.slopes
        c0 = f0 - m * r0
        parts = (c0 * (r1 ** (d + 1) - r0 ** (d + 1)) / (d + 1)
                 + m * (r1 ** (d + 2) - r0 ** (d + 2)) / (d + 2))
        return math.fsum(parts)

    def is_feasible(self, rtol: float = 1e-12) -> bool:
        v = self.values
        slopes = self.slopes
        return bool(
            v[-1] == 0.0
            and np.all(v >= 0) and np.all(v <= self.M * (1 + rtol))
            and np.all(slopes <= 0) and np.all(-slopes <= self.L * (1 + rtol))
        )

    def scaled(self, c: float) -> "FeasibleProfile":
        """``r -> F(r / c)``: moments of order d grow by ``c^(d+1)``, slopes shrink by ``c``."""
        return FeasibleProfile(self.radii * c, self.values, self.M, self.L)


def random_feasible_profile(rng: np.random.Generator, M: float, L: float, b: int,
                            m_star: float) -> FeasibleProfile | None:
    """Random decreasing piecewise-linear profile with caps ``M``, ``L`` and
    ``b``-moment ``m_star``, or ``None`` when the radial rescaling needed to
    hit ``m_star`` would break the slope cap."""
    segments = int(rng.integers(2, 21))
    unit = M / L
    lengths = rng.exponential(unit * math.exp(rng.uniform(-3.0, 1.0)), segments)
    u = rng.uniform(0.0, 1.0, segments)
    # give the extremal ingredients (flat plateau, steepest slope) positive mass
    u[rng.uniform(size=segments) < 0.15] = 0.0
    u[rng.uniform(size=segments) < 0.15] = 1.0
    f = M if rng.uniform() < 0.5 else M * rng.uniform(0.05, 1.0)
    radii, values = [0.0], [f]
    for length, frac in zip(lengths, u):
        slope = -L * frac
        if f + slope * length <= 0.0:
            radii.append(radii[-1] + f / (L * frac))
            values.append(0.0)
            break
        f += slope * length
        radii.append(radii[-1] + length)
        values.append(f)
    if values[-1] > 0.0:
        tail = L * rng.uniform(0.05, 1.0)
        radii.append(radii[-1] + values[-1] / tail)
        values.append(0.0)
    shape = FeasibleProfile(np.array(radii), np.array(values), M, L)
    c = (m_star / shape.moment(b)) ** (1.0 / (b + 1))
    if np.max(-shape.slopes) / c > L * (1 + 1e-12):
        return None
    return shape.scaled(c)


@dataclass(frozen=True)
class Lemma1Report:
    trials: int
    rejected: int
    violations: int
    min_slack: float
    psi_moment: float
    m_star: float


def lemma1_minimality(M: float, L: float, b: int, d: int, m_star: float,
                      trial_count: int, seed: int | None = None,
                      max_attempts: int | None = None) -> Lemma1Report:
    """Check that no random feasible profile with the same ``b``-moment has a
    smaller ``d``-moment than the trapezoid ``Psi_s``.

    A violation is ``int r^d F < int r^d Psi_s - 1e-9 - 1e-12 |int r^d Psi_s|``.
    """
    if not 0 <= b <= d:
        raise InvalidArgument("need 0 <= b <= d")
    psi = trapezoid_for_moment(M, L, b, m_star)
    target = psi_moment(psi, d)
    floor = 1e-9 + 1e-12 * abs(target)
    rng = np.random.default_rng(seed)
    max_attempts = max_attempts or 100 * trial_count + 1000
    accepted = rejected = violations = 0
    min_slack = math.inf
    while accepted < trial_count:
        if accepted + rejected >= max_attempts:
            raise NumericalBreakdown(
                f"only {accepted} of {trial_count} feasible profiles after {max_attempts} draws")
        F = random_feasible_profile(rng, M, L, b, m_star)
        if F is None or not F.is_feasible():
            rejected += 1
            continue
        accepted += 1
        slack = F.moment(d) - target
        min_slack = min(min_slack, slack)
        if slack < -floor:
            violations += 1
    return Lemma1Report(accepted, rejected, violations, min_slack, target, m_star)
