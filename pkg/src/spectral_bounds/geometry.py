"""Geometric invariants of boxes, balls and planar polygons.

Every bound in :mod:`spectral_bounds.bounds` only sees a domain through its
volume ``V``, its moment of inertia ``I = min_a int |x - a|^2 dx`` and the
unit-ball volume ``omega_n``.  This module produces those numbers in closed
form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Sequence

import numpy as np

from .errors import DegenerateDomain, InvalidArgument

__all__ = [
    "Domain",
    "GeometryInvariants",
    "unit_ball_volume",
    "invariants",
    "second_moment_about",
]


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n, ``pi^(n/2) / Gamma(n/2 + 1)``."""
    if int(n) != n or n < 1:
        raise InvalidArgument(f"dimension must be an integer >= 1, got {n!r}")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        return (v > 0) - (v < 0)

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_segment(p1, p2, q1):
        return True
    if o2 == 0 and on_segment(p1, p2, q2):
        return True
    if o3 == 0 and on_segment(q1, q2, p1):
        return True
    if o4 == 0 and on_segment(q1, q2, p2):
        return True
    return False


def _is_simple(vertices: np.ndarray) -> bool:
    m = len(vertices)
    edges = [(vertices[i], vertices[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            # adjacent edges share exactly one vertex
            if j == i + 1 or (i == 0 and j == m - 1):
                continue
            if _segments_cross(*edges[i], *edges[j]):
                return False
    return True


def _shoelace(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class Domain:
    """A box ``[0, s_1] x ... x [0, s_n]``, a ball centred at the origin, or a
    simple planar polygon.  Use the ``box``/``ball``/``polygon`` constructors."""

    kind: str
    dim: int
    sides: tuple[float, ...] | None = None
    radius: float | None = None
    vertices: tuple[tuple[float, float], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("box", "ball", "polygon"):
            raise InvalidArgument(f"unknown domain kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidArgument(f"dimension must be an integer >= 2, got {self.dim!r}")
        if self.kind == "box":
            if self.sides is None or len(self.sides) != self.dim:
                raise InvalidArgument("box needs one side length per dimension")
            if not all(math.isfinite(s) and s > 0 for s in self.sides):
                raise InvalidArgument(f"box sides must be positive, got {self.sides}")
        elif self.kind == "ball":
            if self.radius is None or not (math.isfinite(self.radius) and self.radius > 0):
                raise InvalidArgument(f"ball radius must be positive, got {self.radius}")
        else:
            if self.dim != 2:
                raise InvalidArgument("polygons are planar (dim = 2)")
            if self.vertices is None or len(self.vertices) < 3:
                raise InvalidArgument("polygon needs at least 3 vertices")

    @classmethod
    def box(cls, sides: Sequence[float]) -> "Domain":
        sides = tuple(float(s) for s in sides)
        return cls("box", len(sides), sides=sides)

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0) -> "Domain":
        return cls("ball", int(dim), radius=float(radius))

    @classmethod
    def polygon(cls, vertices: Sequence[Sequence[float]]) -> "Domain":
        """Build a polygon; clockwise input is reversed to counterclockwise."""
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidArgument("polygon vertices must be a list of >= 3 (x, y) pairs")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("polygon vertices must be finite")
        area = _shoelace(v - v.mean(axis=0))
        if area == 0.0:
            raise DegenerateDomain("polygon has zero area")
        if not _is_simple(v):
            raise InvalidArgument("polygon is self-intersecting")
        if area < 0:
            v = v[::-1]
        return cls("polygon", 2, vertices=tuple((float(x), float(y)) for x, y in v))

    @classmethod
    def from_dict(cls, data: dict) -> "Domain":
        kind = data.get("kind")
        if kind == "box":
            return cls.box(data["sides"])
        if kind == "ball":
            return cls.ball(data["dim"], data.get("radius", 1.0))
        if kind == "polygon":
            return cls.polygon(data["vertices"])
        raise InvalidArgument(f"unknown domain kind {kind!r}")

    @classmethod
    def from_json(cls, text: str | PathLike) -> "Domain":
        """Parse an inline JSON document or the path of a file holding one."""
        raw = str(text).strip()
        if not raw.startswith("{"):
            with open(raw) as fh:
                raw = fh.read()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"domain is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidArgument("domain JSON must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "sides": list(self.sides)}
        if self.kind == "ball":
            return {"kind": "ball", "dim": self.dim, "radius": self.radius}
        return {"kind": "polygon", "vertices": [list(p) for p in self.vertices]}

    def scaled(self, c: float) -> "Domain":
        """Dilate by ``c > 0`` about the origin."""
        if not c > 0:
            raise InvalidArgument("dilation factor must be positive")
        if self.kind == "box":
            return Domain.box([c * s for s in self.sides])
        if self.kind == "ball":
            return Domain.ball(self.dim, c * self.radius)
        return Domain.polygon([(c * x, c * y) for x, y in self.vertices])


@dataclass(frozen=True)
class GeometryInvariants:
    volume: float
    inertia: float
    centroid: tuple[float, ...]
    unit_ball_volume: float


def _polygon_moments(vertices: np.ndarray) -> tuple[float, np.ndarray, float]:
    # shift to the vertex mean first; keeps the vertex sums well conditioned
    origin = vertices.mean(axis=0)
    v = vertices - origin
    x0, y0 = v[:, 0], v[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    cross = x0 * y1 - x1 * y0
    area = 0.5 * math.fsum(cross)
    if area <= 0:
        raise DegenerateDomain("polygon has zero area")
    cx = math.fsum((x0 + x1) * cross) / (6 * area)
    cy = math.fsum((y0 + y1) * cross) / (6 * area)
    polar = math.fsum(cross * (x0 * x0 + x0 * x1 + x1 * x1 + y0 * y0 + y0 * y1 + y1 * y1)) / 12
    inertia = polar - area * (cx * cx + cy * cy)
    return area, np.array([cx, cy]) + origin, inertia


def invariants(domain: Domain) -> GeometryInvariants:
    """Volume, minimal second moment and centroid of ``domain``."""
    n = domain.dim
    omega = unit_ball_volume(n)
    if domain.kind == "box":
        s = np.asarray(domain.sides)
        volume = float(np.prod(s))
        inertia = volume * math.fsum(s * s) / 12
        centroid = tuple(float(x) for x in s / 2)
    elif domain.kind == "ball":
        R = domain.radius
        volume = omega * R ** n
        inertia = n * omega * R ** (n + 2) / (n + 2)
        centroid = (0.0,) * n
    else:
        volume, c, inertia = _polygon_moments(np.asarray(domain.vertices))
        centroid = (float(c[0]), float(c[1]))
    if not inertia > 0:
        raise DegenerateDomain("domain has no positive moment of inertia")
    return GeometryInvariants(volume, inertia, centroid, omega)


def second_moment_about(domain: Domain, a: Sequence[float]) -> float:
    """``int_domain |x - a|^2 dx``, via the parallel-axis identity."""
    inv = invariants(domain)
    a = np.asarray(a, dtype=float)
    if a.shape != (domain.dim,):
        raise InvalidArgument(f"point must have {domain.dim} coordinates")
    d = a - np.asarray(inv.centroid)
    return inv.inertia + inv.volume * float(d @ d)
