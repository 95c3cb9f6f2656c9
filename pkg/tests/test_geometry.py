import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate

from spectral_bounds.errors import DegenerateDomain, InvalidArgument
from spectral_bounds.geometry import Domain, invariants, second_moment_about, unit_ball_volume


def midpoint_moments(vertices, cells=800):
    """Slow oracle: area and centroid second moment by midpoint sampling."""
    v = np.asarray(vertices, dtype=float)
    lo, hi = v.min(axis=0), v.max(axis=0)
    xs = lo[0] + (np.arange(cells) + 0.5) * (hi[0] - lo[0]) / cells
    ys = lo[1] + (np.arange(cells) + 0.5) * (hi[1] - lo[1]) / cells
    X, Y = np.meshgrid(xs, ys)
    inside = np.zeros_like(X, dtype=bool)
    for (x0, y0), (x1, y1) in zip(v, np.roll(v, -1, axis=0)):
        crosses = (y0 > Y) != (y1 > Y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (Y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (X < xint)
    dA = (hi[0] - lo[0]) * (hi[1] - lo[1]) / cells ** 2
    area = inside.sum() * dA
    cx, cy = (X * inside).sum() * dA / area, (Y * inside).sum() * dA / area
    inertia = (((X - cx) ** 2 + (Y - cy) ** 2) * inside).sum() * dA
    return area, inertia


def test_unit_ball_volume_examples():
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)
    assert unit_ball_volume(5) == pytest.approx(2 * math.pi / 5 * unit_ball_volume(3), rel=1e-14)
    assert unit_ball_volume(5) == pytest.approx(8 * math.pi ** 2 / 15, rel=1e-14)


@pytest.mark.parametrize("n", range(3, 12))
def test_unit_ball_recurrence(n):
    assert unit_ball_volume(n) == pytest.approx(2 * math.pi / n * unit_ball_volume(n - 2), rel=1e-13)


def test_unit_ball_volume_rejects_zero():
    with pytest.raises(InvalidArgument):
        unit_ball_volume(0)


def test_unit_square_against_quadrature():
    inv = invariants(Domain.box([1, 1]))
    assert inv.volume == 1.0
    assert inv.inertia == pytest.approx(1 / 6, rel=1e-15)
    assert inv.centroid == (0.5, 0.5)
    quad, _ = integrate.dblquad(lambda y, x: (x - 0.5) ** 2 + (y - 0.5) ** 2, 0, 1, 0, 1)
    assert inv.inertia == pytest.approx(quad, rel=1e-12)


def test_disk_against_polar_quadrature():
    inv = invariants(Domain.ball(2, 1.0))
    assert inv.volume == pytest.approx(math.pi, rel=1e-15)
    assert inv.inertia == pytest.approx(math.pi / 2, rel=1e-15)
    polar, _ = integrate.quad(lambda r: 2 * math.pi * r ** 3, 0, 1)
    assert inv.inertia == pytest.approx(polar, rel=1e-12)


def test_square_polygon_matches_box():
    box = invariants(Domain.box([1, 1]))
    poly = invariants(Domain.polygon([(0, 0), (1, 0), (1, 1), (0, 1)]))
    assert poly.volume == pytest.approx(box.volume, rel=1e-12)
    assert poly.inertia == pytest.approx(box.inertia, rel=1e-12)
    assert_allclose(poly.centroid, box.centroid, rtol=1e-12)


def test_clockwise_polygon_is_normalized():
    ccw = Domain.polygon([(0, 0), (2, 0), (2, 1), (0, 1)])
    cw = Domain.polygon([(0, 1), (2, 1), (2, 0), (0, 0)])
    assert invariants(cw).volume == pytest.approx(2.0)
    assert invariants(cw).inertia == pytest.approx(invariants(ccw).inertia, rel=1e-14)


def test_l_shape_against_midpoint_oracle():
    verts = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    inv = invariants(Domain.polygon(verts))
    area, inertia = midpoint_moments(verts)
    assert inv.volume == pytest.approx(3.0, rel=1e-14)
    assert inv.volume == pytest.approx(area, rel=1e-3)
    assert inv.inertia == pytest.approx(inertia, rel=2e-3)


def test_degenerate_and_invalid_domains():
    with pytest.raises(DegenerateDomain):
        Domain.polygon([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(InvalidArgument):
        Domain.polygon([(0, 0), (1, 1), (1, 0), (0, 1)])  # bow tie
    with pytest.raises(InvalidArgument):
        Domain.box([1, -1])
    with pytest.raises(InvalidArgument):
        Domain.ball(3, 0.0)


def test_second_moment_examples():
    sq = Domain.box([1, 1])
    assert second_moment_about(sq, (0.5, 0.5)) == pytest.approx(1 / 6, rel=1e-15)
    assert second_moment_about(sq, (0, 0)) == pytest.approx(2 / 3, rel=1e-15)
    quad, _ = integrate.dblquad(lambda y, x: x * x + y * y, 0, 1, 0, 1)
    assert second_moment_about(sq, (0, 0)) == pytest.approx(quad, rel=1e-12)
    disk = Domain.ball(2, 1.0)
    assert second_moment_about(disk, (1, 0)) == pytest.approx(math.pi / 2 + math.pi, rel=1e-14)


DOMAINS = [
    Domain.box([1, 1]),
    Domain.box([2.0, 0.5, 1.3]),
    Domain.ball(3, 0.7),
    Domain.ball(4, 1.9),
    Domain.polygon([(0, 0), (3, 0), (3.5, 1), (1, 2.5), (-0.5, 1)]),
]


@pytest.mark.parametrize("domain", DOMAINS, ids=lambda d: d.kind)
def test_parallel_axis_random_points(domain):
    rng = np.random.default_rng(7)
    inv = invariants(domain)
    c = np.asarray(inv.centroid)
    for a in rng.normal(scale=3.0, size=(100, domain.dim)):
        d = a - c
        expected = inv.volume * float(d @ d)
        got = second_moment_about(domain, a) - inv.inertia
        assert got == pytest.approx(expected, rel=1e-10, abs=1e-12 * inv.inertia)
        assert second_moment_about(domain, a) >= inv.inertia


@pytest.mark.parametrize("domain", DOMAINS, ids=lambda d: d.kind)
@pytest.mark.parametrize("c", [0.5, 2.0, 3.7])
def test_dilation_scaling(domain, c):
    n = domain.dim
    base, big = invariants(domain), invariants(domain.scaled(c))
    assert big.volume == pytest.approx(c ** n * base.volume, rel=1e-12)
    assert big.inertia == pytest.approx(c ** (n + 2) * base.inertia, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_rectangle_polygon_agrees_with_box(a, b):
    box = invariants(Domain.box([a, b]))
    poly = invariants(Domain.polygon([(0, 0), (a, 0), (a, b), (0, b)]))
    assert poly.volume == pytest.approx(box.volume, rel=1e-12)
    assert poly.inertia == pytest.approx(box.inertia, rel=1e-12)


def test_json_round_trip(tmp_path):
    for text in ['{"kind":"box","sides":[1,1]}', '{"kind":"ball","dim":3,"radius":1.0}',
                 '{"kind":"polygon","vertices":[[0,0],[1,0],[0,1]]}']:
        d = Domain.from_json(text)
        assert Domain.from_dict(d.to_dict()) == d
    path = tmp_path / "dom.json"
    path.write_text('{"kind":"box","sides":[2,3]}')
    assert Domain.from_json(str(path)).sides == (2.0, 3.0)
    with pytest.raises(InvalidArgument):
        Domain.from_json('{"kind":"torus"}')
