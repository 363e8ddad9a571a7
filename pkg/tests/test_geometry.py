from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modflow.errors import BoundaryPoint, SingularDerivative
from modflow.geometry import (INF, CircleArc, MoebiusMap, NInterval, PowerMap, RealInterval,
                              cayley, cayley_array, cayley_inv, lambda_I, root_arcs, schwarzian,
                              stencil_derivatives, symmetric_ninterval, wrap_angle)

finite = st.floats(-5, 5, allow_nan=False)


def random_moebius(rng):
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(m)) > 0.1:
            return MoebiusMap.from_matrix(m)


def test_moebius_normalized_and_composes():
    rng = np.random.default_rng(1)
    f, g = random_moebius(rng), random_moebius(rng)
    assert abs(np.linalg.det(f.matrix) - 1) < 1e-12
    z = 0.3 + 0.2j
    assert abs((f @ g)(z) - f(g(z))) < 1e-12
    assert abs(f.inverse()(f(z)) - z) < 1e-12
    assert (f @ f.inverse()).isclose(MoebiusMap.identity())


def test_moebius_projective_comparison():
    f = MoebiusMap(2, 1, 1, 1)
    g = MoebiusMap(-4, -2, -2, -2)
    assert f.isclose(g)


def test_moebius_point_at_infinity():
    f = MoebiusMap(1, 2, 3, 4)
    assert f(INF) == pytest.approx(1 / 3)
    assert MoebiusMap(1, 0, 0, 1)(INF) is INF
    assert f(-4 / 3) is INF


def test_moebius_rejects_singular():
    with pytest.raises(ValueError):
        MoebiusMap(1, 2, 2, 4)


def test_from_points():
    src = [0.1, 1j, -2.0]
    dst = [1.0, 2.0 + 1j, -1j]
    m = MoebiusMap.from_points(src, dst)
    for s, d in zip(src, dst):
        assert abs(m(s) - d) < 1e-12


@pytest.mark.parametrize("x, z", [(0.0, 1.0), (1.0, 1j), (INF, -1.0), (math.inf, -1.0)])
def test_cayley_examples(x, z):
    assert abs(cayley(x) - z) < 1e-15


@pytest.mark.parametrize("z, x", [(1.0, 0.0), (1j, 1.0), (cmath.exp(1j * math.pi / 4), math.tan(math.pi / 8))])
def test_cayley_inv_examples(z, x):
    assert cayley_inv(z) == pytest.approx(x, abs=1e-15)


def test_cayley_inv_value():
    assert cayley_inv(cmath.exp(1j * math.pi / 4)) == pytest.approx(0.4142135, abs=1e-7)


def test_cayley_inv_boundary():
    with pytest.raises(BoundaryPoint):
        cayley_inv(-1.0)


def test_cayley_round_trip_wide_range():
    xs = np.concatenate([-np.logspace(-8, 6, 400), [0.0], np.logspace(-8, 6, 400)])
    back = np.array([cayley_inv(cayley(x)) for x in xs])
    rel = np.abs(back - xs) / np.maximum(np.abs(xs), 1e-300)
    assert np.max(rel[xs != 0]) < 1e-12
    assert back[400] == 0.0


def test_cayley_array_matches_scalar():
    xs = np.linspace(-3, 3, 13)
    assert np.allclose(cayley_array(xs), [cayley(x) for x in xs], atol=1e-15)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_cayley_unit_modulus(x):
    assert abs(abs(cayley(x)) - 1.0) < 1e-14


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


@given(st.floats(-100, 100, allow_nan=False))
def test_wrap_angle_property(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi
    assert abs(cmath.exp(1j * w) - cmath.exp(1j * theta)) < 1e-12


# ---------------------------------------------------------------------------
# Lambda_I


def test_lambda_half_line_is_dilation():
    s = 0.7
    assert lambda_I(RealInterval(0, math.inf), s)(1.0) == pytest.approx(math.exp(s))


def test_lambda_zero_is_identity():
    for I in (RealInterval(-1, 2), RealInterval(0, math.inf), CircleArc(0.2, 2.0)):
        assert lambda_I(I, 0.0).isclose(MoebiusMap.identity())


def test_lambda_fixes_endpoints():
    m = lambda_I(RealInterval(0.0, 1.0), 1.0)
    assert abs(m(0.0)) < 1e-15
    assert abs(m(1.0) - 1.0) < 1e-15
    # interior points stay inside
    assert 0 < m(0.3).real < 1


def test_lambda_on_arc_fixes_endpoints_and_keeps_circle():
    arc = CircleArc(0.3, 2.1)
    m = lambda_I(arc, -0.8)
    p0, _, p1 = arc.points()
    assert abs(m(p0) - p0) < 1e-12
    assert abs(m(p1) - p1) < 1e-12
    z = cmath.exp(1.0j)
    assert abs(abs(m(z)) - 1) < 1e-12


@settings(max_examples=40)
@given(st.floats(-3, 3), st.floats(0.1, 4), finite, finite)
def test_lambda_group_law(lo, width, s, s2):
    I = RealInterval(lo, lo + width)
    lhs = lambda_I(I, s) @ lambda_I(I, s2)
    rhs = lambda_I(I, s + s2)
    scale = np.max(np.abs(rhs.matrix))
    assert lhs.isclose(rhs, tol=1e-12 * max(1.0, scale))


def test_lambda_group_law_arc():
    arc = CircleArc(-1.0, 1.5)
    assert (lambda_I(arc, 0.4) @ lambda_I(arc, -1.1)).isclose(lambda_I(arc, -0.7), tol=1e-12)


# ---------------------------------------------------------------------------
# intervals


def test_ninterval_validation():
    with pytest.raises(ValueError):
        NInterval.from_pairs([(0, 2), (1, 3)])
    with pytest.raises(ValueError):
        NInterval.from_pairs([(0, 1), (1, 3)])      # closures touch
    with pytest.raises(ValueError):
        NInterval.from_pairs([(2, 3), (0, 1)])
    with pytest.raises(ValueError):
        NInterval.from_pairs([])
    with pytest.raises(ValueError):
        NInterval.from_pairs([(-math.inf, 0), (1, math.inf)])


def test_ninterval_component_of():
    E = NInterval.from_pairs([(0, 1), (2, 3)])
    assert E.component_of(0.5) == 0
    assert E.component_of(2.5) == 1
    assert E.component_of(1.5) is None
    assert E.component_of(1.0) is None


def test_symmetric_ninterval_round_trip():
    arc = CircleArc(0.3, 1.5)
    for n in (1, 2, 3, 4):
        E = symmetric_ninterval(arc, n)
        assert E.n == n
        back = E.symmetric_arc()
        assert back is not None and back[1] == n
        assert back[0].start == pytest.approx(arc.start)
        assert back[0].end == pytest.approx(arc.end)


def test_symmetric_half_line():
    E = symmetric_ninterval(CircleArc(0, math.pi), 1)
    assert E.pairs() == [(0.0, math.inf)]


def test_symmetric_square_root_example():
    E = symmetric_ninterval(CircleArc(math.pi / 2, math.pi), 2)
    want = [(math.tan(-3 * math.pi / 8), -1.0), (math.tan(math.pi / 8), 1.0)]
    assert np.allclose(E.pairs(), want, atol=1e-14)


def test_non_symmetric_detected():
    assert NInterval.from_pairs([(0, 1), (2, 3)]).symmetric_arc() is None


def test_root_arcs_descending():
    arcs = root_arcs(CircleArc(0, math.pi), 3)
    mids = [a.mid_angle for a in arcs]
    assert mids == sorted(mids, reverse=True)
    assert all(a.length == pytest.approx(math.pi / 3) for a in arcs)


def test_arc_contains_and_offset():
    arc = CircleArc(2.5, -2.5)          # passes through -1
    assert arc.contains(-1.0)
    assert not arc.contains(1.0)
    assert arc.length == pytest.approx(2 * math.pi - 5.0)


# ---------------------------------------------------------------------------
# Schwarzian


def test_schwarzian_moebius_exact_and_numeric():
    rng = np.random.default_rng(7)
    m = random_moebius(rng)
    assert schwarzian(m, 0.3 + 0.1j) == 0
    z = 0.2 + 0.1j
    assert abs(m.c * z + m.d) > 0.1
    assert abs(schwarzian(lambda w: m(w), z)) < 1e-6


@pytest.mark.parametrize("nu", [0.5, 2.0, 3.0])
def test_schwarzian_power(nu):
    z = cmath.exp(0.7j)
    exact = schwarzian(PowerMap(nu), z)
    assert z * z * exact == pytest.approx((1 - nu * nu) / 2, abs=1e-15)
    numeric = schwarzian(lambda w: w**nu, z)
    # stencil with h = 1e-3 resolves the Schwarzian of z^nu to about 1e-6
    assert abs(numeric - exact) < 1e-5


def test_schwarzian_gamma_at_zero():
    assert schwarzian(lambda y: 2 * y / (1 - y * y), 0.0).real == pytest.approx(6.0, abs=1e-8)


def test_schwarzian_cocycle_with_moebius():
    rng = np.random.default_rng(3)
    mu = random_moebius(rng)
    z = cmath.exp(0.5j)
    for nu in (0.5, 1.5):
        f = PowerMap(nu)
        composed = schwarzian(lambda w: mu(f(w)), z)
        assert abs(composed - schwarzian(f, z)) < 1e-6


def test_stencil_derivatives_polynomial():
    d1, d2, d3 = stencil_derivatives(lambda x: x**3 + 2 * x, 0.5)
    assert d1 == pytest.approx(3 * 0.25 + 2, abs=1e-10)
    assert d2 == pytest.approx(3.0, abs=1e-8)
    assert d3 == pytest.approx(6.0, abs=1e-6)


def test_schwarzian_singular():
    with pytest.raises(SingularDerivative):
        schwarzian(lambda x: x**3, 0.0)
    with pytest.raises(ValueError):
        schwarzian(lambda x: x, 0.0, h=0)
