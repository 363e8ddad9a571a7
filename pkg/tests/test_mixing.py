from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from modflow.flow import TwoIntervalCone, flow_zeta
from modflow.geometry import CircleArc, NInterval, symmetric_ninterval
from modflow.mixing import (flowed_positions, k_matrix, mixing_angle_n2, mixing_closed_symmetric,
                            mixing_ode, mixing_ode_series, omega_matrix, rotation_angle,
                            top_angle_path)
from modflow.uniformization import preimages

ARC = CircleArc(0.3, 1.5)


def test_omega_n2():
    assert np.allclose(omega_matrix(2).entries, [[0, -0.5], [0.5, 0]], atol=1e-16)


def test_omega_n3_entry():
    assert omega_matrix(3).entries[0, 1] == pytest.approx(-1 / math.sqrt(3))
    assert omega_matrix(3).entries[0, 1] == pytest.approx(-0.5773503, abs=1e-7)


@pytest.mark.parametrize("n", range(1, 9))
def test_omega_antisymmetric(n):
    om = omega_matrix(n).entries
    assert np.array_equal(om, -om.T)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.floats(-6, 6))
def test_omega_exp_matches_expm(n, c):
    om = omega_matrix(n)
    assert np.max(np.abs(om.exp(c) - expm(c * om.entries))) < 1e-12


def test_omega_n3_eigenvalues():
    # antisymmetric 3x3: eigenvalues 0 and +-i times the Frobenius norm over sqrt 2
    om = omega_matrix(3).entries
    lam = np.linalg.eigvals(om)
    r = np.linalg.norm(om) / math.sqrt(2)
    assert r == pytest.approx(1.0, abs=1e-15)
    assert sorted(abs(lam.imag)) == pytest.approx([0, r, r], abs=1e-14)


def test_omega_rejects_zero():
    with pytest.raises(ValueError):
        omega_matrix(0)


# ---------------------------------------------------------------------------
# K


def test_k_matrix_n1():
    E = NInterval.from_pairs([(0, 1)])
    assert k_matrix(E, 0.3).shape == (1, 1)
    assert k_matrix(E, 0.3)[0, 0] == 0


def test_k_matrix_antisymmetric_random():
    rng = np.random.default_rng(11)
    e = np.sort(rng.uniform(-4, 4, 6))
    E = NInterval.from_pairs(e.reshape(3, 2))
    K = k_matrix(E, 0.17)
    assert np.allclose(K, -K.T, atol=1e-14)


def test_k_matrix_symmetric_is_omega_times_angular_speed():
    n = 3
    E = symmetric_ninterval(ARC, n)
    t, h = 0.2, 1e-5
    xi = top_angle_path(ARC, n, [t - h, t + h])
    xi_dot = (xi[1] - xi[0]) / (2 * h)
    assert np.allclose(k_matrix(E, t), omega_matrix(n).entries * xi_dot, atol=1e-8)


def test_flowed_positions_descending():
    E = symmetric_ninterval(ARC, 3)
    pos = flowed_positions(E, 0.4)
    assert np.all(np.diff(pos) < 0)
    assert flowed_positions(E, np.array([0.0, 0.4])).shape == (2, 3)


# ---------------------------------------------------------------------------
# closed form


def test_closed_identity_at_zero():
    for n in (2, 3, 4):
        assert np.allclose(mixing_closed_symmetric(ARC, n, 0.0).entries, np.eye(n), atol=1e-15)


def test_closed_n2_is_rotation():
    m = mixing_closed_symmetric(ARC, 2, 0.6).entries
    th = rotation_angle(m)
    assert np.allclose(m, [[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]], atol=1e-15)
    xi = top_angle_path(ARC, 2, [0.0, 0.6])
    assert th == pytest.approx(0.5 * (xi[1] - xi[0]), abs=1e-14)


def test_closed_n3_eigenvalues():
    t = 0.45
    xi = top_angle_path(ARC, 3, [0.0, t])
    phi = abs(xi[1] - xi[0])
    lam = np.linalg.eigvals(mixing_closed_symmetric(ARC, 3, t).entries)
    got = sorted(np.angle(lam))
    assert got == pytest.approx([-phi, 0.0, phi], abs=1e-12)


def test_closed_cocycle():
    n, t1, t2 = 3, 0.3, -0.5
    E = symmetric_ninterval(ARC, n)
    x0 = flowed_positions(E, 0.0)[0]
    x1 = flow_zeta(E, t1, x0)
    lhs = mixing_closed_symmetric(ARC, n, t1 + t2, x0).entries
    rhs = mixing_closed_symmetric(ARC, n, t2, x1).entries @ mixing_closed_symmetric(ARC, n, t1, x0).entries
    assert np.allclose(lhs, rhs, atol=1e-13)


# ---------------------------------------------------------------------------
# ODE


def test_ode_identity_at_zero():
    E = symmetric_ninterval(ARC, 3)
    assert np.array_equal(mixing_ode(E, 0.0).entries, np.eye(3))


@pytest.mark.parametrize("n", [2, 3])
def test_ode_matches_closed_form(n):
    E = symmetric_ninterval(ARC, n)
    for t in (-0.7, 0.5):
        m = mixing_ode(E, t)
        assert np.linalg.norm(m.entries - mixing_closed_symmetric(ARC, n, t).entries) < 1e-8


def test_ode_special_orthogonal():
    rng = np.random.default_rng(4)
    e = np.sort(rng.uniform(-4, 4, 8))
    E = NInterval.from_pairs(e.reshape(4, 2))
    mats, worst = mixing_ode_series(E, [-0.8, 0.3, 0.8], steps_per_unit=4000, track_defect=True)
    assert worst < 1e-9
    assert all(m.det > 0 for m in mats)


def test_ode_series_matches_single_runs():
    E = symmetric_ninterval(ARC, 2)
    mats, _ = mixing_ode_series(E, [0.25, -0.25], steps_per_unit=2000)
    single = mixing_ode(E, 0.25, steps=500)
    assert np.allclose(mats[0].entries, single.entries, atol=1e-14)


def test_ode_start_point_independent_of_component():
    cone = TwoIntervalCone(0.4, 2.5, -3.0, -1.2)
    a, b = preimages(cone.ninterval, 0.3)
    ma = mixing_ode(cone.ninterval, 0.7, x=a).entries
    mb = mixing_ode(cone.ninterval, 0.7, x=b).entries
    assert np.allclose(ma, mb, atol=1e-14)


# ---------------------------------------------------------------------------
# n = 2 angle


def test_angle_zero_at_zero():
    cone = TwoIntervalCone(0.4, 2.5, -3.0, -1.2)
    assert mixing_angle_n2(cone, 0.0, 1.0) == 0.0


def test_angle_bounded():
    cone = TwoIntervalCone(0.4, 2.5, -3.0, -1.2)
    for t in (-20.0, 20.0):
        assert abs(mixing_angle_n2(cone, t, 1.0)) < math.pi


def test_angle_matches_ode():
    cone = TwoIntervalCone(0.4, 2.5, -3.0, -1.2)
    x0 = preimages(cone.ninterval, -0.2)[1]
    m = mixing_ode(cone.ninterval, 0.6, x=x0)
    assert m.rotation_angle == pytest.approx(mixing_angle_n2(cone, 0.6, x0), abs=1e-8)


def test_angle_vanishes_far_from_boundary():
    # move the two intervals apart, which moves the double cone away from x = 0
    thetas = []
    for d in (1.0, 10.0, 100.0, 1000.0):
        cone = TwoIntervalCone(0.5 + d, 2.0 + d, -2.0 - d, -0.5 - d)
        x0 = preimages(cone.ninterval, 0.0)[1]
        thetas.append(abs(mixing_angle_n2(cone, 0.2, x0)))
    assert all(a > b for a, b in zip(thetas, thetas[1:]))
    assert thetas[-1] < 1e-2 * thetas[0]
