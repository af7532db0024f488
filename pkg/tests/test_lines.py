import numpy as np
import pytest

from tgeom import (
    GeometryError,
    Trajectory,
    curve_deviation,
    gradient_line_implicit,
    gradient_line_ode,
    initial_velocity,
    path_deviation,
    reparam_invariance_check,
)
from conftest import random_a3, world

MINK = np.diag([1.0, -1.0, -1.0, -1.0])
XA = np.zeros(4)
XB = np.array([1.0, 0.3, -0.2, 0.1])
GRID = np.linspace(0.0, 1.0, 13)


@pytest.fixture(scope="module")
def small_cubic():
    # small cubic coefficients: the implicit and geodesic forms agree to
    # second order in the coefficients
    return world("cubic_a", a3=random_a3(scale=4e-4, seed=5).ravel().tolist())


def chord(taus):
    return XA + np.asarray(taus)[:, None] * (XB - XA)


def test_implicit_straight_on_flat(minkowski):
    traj = gradient_line_implicit(minkowski, "f", XA, XB, GRID)
    assert np.max(np.abs(traj.points - chord(GRID))) < 1e-10
    assert np.max(np.abs(traj.points[0] - XA)) < 1e-12
    assert np.max(np.abs(traj.points[-1] - XB)) < 1e-9
    assert np.max(traj.residuals) < 1e-11
    assert traj.warnings == []


def test_implicit_neutral_constant_anisotropy(const_a4, minkowski):
    # the symmetric part drops the covector: neutral lines are straight
    traj = gradient_line_implicit(const_a4, "n", XA, XB, GRID)
    ref = gradient_line_implicit(minkowski, "n", XA, XB, GRID)
    assert np.max(np.abs(traj.points - ref.points)) < 1e-10


def test_three_kinds_coincide_symmetric(minkowski):
    trajs = {k: gradient_line_implicit(minkowski, k, XA, XB, GRID) for k in "fpn"}
    for k in "pn":
        assert np.max(np.abs(trajs[k].points - trajs["f"].points)) < 1e-9


def test_ode_straight_on_flat(minkowski):
    traj = gradient_line_ode(minkowski, "f", XA, XB - XA, (0, 1), steps=8)
    dev = curve_deviation(traj.points, chord(np.linspace(0, 1, 9)))
    assert dev < 1e-10
    assert np.max(traj.residuals) < 1e-12  # velocity square exactly conserved


def test_implicit_vs_ode_cross_validation(small_cubic):
    traj_i = gradient_line_implicit(small_cubic, "f", XA, XB, np.linspace(0, 1, 21))
    # the curve genuinely bends away from the chord
    assert curve_deviation(traj_i.points, chord(np.linspace(0, 1, 21))) > 1e-5
    v0 = initial_velocity(small_cubic, "f", XA, XB)
    traj_o = gradient_line_ode(small_cubic, "f", XA, v0, (0, 1), steps=16)
    assert curve_deviation(traj_i.points, traj_o.points) < 1e-6


def test_future_past_differ_and_flip_with_coefficients():
    a3 = random_a3(scale=0.03, seed=6)
    w_pos = world("cubic_a", a3=a3.ravel().tolist())
    w_neg = world("cubic_a", a3=(-a3).ravel().tolist())
    v0 = np.array([1.0, 0.2, -0.1, 0.05])
    f_pos = gradient_line_ode(w_pos, "f", XA, v0, (0, 1), steps=16)
    p_pos = gradient_line_ode(w_pos, "p", XA, v0, (0, 1), steps=16)
    f_neg = gradient_line_ode(w_neg, "f", XA, v0, (0, 1), steps=16)
    assert np.max(np.abs(f_pos.points - p_pos.points)) > 1e-4
    # negating the coefficients swaps the future and past force terms
    assert np.max(np.abs(p_pos.points - f_neg.points)) < 1e-12


def test_neutral_ode_ignores_force(cubic, minkowski):
    v0 = np.array([1.0, 0.2, -0.1, 0.05])
    tr_c = gradient_line_ode(cubic, "n", XA, v0, (0, 1), steps=16)
    tr_e = gradient_line_ode(minkowski, "n", XA, v0, (0, 1), steps=16)
    assert curve_deviation(tr_c.points, tr_e.points) < 1e-9


def test_ode_rejects_rough_antisymmetry(case1):
    with pytest.raises(GeometryError, match="fine-antisymmetric"):
        gradient_line_ode(case1, "f", XA, XB - XA, (0, 1))
    # neutral form only uses the symmetric part: allowed
    traj = gradient_line_ode(case1, "n", XA, XB - XA, (0, 1), steps=8)
    assert traj.points.shape[1] == 4


def test_rough_antisymmetry_guard(case1):
    grid = np.linspace(0.01, 1.0, 15)
    traj = gradient_line_implicit(case1, "f", XA, XB, grid)
    assert traj.warnings
    assert traj.warnings[0]["code"] == "rough_antisymmetry_small_parameter"
    # samples away from the degenerate region converged
    assert traj.converged[-1]


def test_reparam_invariance_scaling(minkowski):
    dev = reparam_invariance_check(minkowski, ("scale", 2.0), "f", XA, XB, GRID)
    assert dev < 1e-10


def test_reparam_invariance_quadratic(small_cubic):
    dev = reparam_invariance_check(small_cubic, ("quadratic", 0.01), "f",
                                   XA, XB, GRID)
    assert dev < 1e-6


def test_reparam_identity(minkowski):
    assert reparam_invariance_check(minkowski, "identity", "n", XA, XB, GRID) == 0.0


def test_reparam_rejects_sign_change(small_cubic):
    # derivative 1 + 2 eps s changes sign over the encountered values
    with pytest.raises(GeometryError, match="sign"):
        reparam_invariance_check(small_cubic, ("quadratic", -2.0), "f",
                                 XA, XB, GRID)


def test_trajectory_validation():
    with pytest.raises(ValueError, match="strictly increasing"):
        Trajectory(params=np.array([0.0, 0.0, 1.0]),
                   points=np.zeros((3, 2)), kind="f",
                   residuals=np.zeros(3))
    with pytest.raises(ValueError, match="equal length"):
        Trajectory(params=np.array([0.0, 1.0]), points=np.zeros((3, 2)),
                   kind="f", residuals=np.zeros(3))


def test_path_deviation_truncates():
    a = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    b = np.array([[0.0, 0.1], [4.0, 0.1]])
    assert path_deviation(a, b) == pytest.approx(0.1)
