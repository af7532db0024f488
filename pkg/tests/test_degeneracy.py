import numpy as np
import pytest

from tgeom import (
    DegenerateSkeletonError,
    SingularMetricError,
    degeneration_check,
    eta_case1_closed,
    eta_triangle,
    euclideaness_check,
)
from tgeom.degeneracy import diagnostic_probes
from conftest import world


def orthonormal_basis(n):
    return np.vstack([np.zeros(n), np.eye(n)])


def probes_for(n, count=24, seed=13):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(count, n))


# ---------------------------------------------------------------------------
# flat-space conditions
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
def test_euclidean_world_passes_all_conditions(n):
    w = world("euclidean", dim=n, metric=[1] * n)
    report = euclideaness_check(w, n, orthonormal_basis(n), probes_for(n))
    for check in report.checks:
        assert check.verdict, check.name
        if check.name != "IV_solvability":
            assert check.residual < 1e-8, check.name
    assert report.summary["classification"] == "euclidean"
    assert report.summary["eigenvalue_signs"] == [1] * n


def test_minkowski_is_pseudo_euclidean(minkowski):
    report = euclideaness_check(minkowski, 4, orthonormal_basis(4), probes_for(4))
    assert report.summary["conditions_passed"]
    assert report.summary["classification"] == "pseudo_euclidean"
    assert sorted(report.summary["eigenvalue_signs"]) == [-1, -1, -1, 1]


def test_asymmetric_worlds_fail_condition_one(all_worlds):
    # staggered timelike probes keep clear of the screened family's pole
    basis = 0.5 * orthonormal_basis(4)
    basis[:, 0] += 0.1 * np.arange(5)
    probes = diagnostic_probes(4)
    for name in ("constant_a", "case1", "case2", "cubic_a"):
        report = euclideaness_check(all_worlds[name], 4, basis, probes)
        assert not report["I_symmetry"].verdict, name
        assert report.summary["classification"] == "not_euclidean", name


@pytest.mark.filterwarnings("ignore:divide by zero:RuntimeWarning")
@pytest.mark.filterwarnings("ignore:invalid value:RuntimeWarning")
def test_screened_pole_reported(case2):
    # the unit spacelike basis separation sits exactly on the screening pole
    with pytest.raises(SingularMetricError, match="pole"):
        euclideaness_check(case2, 4, orthonormal_basis(4), probes_for(4))


def test_wrong_dimension_fails_condition_two():
    # a 3-dimensional flat world is not 2-dimensional: the dimension check
    # must reject the n=2 hypothesis
    w = world("euclidean", dim=3, metric=[1, 1, 1])
    basis = np.vstack([np.zeros(3), np.eye(3)[:2]])
    report = euclideaness_check(w, 2, basis, probes_for(3))
    assert not report["II_dimension"].verdict
    assert report.summary["classification"] == "not_euclidean"


def test_degenerate_basis_rejected(euclid3):
    basis = np.vstack([np.zeros(3), np.eye(3)])
    basis[2] = basis[1]  # repeated basis point
    with pytest.raises(DegenerateSkeletonError):
        euclideaness_check(euclid3, 3, basis, probes_for(3))


def test_general_position_basis(euclid3):
    # conditions do not depend on the basis being orthonormal
    rng = np.random.default_rng(3)
    basis = rng.normal(size=(4, 3))
    report = euclideaness_check(euclid3, 3, basis, probes_for(3))
    assert report.summary["classification"] == "euclidean"


# ---------------------------------------------------------------------------
# degeneration taxonomy
# ---------------------------------------------------------------------------

def test_degeneration_taxonomy(all_worlds):
    x = np.array([0.2, -0.1, 0.3, 0.05])
    expected = {
        "euclidean": "degenerate",
        "constant_a": "degenerate",
        "case1": "nondegenerate",
        "case2": "nondegenerate",
        "cubic_a": "nondegenerate",
    }
    for name, w in all_worlds.items():
        report = degeneration_check(w, x)
        for kind in ("neutral", "future", "past"):
            assert report.summary[kind] == expected[name], (name, kind)


def test_degeneration_report_structure(minkowski):
    report = degeneration_check(minkowski, np.zeros(4))
    names = {c.name for c in report.checks}
    assert names == {"neutral_gradient_cancel", "eikonal", "future_tube",
                     "past_tube"}
    doc = report.to_dict()
    assert doc["world"] == "euclidean"
    assert all(c["verdict"] == "pass" for c in doc["checks"])


def test_eikonal_residual_small_flat(const_a4):
    report = degeneration_check(const_a4, np.zeros(4))
    assert report["eikonal"].residual < 1e-8


# ---------------------------------------------------------------------------
# triangle antisymmetry
# ---------------------------------------------------------------------------

def test_eta_constant_anisotropy_zero(const_a4):
    rng = np.random.default_rng(4)
    for _ in range(50):
        x, xp, y = rng.normal(size=(3, 4))
        assert eta_triangle(const_a4, x, xp, y) == pytest.approx(0.0, abs=1e-14)


def test_eta_flat_zero(minkowski):
    rng = np.random.default_rng(5)
    x, xp, y = rng.normal(size=(3, 4))
    assert eta_triangle(minkowski, x, xp, y) == 0.0


def test_eta_case1_matches_closed_form(case1):
    rng = np.random.default_rng(6)
    mink = np.diag([1.0, -1, -1, -1])
    for _ in range(50):
        x, xp, y = rng.normal(size=(3, 4))
        got = eta_triangle(case1, x, xp, y)
        want = eta_case1_closed(x, xp, y, 0.2, [1, 0, 0, 0], mink)
        assert abs(got - want) < 1e-12 * max(1.0, abs(want))


def test_eta_symmetry_properties(case1):
    rng = np.random.default_rng(7)
    for _ in range(50):
        x, xp, y = rng.normal(size=(3, 4))
        base = eta_triangle(case1, x, xp, y)
        # cyclic invariance
        assert eta_triangle(case1, xp, y, x) == pytest.approx(base, rel=1e-13, abs=1e-13)
        assert eta_triangle(case1, y, x, xp) == pytest.approx(base, rel=1e-13, abs=1e-13)
        # negation under any transposition
        assert eta_triangle(case1, xp, x, y) == pytest.approx(-base, rel=1e-13, abs=1e-13)
        assert eta_triangle(case1, x, y, xp) == pytest.approx(-base, rel=1e-13, abs=1e-13)
