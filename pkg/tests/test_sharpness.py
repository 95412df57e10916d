import cmath
import json
import math

import numpy as np
import pytest

from schwarz_lab import sharpness
from schwarz_lab.diskmap import DiskSelfMap, derivative_at_origin, extremal_lemma1
from schwarz_lab.sharpness import (
    FamilySpec,
    SeparationFailure,
    SoundnessViolation,
    extremal_distance,
    grid_scan,
    locus_distance,
    minimize_slack,
    separation_scan,
    slack_at,
)


def test_family_parameterization():
    fam = FamilySpec(3, k=1, free_phase=True)
    assert fam.parameter_count == 5
    rng = np.random.default_rng(0)
    params = fam.draw(rng)
    f = fam.build(params)
    assert f.degree == 3 and f.origin_multiplicity >= 1
    zs = fam.zeros_from(params)
    assert all(abs(a) < 0.95 for a in zs)
    back = fam.params_from(zs, params[-1])
    assert np.allclose(back, params, atol=1e-12)
    assert FamilySpec(3, k=1, fixed_modulus=0.5).parameter_count == 2
    with pytest.raises(ValueError):
        FamilySpec(2, k=3)


# -- grid oracle --------------------------------------------------------------------------


def test_grid_scan_eq1_degree2():
    slack, rho, psi = grid_scan(FamilySpec(2, 1), "eq1")
    assert abs(slack) <= 1e-12
    assert psi == pytest.approx(math.pi, abs=1e-12)


def test_grid_scan_eq16_k2():
    slack, rho, psi = grid_scan(FamilySpec(3, 2), "eq16")
    assert abs(slack) <= 1e-12
    assert psi == pytest.approx(math.pi, abs=1e-12)


def test_grid_scan_eq2_floor_is_cap_floor():
    slack, rho, _ = grid_scan(FamilySpec(2, 1), "eq2")
    assert rho == pytest.approx(0.95, abs=1e-3)
    assert slack == pytest.approx(0.05 / 1.95, abs=1e-3)


# -- optimizer -------------------------------------------------------------------------------


def test_eq1_degree2_reaches_extremal():
    fam = FamilySpec(2, 1)
    oracle, _, _ = grid_scan(fam, "eq1")
    assert oracle <= 1e-6
    res = minimize_slack(fam, "eq1", 5000, seed=0)
    assert res.min_slack <= 1e-6
    assert res.min_slack >= -1e-9
    assert extremal_distance(fam, res.argmin_parameters, res.argmin_boundary_point.angle) <= 1e-3


def test_eq16_k2_reaches_extremal():
    fam = FamilySpec(3, 2)
    assert grid_scan(fam, "eq16")[0] <= 1e-6
    res = minimize_slack(fam, "eq16", 5000, seed=1)
    assert res.min_slack <= 1e-6
    assert extremal_distance(fam, res.argmin_parameters, res.argmin_boundary_point.angle) <= 1e-3


def test_rotations_give_exact_zero():
    fam = FamilySpec(1, 1, free_phase=True)
    res = minimize_slack(fam, "eq1", 200)
    assert res.min_slack == 0.0
    for theta in (0.0, 1.0, 5.0):
        assert slack_at(fam, "eq1", [2.0], theta) == 0.0


def test_eq17_automorphisms_reach_zero():
    fam = FamilySpec(1, 0)
    res = minimize_slack(fam, "eq17", 500)
    assert abs(res.min_slack) <= 1e-9


def test_determinism_and_trace():
    fam = FamilySpec(3, 1, free_phase=True)
    a = minimize_slack(fam, "eq8", 800, seed=4)
    b = minimize_slack(fam, "eq8", 800, seed=4)
    assert a.to_json() == b.to_json()
    vals = [v for _, v in a.trace]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
    assert vals[-1] == a.min_slack
    assert a.iterations <= 800


def test_result_json_has_reproduction_block():
    res = minimize_slack(FamilySpec(2, 1), "eq1", 200, seed=3)
    d = json.loads(res.to_json())
    assert d["reproduction"] == {"seed": 3, "budget": 200, "family": FamilySpec(2, 1).to_dict()}
    assert DiskSelfMap.from_dict(d["argmin_map"]) == res.argmin_map()


def test_budget_and_family_checks():
    with pytest.raises(ValueError):
        minimize_slack(FamilySpec(2, 1), "eq1", 99)
    with pytest.raises(ValueError):
        minimize_slack(FamilySpec(2, 0), "eq1", 200)
    with pytest.raises(ValueError):
        minimize_slack(FamilySpec(2, 1), "eq6", 200)


@pytest.mark.parametrize("a", [round(0.1 * i, 1) for i in range(10)])
def test_eq1_sharp_for_each_origin_derivative(a):
    # |f'(0)| = |a| is pinned by the fixed-modulus free zero
    fam = FamilySpec(2, 1, fixed_modulus=a)
    res = minimize_slack(fam, "eq1", 800, seed=0)
    assert abs(derivative_at_origin(res.argmin_map())) == pytest.approx(a, abs=1e-12)
    assert res.min_slack <= 1e-6


def test_soundness_abort(monkeypatch):
    monkeypatch.setattr(sharpness, "slack_at", lambda *args: -1e-6)
    with pytest.raises(SoundnessViolation) as info:
        minimize_slack(FamilySpec(2, 1), "eq1", 200, seed=5)
    bundle = info.value.bundle
    assert bundle["seed"] == 5 and bundle["equation"] == "eq1"
    assert "parameters" in bundle and "angle" in bundle


# -- separation ----------------------------------------------------------------------------------


def test_separation_eq2_floor():
    assert separation_scan(FamilySpec(2, 1), "eq2", 0.05, 2000) >= 0.02


def test_separation_eq16_floor():
    worst = separation_scan(FamilySpec(3, 2), "eq16", 0.1, 2000)
    assert worst >= (1 - 0.9) / (1 + 0.9) - 1e-9


def test_separation_eq17_on_automorphisms():
    # equality sits at the single point b = -a/|a|, so random angles only approach it
    fam = FamilySpec(1, 0)
    coarse = separation_scan(fam, "eq17", 0.0, 50)
    fine = separation_scan(fam, "eq17", 0.0, 800)
    assert -1e-9 <= fine <= coarse and fine <= 1e-5
    for a in (0.3, 0.5 + 0.2j, -0.9j):
        theta = cmath.phase(-a)
        assert abs(slack_at(fam, "eq17", fam.params_from([a]), theta)) <= 1e-10


def test_separation_failure_is_raised(monkeypatch):
    class Zero:
        slack = 0.0

    monkeypatch.setitem(sharpness._SEPARATION_CHECKS, "eq2", lambda f, b: Zero())
    with pytest.raises(SeparationFailure):
        separation_scan(FamilySpec(2, 1), "eq2", 0.05, 10)


def test_locus_distance():
    fam = FamilySpec(3, 1)
    params = fam.params_from([0.5, -0.9])
    assert locus_distance(fam, "eq2", params) == pytest.approx(0.5)
    assert locus_distance(fam, "eq17", params) == pytest.approx(0.5)
    assert extremal_distance(FamilySpec(2, 1), FamilySpec(2, 1).params_from([-0.5]), 0.0) == pytest.approx(0.0, abs=1e-12)
    assert extremal_lemma1(0.5).zeros[1][0] == -0.5
