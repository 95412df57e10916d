"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line with the observed figure so the
run log doubles as the acceptance report.
"""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from schwarz_lab import bounds
from schwarz_lab.diskmap import (
    BoundaryPoint,
    DiskSelfMap,
    boundary_derivative,
    derivative_at_origin,
    extremal_lemma1,
    extremal_order_k,
)
from schwarz_lab.harness import ALL_EQUATIONS, GeneratorConfig, SweepGrid, random_map, run_suite, sample_rng
from schwarz_lab.numerics import ArcSpec, image_arc_length, radial_derivative
from schwarz_lab.sharpness import FamilySpec, extremal_distance, grid_scan, minimize_slack, separation_scan

pytestmark = pytest.mark.acceptance

TWO_PI = 2 * math.pi
B1 = BoundaryPoint(0.0)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
        assert ok, detail

    return emit


def test_c01_boundary_bound_soundness(verdict):
    s = run_suite(GeneratorConfig(seed=1, samples=10_000), {"eq1"})
    st = s.equations["eq1"]
    ok = s.failure_count == 0 and st.checks == 160_000
    verdict(1, "boundary bound soundness, 10k maps x 16 points", ok,
            f"violations={st.violations} checks={st.checks} worst_slack={st.worst_slack:.3e}")


def test_c02_boundary_bound_sharpness(verdict):
    gaps = [abs(bounds.bound_lemma1(extremal_lemma1(a / 10), B1).slack) for a in range(10)]
    fam = FamilySpec(2, 1)
    oracle, rho, psi = grid_scan(fam, "eq1", 1e-3)
    res = minimize_slack(fam, "eq1", 5000, seed=0)
    dist = extremal_distance(fam, res.argmin_parameters, res.argmin_boundary_point.angle)
    ok = max(gaps) <= 1e-10 and oracle <= 1e-6 and res.min_slack <= 1e-6 and dist <= 1e-3
    verdict(2, "extremal equality and optimizer sharpness", ok,
            f"max|slack| extremal={max(gaps):.1e} grid={oracle:.1e} optimizer={res.min_slack:.1e} "
            f"distance={dist:.1e}")


def test_c03_interior_pointwise(verdict):
    s = run_suite(GeneratorConfig(seed=3, samples=1000), {"eq6", "eq7"}, SweepGrid(radii=64, angles=64))
    equal = 0.0
    for a in np.linspace(0.0, 0.9, 10):
        f = extremal_lemma1(float(a))
        for r in np.linspace(0.01, 0.999, 64):
            equal = max(equal, abs(bounds.interior_bound(f, float(r)).slack),
                        abs(bounds.quotient_map_bound(f, float(r)).slack))
    checks = s.equations["eq6"].checks + s.equations["eq7"].checks
    ok = s.failure_count == 0 and checks == 2 * 1000 * 4096 and equal <= 1e-12
    verdict(3, "interior and quotient bounds on 64x64 grids", ok,
            f"violations={s.failure_count} checks={checks} positive-axis equality gap={equal:.1e}")


def test_c04_proof_chain(verdict):
    cfg = GeneratorConfig(seed=4, samples=1000)
    s = run_suite(cfg, {"chain"}, SweepGrid(radii=64, angles=64))
    gap = 0.0
    for i in range(cfg.samples):
        f = random_map(cfg, i)
        b = BoundaryPoint(TWO_PI * sample_rng(4, i, stream=1).random())
        rep = bounds.proof_chain_pointwise(f, 0.999 * b.value)
        gap = max(gap, abs(rep.bound - bounds.lemma1_bound(abs(derivative_at_origin(f)))))
    ok = s.failure_count == 0 and gap <= 1e-3
    verdict(4, "proof chain on 64x64 grids, r=0.999 near the limit bound", ok,
            f"violations={s.failure_count} worst_slack={s.equations['chain'].worst_slack:.1e} "
            f"max gap at r=0.999={gap:.6e}")


def test_c05_loewner(verdict):
    ratio = image_arc_length(DiskSelfMap.power(2), ArcSpec.full_circle()).value / TWO_PI
    cfg = GeneratorConfig(seed=5, samples=500)
    s = run_suite(cfg, {"eq4"})
    wind = 0.0
    for i in range(cfg.samples):
        f = random_map(cfg, i)
        wind = max(wind, abs(image_arc_length(f, ArcSpec.full_circle()).value - TWO_PI * f.degree))
    ok = abs(ratio - 2) <= 1e-10 and s.failure_count == 0 and wind <= 1e-8
    verdict(5, "arc-length bound", ok,
            f"z^2 ratio error={abs(ratio - 2):.1e} violations={s.failure_count} winding error={wind:.1e}")


def test_c06_general_base_point(verdict):
    s = run_suite(GeneratorConfig(seed=6, samples=2000, with_post_shift=True), {"eq11", "eq8", "eq17"})
    identity = -s.equations["eq11"].worst_slack
    auto = 0.0
    for c in (0.1, 0.5, 0.3 - 0.4j, -0.79j, 0.9 * np.exp(2j)):
        for alpha in (0.0, 1.7):
            f = DiskSelfMap.automorphism(complex(c), alpha)
            # |f'| is smallest where the rotated boundary point meets c
            b = BoundaryPoint(math.remainder(np.angle(c) - alpha, TWO_PI))
            auto = max(auto, abs(bounds.julia_type_bound(f, b).slack))
    ok = s.failure_count == 0 and identity <= 1e-10 and auto <= 1e-10
    verdict(6, "transform identity, general and Julia-type chains", ok,
            f"identity deviation={identity:.1e} violations={s.failure_count} automorphism gap={auto:.1e}")


def test_c07_kth_order(verdict):
    eq_gap = 0.0
    for k in (1, 2, 3):
        for a in (0.0, 0.5, 0.9):
            eq_gap = max(eq_gap, abs(bounds.kth_boundary_bound(extremal_order_k(k, a), B1).slack))
    identical = True
    cfg1 = GeneratorConfig(seed=70, samples=500)
    for i in range(cfg1.samples):
        f = random_map(cfg1, i)
        b = BoundaryPoint(0.01 * i)
        identical &= bounds.kth_boundary_bound(f, b).bound == bounds.bound_lemma1(f, b).bound
    violations = 0
    for k in (2, 3):
        s = run_suite(GeneratorConfig(seed=7, samples=2000, origin_multiplicity=k), {"eq15", "eq16"})
        violations += s.failure_count
    ok = eq_gap <= 1e-10 and identical and violations == 0
    verdict(7, "order-k bounds", ok,
            f"extremal gap={eq_gap:.1e} k=1 identical={identical} violations={violations}")


def test_c08_strictness(verdict):
    eq2 = separation_scan(FamilySpec(2, 1, cap=0.95), "eq2", 0.05, 10_000, seed=8)
    eq16 = separation_scan(FamilySpec(3, 2, cap=0.95), "eq16", 0.1, 10_000, seed=8)
    ok = eq2 >= 0.02 and eq16 > 0 and eq16 >= (1 - 0.9) / (1 + 0.9) - 1e-9
    verdict(8, "strictness floors off the equality locus", ok,
            f"eq2 floor={eq2:.4f} order-k floor={eq16:.4f} over 10k samples each")


def test_c09_cross_validation(verdict):
    cfg = GeneratorConfig(seed=9, samples=1000, origin_multiplicity=0)
    radial = 0.0
    for i in range(cfg.samples):
        f = random_map(cfg, i)
        b = BoundaryPoint(TWO_PI * sample_rng(9, i, stream=1).random())
        radial = max(radial, abs(radial_derivative(f, b) - boundary_derivative(f, b)))
    cfg = GeneratorConfig(seed=90, samples=200)
    grid = SweepGrid(radii=16, angles=16).interior_points(0.25)
    dual = 0.0
    for i in range(cfg.samples):
        f = random_map(cfg, i)
        inner = bounds.interior_slacks(f, grid, "eq6")
        quot = bounds.interior_slacks(f, grid, "eq7")
        dual = max(dual, float(np.max(np.abs(inner - np.abs(grid) * quot))))
    ok = radial <= 1e-6 and dual <= 1e-12
    verdict(9, "radial vs closed-form derivative, interior vs quotient", ok,
            f"radial error={radial:.1e} interior/quotient gap={dual:.1e}")


def _verify_payload(tmp_path, threads):
    out = tmp_path / f"verify-{threads}.json"
    env = dict(os.environ, SCHWARZ_LAB_THREADS=str(threads))
    proc = subprocess.run(
        [sys.executable, "-m", "schwarz_lab", "verify", "--seed", "7", "--samples", "1000",
         "--eq", "all", "--out", str(out)],
        env=env, capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return json.dumps(json.loads(out.read_text())["payload"], sort_keys=True, indent=2)


def test_c10_determinism(verdict, tmp_path):
    one = _verify_payload(tmp_path, 1)
    four = _verify_payload(tmp_path, 4)
    ok = one == four and set(json.loads(one)["equations"]) == set(ALL_EQUATIONS)
    verdict(10, "verify payload identical across thread counts", ok,
            f"payload bytes={len(one)} identical={one == four}")
