"""Seeded map generation and the corpus-wide property sweep.

Each sample draws from its own stream ``SeedSequence([seed, index])``, so a
map depends only on (config, index) and samples can be produced in any order
or in parallel.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds
from .bounds import POINTWISE_TOL, Verdict
from .diskmap import TWO_PI, BoundaryPoint, DiskPoint, DiskSelfMap
from .numerics import LOEWNER_TOL, ArcSpec, loewner_check

ALL_EQUATIONS = ("eq1", "eq2", "eq4", "eq6", "eq7", "eq8", "eq11", "eq15", "eq16", "eq17", "chain")
THREADS_ENV = "SCHWARZ_LAB_THREADS"

EQUATION_TOL = {
    "eq1": 1e-9,
    "eq2": 1e-9,
    "eq4": LOEWNER_TOL,
    "eq6": POINTWISE_TOL,
    "eq7": POINTWISE_TOL,
    "eq8": 1e-9,
    "eq11": POINTWISE_TOL,
    "eq15": POINTWISE_TOL,
    "eq16": 1e-9,
    "eq17": 1e-9,
    "chain": POINTWISE_TOL,
}

BOUNDARY_EQS = ("eq1", "eq2", "eq8", "eq16", "eq17")
INTERIOR_EQS = ("eq6", "eq7", "eq15", "chain")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_degree: int = 8
    zero_modulus_cap: float = 0.95
    origin_multiplicity: int = 1
    with_post_shift: bool = False
    post_shift_modulus_cap: float = 0.8
    samples: int = 100
    degree: int | None = None

    def __post_init__(self):
        if not (0.0 < self.zero_modulus_cap < 1.0):
            raise ValueError("zero_modulus_cap must lie in (0, 1)")
        if not (0.0 < self.post_shift_modulus_cap < 1.0):
            raise ValueError("post_shift_modulus_cap must lie in (0, 1)")
        if self.origin_multiplicity < 0:
            raise ValueError("origin_multiplicity must be >= 0")
        if self.samples < 0:
            raise ValueError("samples must be >= 0")
        if self.max_degree < self._min_degree():
            raise ValueError("max_degree is smaller than the forced origin multiplicity")
        if self.degree is not None and not (self._min_degree() <= self.degree <= self.max_degree):
            raise ValueError("fixed degree must lie between the origin multiplicity and max_degree")

    def _min_degree(self) -> int:
        return max(self.effective_origin_multiplicity, 1)

    @property
    def effective_origin_multiplicity(self) -> int:
        # f(0) = post_shift exactly requires B(0) = 0
        if self.with_post_shift:
            return max(self.origin_multiplicity, 1)
        return self.origin_multiplicity

    def to_dict(self) -> dict:
        return asdict(self)


def sample_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index), int(stream)]))


def _disk_uniform(rng: np.random.Generator, cap: float) -> complex:
    r = cap * math.sqrt(rng.random())
    t = TWO_PI * rng.random()
    return complex(r * math.cos(t), r * math.sin(t))


def random_map(config: GeneratorConfig, index: int) -> DiskSelfMap:
    if not (0 <= index < config.samples):
        raise IndexError(f"index {index} outside 0..{config.samples - 1}")
    rng = sample_rng(config.seed, index)
    k = config.effective_origin_multiplicity
    if config.degree is not None:
        degree = config.degree
    else:
        degree = int(rng.integers(max(k, 1), config.max_degree + 1))
    zeros = [(0j, k)] if k else []
    zeros += [(_disk_uniform(rng, config.zero_modulus_cap), 1) for _ in range(degree - k)]
    phase = TWO_PI * rng.random()
    shift = _disk_uniform(rng, config.post_shift_modulus_cap) if config.with_post_shift else None
    return DiskSelfMap(tuple(zeros), phase, shift)


# -- suite ---------------------------------------------------------------------------


@dataclass
class EquationStats:
    checks: int = 0
    violations: int = 0
    skipped: int = 0
    worst_slack: float | None = None

    def add(self, slacks: np.ndarray, tol: float) -> np.ndarray:
        slacks = np.asarray(slacks, dtype=float).ravel()
        self.checks += slacks.size
        bad = slacks < -tol
        self.violations += int(bad.sum())
        if slacks.size:
            low = float(slacks.min())
            self.worst_slack = low if self.worst_slack is None else min(self.worst_slack, low)
        return bad

    def merge(self, other: "EquationStats"):
        self.checks += other.checks
        self.violations += other.violations
        self.skipped += other.skipped
        if other.worst_slack is not None:
            self.worst_slack = (
                other.worst_slack if self.worst_slack is None else min(self.worst_slack, other.worst_slack)
            )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SuiteSummary:
    config: GeneratorConfig
    equations: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def failure_count(self) -> int:
        return sum(s.violations for s in self.equations.values())

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "equations": {eq: self.equations[eq].to_dict() for eq in sorted(self.equations)},
            "failure_count": self.failure_count,
            "failures": self.failures,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass(frozen=True)
class SweepGrid:
    boundary_points: int = 16
    radii: int = 16
    angles: int = 16
    r_min: float = 0.1
    r_max: float = 0.999

    def interior_points(self, offset: float) -> np.ndarray:
        r = np.linspace(self.r_min, self.r_max, self.radii)
        t = offset + TWO_PI * np.arange(self.angles) / self.angles
        return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


def _bundle(config, index, equation, f, inputs, report) -> dict:
    return {
        "seed": config.seed,
        "index": index,
        "config": config.to_dict(),
        "equation": equation,
        "map": f.to_dict(),
        "inputs": inputs,
        "report": report.to_dict(),
    }


def replay_bundle(bundle: dict) -> bounds.SlackReport:
    """Recompute the report stored in a failure bundle from its embedded data."""
    f = DiskSelfMap.from_dict(bundle["map"])
    eq = bundle["equation"]
    inputs = bundle["inputs"]
    tol = bundle["report"]["tolerance"]
    try:
        if eq == "eq4":
            return loewner_check(f, ArcSpec(inputs["theta_start"], inputs["theta_end"]), tol)
        if "angle" in inputs:
            return _BOUNDARY_CHECKS[eq](f, BoundaryPoint(inputs["angle"]), tol)
        z = DiskPoint(complex(inputs["re"], inputs["im"]))
        return _INTERIOR_CHECKS[eq](f, z, tol)
    except bounds.InequalityViolation as exc:
        return exc.report


_BOUNDARY_CHECKS = {
    "eq1": bounds.bound_lemma1,
    "eq2": bounds.magnification_check,
    "eq8": bounds.general_boundary_bound,
    "eq11": bounds.f_transform_derivative_identity,
    "eq16": bounds.kth_boundary_bound,
    "eq17": bounds.julia_type_bound,
}
_INTERIOR_CHECKS = {
    "eq6": bounds.interior_bound,
    "eq7": bounds.quotient_map_bound,
    "eq15": bounds.kth_interior_bound,
    "chain": bounds.proof_chain_pointwise,
}


def _failure(config, index, eq, f, inputs, tol) -> dict:
    stub = {"map": f.to_dict(), "equation": eq, "inputs": inputs, "report": {"tolerance": tol}}
    return _bundle(config, index, eq, f, inputs, replay_bundle(stub))


def _applicable(f: DiskSelfMap, eq: str) -> bool:
    if eq in ("eq15", "eq16"):
        return f.fixes_origin
    if eq in ("eq1", "eq2", "eq4", "eq6", "eq7", "chain"):
        return bounds.vanishes_at_origin(f)
    return True


def _sample_report(config: GeneratorConfig, index: int, equations, grid: SweepGrid, tolerances: dict):
    f = random_map(config, index)
    rng = sample_rng(config.seed, index, stream=1)
    angles = TWO_PI * rng.random(grid.boundary_points)
    arc_start = TWO_PI * rng.random()
    arc_len = TWO_PI * (1.0 - rng.random())
    interior_offset = TWO_PI * rng.random()
    stats: dict[str, EquationStats] = {}
    failures: list[dict] = []
    for eq in equations:
        st = stats.setdefault(eq, EquationStats())
        tol = tolerances[eq]
        if not _applicable(f, eq):
            st.skipped += 1
            continue
        if eq in BOUNDARY_EQS:
            bad = st.add(bounds.boundary_slacks(f, angles, eq), tol)
            for i in np.flatnonzero(bad):
                inputs = {"angle": BoundaryPoint(float(angles[i])).angle}
                failures.append(_failure(config, index, eq, f, inputs, tol))
        elif eq in INTERIOR_EQS:
            z = grid.interior_points(interior_offset)
            bad = st.add(bounds.interior_slacks(f, z, eq), tol)
            for i in np.flatnonzero(bad):
                inputs = {"re": float(z[i].real), "im": float(z[i].imag)}
                failures.append(_failure(config, index, eq, f, inputs, tol))
        elif eq == "eq11":
            for t in angles:
                b = BoundaryPoint(float(t))
                try:
                    report = bounds.f_transform_derivative_identity(f, b, tol)
                except bounds.InequalityViolation as exc:
                    report = exc.report
                # an identity: record -|deviation| so worst_slack is the largest miss
                st.add(np.array([-abs(report.slack)]), tol)
                if abs(report.slack) > tol:
                    failures.append(_bundle(config, index, eq, f, {"angle": b.angle}, report))
        elif eq == "eq4":
            arcs = [ArcSpec(arc_start, arc_start + arc_len), ArcSpec.full_circle(arc_start)]
            for arc in arcs:
                try:
                    report = loewner_check(f, arc, tol)
                except bounds.InequalityViolation as exc:
                    report = exc.report
                st.add(np.array([report.slack]), tol)
                if report.verdict is Verdict.VIOLATED:
                    inputs = {"theta_start": arc.theta_start, "theta_end": arc.theta_end}
                    failures.append(_bundle(config, index, eq, f, inputs, report))
        else:
            raise ValueError(f"unknown equation tag {eq!r}")
    return stats, failures


def thread_count(default: int = 1) -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def run_suite(
    config: GeneratorConfig,
    equations,
    grid: SweepGrid | None = None,
    workers: int | None = None,
    tolerance: float | None = None,
) -> SuiteSummary:
    """Sweep every selected check across the seeded corpus.

    Aggregation uses only counts and minima, and failures are ordered by
    sample index, so the summary does not depend on ``workers``.
    ``tolerance`` overrides the per-equation defaults in EQUATION_TOL.
    """
    equations = tuple(sorted(set(equations)))
    unknown = [eq for eq in equations if eq not in ALL_EQUATIONS]
    if unknown:
        raise ValueError(f"unknown equation tags: {unknown}")
    grid = grid or SweepGrid()
    tolerances = {eq: EQUATION_TOL[eq] if tolerance is None else tolerance for eq in equations}
    workers = workers or thread_count()
    summary = SuiteSummary(config, {eq: EquationStats() for eq in equations})
    indices = range(config.samples)

    def work(i):
        return _sample_report(config, i, equations, grid, tolerances)

    if workers > 1 and config.samples > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, indices))
    else:
        results = [work(i) for i in indices]
    for stats, failures in results:
        for eq, st in stats.items():
            summary.equations[eq].merge(st)
        summary.failures.extend(failures)
    return summary


__all__ = [
    "ALL_EQUATIONS",
    "GeneratorConfig",
    "SweepGrid",
    "SuiteSummary",
    "EquationStats",
    "random_map",
    "run_suite",
    "replay_bundle",
    "sample_rng",
    "thread_count",
]
