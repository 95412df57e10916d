"""Sharpness searches over parameterized Blaschke families.

``minimize_slack`` drives a bound's slack toward zero with multistart
Nelder-Mead over the free zeros (and optionally the phase) jointly with the
boundary angle.  ``separation_scan`` samples away from the known equality
locus and reports how far the slack stays from zero there.
``grid_scan`` is a brute-force oracle for one-free-zero families that uses
the additive boundary-derivative formula instead of the diskmap closed form.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import bounds
from .diskmap import TWO_PI, BoundaryPoint, DiskSelfMap
from .harness import sample_rng

SOUNDNESS_TOL = 1e-9
SHARPNESS_TARGET = 1e-6
DEFAULT_STARTS = 8

SEARCH_EQUATIONS = ("eq1", "eq2", "eq8", "eq16", "eq17")
SEPARATION_EQUATIONS = ("eq2", "eq16", "eq17")


class SoundnessViolation(AssertionError):
    """An evaluated slack fell below -SOUNDNESS_TOL; carries reproduction data."""

    def __init__(self, message: str, bundle: dict):
        super().__init__(message)
        self.bundle = bundle


class SeparationFailure(AssertionError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    """Blaschke products z^k * prod(free factors), optionally with free phase.

    With ``fixed_modulus`` set every free zero sits on that circle and only
    its argument is searched, one parameter per zero.
    """

    degree: int
    k: int = 1
    free_phase: bool = False
    cap: float = 0.95
    fixed_modulus: float | None = None

    def __post_init__(self):
        if self.degree < 1 or self.k < 0 or self.k > self.degree:
            raise ValueError(f"need degree >= 1 and 0 <= k <= degree, got {self.degree}, {self.k}")
        if not (0.0 < self.cap < 1.0):
            raise ValueError("cap must lie in (0, 1)")
        if self.fixed_modulus is not None and not (0.0 <= self.fixed_modulus <= self.cap):
            raise ValueError("fixed_modulus must lie in [0, cap]")

    @property
    def free_zeros(self) -> int:
        return self.degree - self.k

    @property
    def parameter_count(self) -> int:
        per_zero = 1 if self.fixed_modulus is not None else 2
        return per_zero * self.free_zeros + (1 if self.free_phase else 0)

    def zeros_from(self, params) -> list[complex]:
        zs = []
        if self.fixed_modulus is not None:
            for t in params[: self.free_zeros]:
                zs.append(self.fixed_modulus * complex(math.cos(t), math.sin(t)))
            return zs
        for j in range(self.free_zeros):
            u = complex(params[2 * j], params[2 * j + 1])
            # R^2 -> open disk of radius cap
            zs.append(self.cap * u / math.sqrt(1.0 + abs(u) ** 2))
        return zs

    def params_from(self, zeros, phase: float = 0.0) -> list[float]:
        out: list[float] = []
        for a in zeros:
            if self.fixed_modulus is not None:
                out.append(math.atan2(a.imag, a.real))
            else:
                w = a / self.cap
                u = w / math.sqrt(1.0 - abs(w) ** 2)
                out += [u.real, u.imag]
        if self.free_phase:
            out.append(phase)
        return out

    def build(self, params) -> DiskSelfMap:
        params = list(params)
        phase = params[self.parameter_count - 1] if self.free_phase else 0.0
        zeros = [(0j, self.k)] if self.k else []
        zeros += [(a, 1) for a in self.zeros_from(params)]
        return DiskSelfMap(tuple(zeros), phase)

    def draw(self, rng: np.random.Generator) -> list[float]:
        zeros = []
        for _ in range(self.free_zeros):
            if self.fixed_modulus is not None:
                r = self.fixed_modulus
            else:
                r = self.cap * math.sqrt(rng.random())
            t = TWO_PI * rng.random()
            zeros.append(complex(r * math.cos(t), r * math.sin(t)))
        phase = TWO_PI * rng.random() if self.free_phase else 0.0
        return self.params_from(zeros, phase)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SharpnessResult:
    equation_tag: str
    min_slack: float
    argmin_parameters: list
    argmin_boundary_point: BoundaryPoint
    iterations: int
    trace: list = field(default_factory=list)
    family: FamilySpec | None = None
    seed: int = 0
    budget: int = 0

    def argmin_map(self) -> DiskSelfMap:
        return self.family.build(self.argmin_parameters)

    def to_dict(self) -> dict:
        return {
            "equation": self.equation_tag,
            "min_slack": self.min_slack,
            "argmin_parameters": list(self.argmin_parameters),
            "argmin_boundary_angle": self.argmin_boundary_point.angle,
            "argmin_map": self.argmin_map().to_dict(),
            "iterations": self.iterations,
            "trace": [list(t) for t in self.trace],
            "reproduction": {
                "seed": self.seed,
                "budget": self.budget,
                "family": self.family.to_dict(),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


_CHECKS = {
    "eq1": bounds.bound_lemma1,
    "eq2": bounds.magnification_check,
    "eq8": bounds.general_boundary_bound,
    "eq16": bounds.kth_boundary_bound,
    "eq17": bounds.julia_type_bound,
}


def slack_at(family: FamilySpec, equation: str, params, theta: float) -> float:
    f = family.build(params)
    b = BoundaryPoint(theta)
    try:
        return _CHECKS[equation](f, b).slack
    except bounds.InequalityViolation as exc:
        raise SoundnessViolation(
            str(exc),
            {"equation": equation, "map": f.to_dict(), "angle": b.angle, "family": family.to_dict()},
        ) from exc


def _check_family(family: FamilySpec, equation: str):
    if equation not in _CHECKS:
        raise ValueError(f"no sharpness search for {equation!r}; choose from {SEARCH_EQUATIONS}")
    if equation in ("eq1", "eq2", "eq16") and family.k < 1:
        raise ValueError(f"{equation} needs a family with a zero at the origin (k >= 1)")


class _Objective:
    def __init__(self, family, equation, budget, offset, seed):
        self.family = family
        self.equation = equation
        self.budget = budget
        self.offset = offset
        self.seed = seed
        self.evals = 0
        self.best = math.inf
        self.best_x = None
        self.trace: list[tuple[int, float]] = []

    def __call__(self, x):
        if self.evals >= self.budget:
            # scipy may overshoot maxfev by a simplex's worth of points
            return self.best if math.isfinite(self.best) else 1e300
        self.evals += 1
        n = self.family.parameter_count
        s = slack_at(self.family, self.equation, x[:n], float(x[n]))
        if s < -SOUNDNESS_TOL:
            raise SoundnessViolation(
                f"slack {s!r} < -{SOUNDNESS_TOL:g} for {self.equation}",
                {
                    "equation": self.equation,
                    "family": self.family.to_dict(),
                    "parameters": [float(v) for v in x[:n]],
                    "angle": float(x[n]),
                    "slack": s,
                    "seed": self.seed,
                },
            )
        if s < self.best:
            self.best = s
            self.best_x = np.array(x, dtype=float)
            self.trace.append((self.offset + self.evals, s))
        return s


def _simplex(x0: np.ndarray, step: float) -> np.ndarray:
    dim = x0.size
    pts = np.repeat(x0[None, :], dim + 1, axis=0)
    pts[1:] += step * np.eye(dim)
    return pts


def _run_start(family, equation, x0, budget, offset, seed) -> _Objective:
    obj = _Objective(family, equation, budget, offset, seed)
    x = np.asarray(x0, dtype=float)
    step = 0.5
    stale = 0
    while obj.evals < budget and stale < 3:
        before = obj.best
        minimize(
            obj,
            x,
            method="Nelder-Mead",
            options={
                "initial_simplex": _simplex(x, step),
                "maxfev": budget - obj.evals,
                "xatol": 1e-12,
                "fatol": 1e-15,
            },
        )
        x = obj.best_x
        # restart with a fresh, smaller simplex around the incumbent
        stale = stale + 1 if not before - obj.best > 1e-15 else 0
        step = max(step * 0.5, 1e-4)
        if obj.best == 0.0:
            break
    return obj


def minimize_slack(
    family: FamilySpec,
    equation_tag: str,
    budget: int,
    seed: int = 0,
    starts: int = DEFAULT_STARTS,
) -> SharpnessResult:
    """Multistart downhill simplex over (family parameters, boundary angle).

    The budget counts slack evaluations and is split evenly across starts.
    Starts run in index order; the best start wins, ties to the lowest index.
    """
    _check_family(family, equation_tag)
    if budget < 100:
        raise ValueError("budget must be at least 100 evaluations")
    per_start = budget // starts
    results = []
    for s in range(starts):
        rng = sample_rng(seed, s, stream=2)
        x0 = np.array(family.draw(rng) + [TWO_PI * rng.random()], dtype=float)
        results.append(_run_start(family, equation_tag, x0, per_start, s * per_start, seed))

    best_index = min(range(starts), key=lambda i: (results[i].best, i))
    best = results[best_index]
    trace: list[tuple[int, float]] = []
    running = math.inf
    for obj in results:
        for it, val in obj.trace:
            if val < running:
                running = val
                trace.append((it, val))
    n = family.parameter_count
    return SharpnessResult(
        equation_tag=equation_tag,
        min_slack=float(best.best),
        argmin_parameters=[float(v) for v in best.best_x[:n]],
        argmin_boundary_point=BoundaryPoint(float(best.best_x[n])),
        iterations=sum(obj.evals for obj in results),
        trace=trace,
        family=family,
        seed=seed,
        budget=budget,
    )


def extremal_distance(family: FamilySpec, params, theta: float) -> float:
    """Distance to the extremal configuration, after rotating b to 1.

    The extremal maps have every free zero on the negative real axis once
    b is moved to 1 (z (z + a)/(1 + a z) and its z^k analogue); the global
    phase is irrelevant to every bound, so it is not compared.
    """
    turn = complex(math.cos(theta), -math.sin(theta))
    zs = family.zeros_from(list(params))
    if not zs:
        return 0.0
    return max(abs(a * turn + abs(a)) for a in zs)


def locus_distance(family: FamilySpec, equation: str, params) -> float:
    """Distance in zero moduli from the equality locus of eq2/eq16/eq17.

    eq2 and eq16 (in its |f'(b)| >= k form) are attained only by e^{ia} z^k,
    reached as every free zero moves to the circle.  eq17 is attained by
    automorphisms: all zeros but one on the circle.
    """
    moduli = sorted(abs(a) for a in family.zeros_from(list(params)))
    if equation in ("eq2", "eq16"):
        return max((1.0 - r for r in moduli), default=0.0)
    if equation == "eq17":
        all_moduli = sorted([0.0] * family.k + moduli)
        return max((1.0 - r for r in all_moduli[1:]), default=0.0)
    raise ValueError(f"no equality locus defined for {equation!r}")


_SEPARATION_CHECKS = {
    "eq2": bounds.magnification_check,
    "eq16": bounds.order_k_magnification,
    "eq17": bounds.julia_type_bound,
}


def separation_scan(
    family: FamilySpec,
    equation_tag: str,
    exclusion_radius: float,
    samples: int,
    seed: int = 0,
    max_tries: int = 1000,
) -> float:
    """Minimum slack over seeded draws at least ``exclusion_radius`` from the locus.

    With a positive radius the minimum must be strictly positive; radius 0
    includes the equality locus itself and makes no positivity claim.
    """
    if equation_tag not in _SEPARATION_CHECKS:
        raise ValueError(f"separation scan supports {SEPARATION_EQUATIONS}, got {equation_tag!r}")
    if exclusion_radius < 0:
        raise ValueError("exclusion_radius must be >= 0")
    check = _SEPARATION_CHECKS[equation_tag]
    worst = math.inf
    for i in range(samples):
        rng = sample_rng(seed, i, stream=3)
        for _ in range(max_tries):
            params = family.draw(rng)
            if locus_distance(family, equation_tag, params) >= exclusion_radius:
                break
        else:
            raise ValueError(f"no draw cleared exclusion radius {exclusion_radius} in {max_tries} tries")
        theta = TWO_PI * rng.random()
        f = family.build(params)
        slack = check(f, BoundaryPoint(theta)).slack
        if slack < -SOUNDNESS_TOL:
            raise SoundnessViolation(
                f"slack {slack!r} for {equation_tag}",
                {"equation": equation_tag, "map": f.to_dict(), "angle": theta, "seed": seed, "index": i},
            )
        worst = min(worst, slack)
    if exclusion_radius > 0 and samples and not worst > 0:
        raise SeparationFailure(f"minimum slack {worst!r} is not positive off the equality locus")
    return worst


def grid_scan(
    family: FamilySpec, equation_tag: str, resolution: float = 1e-3
) -> tuple[float, float, float]:
    """Brute-force minimum slack for a family with one free zero.

    Rotational invariance lets b = 1; the free zero rho e^{i psi} is scanned
    on a grid of the given resolution in rho and psi (psi = pi included).
    |f'(1)| comes from the additive formula k + (1 - rho^2)/|1 - a|^2.
    Returns (min_slack, rho, psi).
    """
    if family.free_zeros != 1:
        raise ValueError("grid_scan handles families with exactly one free zero")
    if family.fixed_modulus is not None:
        rho = np.array([family.fixed_modulus])
    else:
        rho = np.arange(0.0, family.cap + resolution / 2, resolution)
    n = int(math.ceil(math.pi / resolution))
    psi = math.pi + resolution * np.arange(-n, n + 1)
    a = rho[:, None] * np.exp(1j * psi)[None, :]
    k = family.k
    r = np.broadcast_to(rho[:, None], a.shape)
    speed = k + (1.0 - r**2) / np.abs(1.0 - a) ** 2
    if equation_tag == "eq1":
        if k != 1:
            raise ValueError("eq1 grid scan needs k = 1")
        slack = speed - 2.0 / (1.0 + r)
    elif equation_tag == "eq16":
        # |a_k| = rho for z^k (z - a)/(1 - conj(a) z)
        slack = speed - (k + (1.0 - r) / (1.0 + r))
    elif equation_tag == "eq2":
        slack = speed - 1.0
    else:
        raise ValueError(f"no grid scan for {equation_tag!r}")
    i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
    return float(slack[i, j]), float(rho[i]), float(psi[j])
