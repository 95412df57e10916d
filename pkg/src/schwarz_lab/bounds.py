"""Slack evaluators for the boundary, interior and k-th order Schwarz bounds.

Every check returns a :class:`SlackReport`.  Slack is ``measured - bound``
for lower bounds and ``bound - measured`` for upper bounds, so a check
holds exactly when ``slack >= -tolerance``.

The ``*_slacks`` helpers are array versions of the pointwise checks used by
the corpus driver; they share formulas with the scalar reports.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .diskmap import (
    BoundaryPoint,
    DiskPoint,
    DiskSelfMap,
    boundary_derivative,
    derivative,
    derivative_at_origin,
    eval_map,
    leading_order,
    modulus_defect,
)

DEFAULT_TOL = 1e-9
POINTWISE_TOL = 1e-10
UNIMODULAR_TOL = 1e-10
ORIGIN_TOL = 1e-14

EQUATION_TAGS = (
    "eq1", "eq2", "eq4", "eq6", "eq7", "eq8", "eq11", "eq15", "eq16", "eq17", "chain",
)


class PreconditionError(ValueError):
    """The map or point does not satisfy the hypotheses of the check."""


class InequalityViolation(AssertionError):
    """A consequence that must hold numerically did not."""

    def __init__(self, message: str, report: "SlackReport | None" = None):
        super().__init__(message)
        self.report = report


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    EQUALITY = "equality"


def classify(slack: float, tolerance: float) -> Verdict:
    if slack < -tolerance:
        return Verdict.VIOLATED
    if abs(slack) <= tolerance:
        return Verdict.EQUALITY
    return Verdict.HOLDS


@dataclass(frozen=True)
class SlackReport:
    equation: str
    bound: float
    measured: float
    slack: float
    tolerance: float
    verdict: Verdict
    lower: bool = field(default=True, compare=False)

    @classmethod
    def lower_bound(cls, equation, bound, measured, tolerance=DEFAULT_TOL):
        bound, measured = float(bound), float(measured)
        slack = measured - bound
        return cls(equation, bound, measured, slack, tolerance, classify(slack, tolerance), True)

    @classmethod
    def upper_bound(cls, equation, bound, measured, tolerance=DEFAULT_TOL):
        bound, measured = float(bound), float(measured)
        slack = bound - measured
        return cls(equation, bound, measured, slack, tolerance, classify(slack, tolerance), False)

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.VIOLATED

    def to_dict(self) -> dict:
        return {
            "equation": self.equation,
            "bound": self.bound,
            "measured": self.measured,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "verdict": self.verdict.value,
        }


@dataclass(frozen=True)
class SequenceProbe:
    """Radial quotients toward b.

    Each rung is checked against the pointwise chain bound at that radius;
    ``limit_bound`` = 2/(1 + |f'(0)|) only bounds the limit, and the
    quotients may approach it from below.
    """

    b: BoundaryPoint
    radii: tuple
    quotients: tuple
    rung_bounds: tuple
    limit_bound: float
    tolerance: float = DEFAULT_TOL

    @property
    def slacks(self) -> tuple:
        return tuple(q - lb for q, lb in zip(self.quotients, self.rung_bounds))

    @property
    def min_slack(self) -> float:
        return min(self.slacks)

    @property
    def holds(self) -> bool:
        return self.min_slack >= -self.tolerance


# -- preconditions ---------------------------------------------------------------


def vanishes_at_origin(f: DiskSelfMap) -> bool:
    if f.fixes_origin:
        return True
    return abs(eval_map(f, 0j)) <= ORIGIN_TOL


def _require_origin_fixed(f: DiskSelfMap, what: str):
    if not vanishes_at_origin(f):
        raise PreconditionError(
            f"{what} needs f(0) = 0; use general_boundary_bound for f(0) != 0"
        )


def _require_pure(f: DiskSelfMap, what: str):
    if f.post_shift is not None:
        raise PreconditionError(f"{what} needs a map without post_shift")
    if f.origin_multiplicity == 0:
        raise PreconditionError(f"{what} needs f(0) = 0")


def _require_unimodular(f: DiskSelfMap, b: BoundaryPoint) -> complex:
    fb = complex(eval_map(f, b.value))
    if abs(abs(fb) - 1.0) > UNIMODULAR_TOL:
        raise PreconditionError(f"|f(b)| = {abs(fb)!r} is not 1 at angle {b.angle!r}")
    return fb


def _as_disk_point(z) -> DiskPoint:
    return z if isinstance(z, DiskPoint) else DiskPoint(z)


# -- closed-form bound expressions (scalar or array) ---------------------------------


def lemma1_bound(a):
    """2/(1 + |f'(0)|)."""
    return 2 / (1 + a)


def interior_bound_value(r, a):
    return r * (r + a) / (1 + a * r)


def quotient_bound_value(r, a):
    return (r + a) / (1 + a * r)


def chain_bound_value(r, a):
    return (1 + r) / (1 + a * r)


def kth_interior_bound_value(r, k, ak):
    return r**k * (r + ak) / (1 + ak * r)


def kth_boundary_bound_value(k, ak):
    # (k - 1) + 2/(1 + |a_k|) == k + (1 - |a_k|)/(1 + |a_k|); for k = 1 this is
    # bit-identical to lemma1_bound
    return (k - 1) + 2 / (1 + ak)


def julia_bound_value(w0):
    return (1 - w0) / (1 + w0)


# -- boundary bounds ---------------------------------------------------------------


def bound_lemma1(f: DiskSelfMap, b: BoundaryPoint, tolerance: float = DEFAULT_TOL) -> SlackReport:
    """|f'(b)| >= 2/(1 + |f'(0)|) for f(0) = 0, plus the magnification corollaries."""
    _require_origin_fixed(f, "bound_lemma1")
    a = abs(derivative_at_origin(f))
    measured = abs(boundary_derivative(f, b))
    report = SlackReport.lower_bound("eq1", lemma1_bound(a), measured, tolerance)
    if measured - 1.0 < -tolerance:
        raise InequalityViolation(f"|f'(b)| = {measured!r} < 1", report)
    if not f.is_rotation and f.post_shift is None and not measured > 1.0:
        raise InequalityViolation(f"non-rotation with |f'(b)| = {measured!r} <= 1", report)
    return report


def magnification_check(f: DiskSelfMap, b: BoundaryPoint, tolerance: float = DEFAULT_TOL) -> SlackReport:
    """|f'(b)| >= 1 (tag eq2)."""
    _require_origin_fixed(f, "magnification_check")
    return SlackReport.lower_bound("eq2", 1.0, abs(boundary_derivative(f, b)), tolerance)


def is_strict_magnification(f: DiskSelfMap, b: BoundaryPoint) -> bool:
    return abs(boundary_derivative(f, b)) > 1.0


# -- interior bounds -----------------------------------------------------------------


def interior_bound(f: DiskSelfMap, z, tolerance: float = POINTWISE_TOL) -> SlackReport:
    """|f(z)| <= |z|(|z| + |f'(0)|)/(1 + |f'(0)||z|)."""
    _require_origin_fixed(f, "interior_bound")
    zv = _as_disk_point(z).value
    r, a = abs(zv), abs(derivative_at_origin(f))
    return SlackReport.upper_bound("eq6", interior_bound_value(r, a), abs(eval_map(f, zv)), tolerance)


def quotient_map_bound(f: DiskSelfMap, z, tolerance: float = POINTWISE_TOL) -> SlackReport:
    """|f(z)/z| <= (|z| + a)/(1 + a|z|), a = |f'(0)|."""
    _require_origin_fixed(f, "quotient_map_bound")
    zv = _as_disk_point(z).value
    if zv == 0:
        raise PreconditionError("quotient_map_bound is undefined at z = 0")
    r, a = abs(zv), abs(derivative_at_origin(f))
    measured = abs(eval_map(f, zv) / zv)
    return SlackReport.upper_bound("eq7", quotient_bound_value(r, a), measured, tolerance)


def schwarz_pick_disk(a: float, r: float) -> tuple[float, float]:
    """Diameter of G({|z| < r}) on the real axis, G(z) = (z + a)/(1 + a z)."""
    a, r = float(a), float(r)
    if not (0.0 <= a < 1.0):
        raise PreconditionError(f"a must lie in [0, 1), got {a!r}")
    if not (0.0 < r < 1.0):
        raise PreconditionError(f"r must lie in (0, 1), got {r!r}")
    return (a - r) / (1 - a * r), (a + r) / (1 + a * r)


def proof_chain_pointwise(f: DiskSelfMap, z, tolerance: float = POINTWISE_TOL) -> SlackReport:
    """(1 - |f(z)|)/(1 - |z|) >= (1 + |z|)/(1 + |f'(0)||z|)."""
    _require_origin_fixed(f, "proof_chain_pointwise")
    zv = complex(z.value if isinstance(z, DiskPoint) else z)
    r = abs(zv)
    if not r < 1.0:
        raise PreconditionError("proof chain needs |z| < 1")
    a = abs(derivative_at_origin(f))
    return SlackReport.lower_bound("chain", chain_bound_value(r, a), _chain_quotient(f, zv), tolerance)


def _chain_quotient(f: DiskSelfMap, z, one_minus_r=None):
    """(1 - |f(z)|)/(1 - |z|) evaluated through the cancellation-free defect."""
    r = abs(z)
    if one_minus_r is None:
        one_minus_r = 1 - r
    defect = modulus_defect(f, z, one_minus_r * (1 + r))
    return defect / (1 + abs(eval_map(f, z))) / one_minus_r


def sequence_probe(f: DiskSelfMap, b: BoundaryPoint, n: int, tolerance: float = DEFAULT_TOL) -> SequenceProbe:
    """Quotients (1 - |f(t b)|)/(1 - t) on the ladder t_j = 1 - 2^-j, j = 1..n."""
    _require_origin_fixed(f, "sequence_probe")
    if int(n) != n or n < 2:
        raise PreconditionError(f"ladder depth must be an integer >= 2, got {n!r}")
    bv = b.value
    a = abs(derivative_at_origin(f))
    steps = [math.ldexp(1.0, -j) for j in range(1, int(n) + 1)]
    radii = tuple(1.0 - h for h in steps)
    quotients = tuple(float(_chain_quotient(f, t * bv, h)) for t, h in zip(radii, steps))
    rung_bounds = tuple(chain_bound_value(t, a) for t in radii)
    return SequenceProbe(b, radii, quotients, rung_bounds, lemma1_bound(a), tolerance)


# -- general base point ----------------------------------------------------------------


def f_transform(f: DiskSelfMap) -> DiskSelfMap:
    """F = (f - f(0))/(1 - conj(f(0)) f), built by composing Moebius maps.

    With f = S_c o B, the composite T_{-f(0)} o S_c is lam * S_d for a
    unimodular lam, and lam * S_d(w) = S_{lam d}(lam w).  When B(0) = 0 the
    post-shift cancels completely; otherwise F keeps a post-shift chosen so
    that F(0) is exactly zero.
    """
    if f.fixes_origin:
        return f
    w0 = complex(eval_map(f, 0j))
    c = f.post_shift if f.post_shift is not None else 0j
    p = 1 - w0 * c.conjugate()
    lam_phase = 2 * math.atan2(p.imag, p.real)
    inner = DiskSelfMap(f.zeros, f.phase + lam_phase, None)
    if inner.origin_multiplicity > 0:
        return inner
    beta = complex(eval_map(inner, 0j))
    return DiskSelfMap(inner.zeros, inner.phase, -beta)


def f_transform_inequality(f: DiskSelfMap, b: BoundaryPoint, tolerance: float = DEFAULT_TOL) -> SlackReport:
    """|F'(b)| <= |f'(b)| (1 + |f(0)|)/(1 - |f(0)|)."""
    _require_unimodular(f, b)
    w0 = abs(eval_map(f, 0j))
    measured = abs(boundary_derivative(f_transform(f), b))
    bound = abs(boundary_derivative(f, b)) * (1 + w0) / (1 - w0)
    return SlackReport.upper_bound("eq11", bound, measured, tolerance)


def f_transform_derivative_identity(
    f: DiskSelfMap, b: BoundaryPoint, tolerance: float = POINTWISE_TOL
) -> SlackReport:
    """|F'(b)| = |f'(b)| (1 - |f(0)|^2)/|1 - conj(f(0)) f(b)|^2, as an equality report.

    The companion inequality is checked too and raises if it fails.
    """
    fb = _require_unimodular(f, b)
    w0 = complex(eval_map(f, 0j))
    measured = abs(boundary_derivative(f_transform(f), b))
    predicted = abs(boundary_derivative(f, b)) * (1 - abs(w0) ** 2) / abs(1 - w0.conjugate() * fb) ** 2
    report = SlackReport.lower_bound("eq11", predicted, measured, tolerance)
    side = f_transform_inequality(f, b)
    if not side.holds:
        raise InequalityViolation("derivative transfer inequality failed", side)
    return report


def general_boundary_bound(f: DiskSelfMap, b: BoundaryPoint, tolerance: float = DEFAULT_TOL) -> SlackReport:
    """|f'(b)| >= 2/(1 + |F'(0)|) * (1 - |f(0)|)/(1 + |f(0)|)."""
    _require_unimodular(f, b)
    w0 = 0.0 if f.fixes_origin else abs(eval_map(f, 0j))
    big_f = f_transform(f)
    bound = lemma1_bound(abs(derivative_at_origin(big_f))) * julia_bound_value(w0)
    return SlackReport.lower_bound("eq8", bound, abs(boundary_derivative(f, b)), tolerance)


def transform_derivative_at_origin(f: DiskSelfMap) -> float:
    """|F'(0)|; equals 1 exactly when F is a rotation."""
    return abs(derivative_at_origin(f_transform(f)))


def julia_type_bound(f: DiskSelfMap, b: BoundaryPoint, tolerance: float = DEFAULT_TOL) -> SlackReport:
    """|f'(b)| >= (1 - |f(0)|)/(1 + |f(0)|); dominated by the general bound."""
    _require_unimodular(f, b)
    w0 = 0.0 if f.fixes_origin else abs(eval_map(f, 0j))
    report = SlackReport.lower_bound("eq17", julia_bound_value(w0), abs(boundary_derivative(f, b)), tolerance)
    general = general_boundary_bound(f, b, tolerance)
    if report.bound > general.bound * (1 + 1e-14):
        raise InequalityViolation(
            f"julia bound {report.bound!r} exceeds general bound {general.bound!r}", report
        )
    return report


# -- k-th order ----------------------------------------------------------------------


def kth_interior_bound(f: DiskSelfMap, z, tolerance: float = POINTWISE_TOL) -> SlackReport:
    """|f(z)| <= |z|^k (|z| + |a_k|)/(1 + |a_k||z|)."""
    _require_pure(f, "kth_interior_bound")
    zv = _as_disk_point(z).value
    k, ak = leading_order(f)
    bound = kth_interior_bound_value(abs(zv), k, abs(ak))
    return SlackReport.upper_bound("eq15", bound, abs(eval_map(f, zv)), tolerance)


def kth_boundary_bound(f: DiskSelfMap, b: BoundaryPoint, tolerance: float = DEFAULT_TOL) -> SlackReport:
    """|f'(b)| >= k + (1 - |a_k|)/(1 + |a_k|)."""
    _require_pure(f, "kth_boundary_bound")
    k, ak = leading_order(f)
    bound = kth_boundary_bound_value(k, abs(ak))
    # |a_k| can exceed 1 by an ulp for pure rotations
    if bound < k - 1e-12:
        raise InequalityViolation(f"k-th order bound {bound!r} fell below k = {k}")
    return SlackReport.lower_bound("eq16", bound, abs(boundary_derivative(f, b)), tolerance)


def order_k_magnification(f: DiskSelfMap, b: BoundaryPoint, tolerance: float = DEFAULT_TOL) -> SlackReport:
    """|f'(b)| >= k, whose equality case is e^{i alpha} z^k (tag eq16)."""
    _require_pure(f, "order_k_magnification")
    k, _ = leading_order(f)
    return SlackReport.lower_bound("eq16", float(k), abs(boundary_derivative(f, b)), tolerance)


# -- array versions for corpus sweeps ------------------------------------------------------


def boundary_slacks(f: DiskSelfMap, angles, equation: str) -> np.ndarray:
    """Slacks of eq1/eq2/eq8/eq16/eq17 at every angle."""
    bv = np.exp(1j * np.asarray(angles, dtype=float))
    speed = np.abs(derivative(f, bv))
    if equation == "eq1":
        _require_origin_fixed(f, "eq1")
        return speed - lemma1_bound(abs(derivative_at_origin(f)))
    if equation == "eq2":
        _require_origin_fixed(f, "eq2")
        return speed - 1.0
    if equation == "eq16":
        _require_pure(f, "eq16")
        k, ak = leading_order(f)
        return speed - kth_boundary_bound_value(k, abs(ak))
    w0 = 0.0 if f.fixes_origin else abs(eval_map(f, 0j))
    if equation == "eq8":
        return speed - lemma1_bound(transform_derivative_at_origin(f)) * julia_bound_value(w0)
    if equation == "eq17":
        return speed - julia_bound_value(w0)
    raise ValueError(f"no boundary sweep for {equation!r}")


def interior_slacks(f: DiskSelfMap, z: np.ndarray, equation: str) -> np.ndarray:
    """Slacks of eq6/eq7/eq15/chain at every point of ``z`` (all |z| < 1)."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if equation == "eq15":
        _require_pure(f, "eq15")
        k, ak = leading_order(f)
        return kth_interior_bound_value(r, k, abs(ak)) - np.abs(eval_map(f, z))
    _require_origin_fixed(f, equation)
    a = abs(derivative_at_origin(f))
    if equation == "eq6":
        return interior_bound_value(r, a) - np.abs(eval_map(f, z))
    if equation == "eq7":
        return quotient_bound_value(r, a) - np.abs(eval_map(f, z) / z)
    if equation == "chain":
        return _chain_quotient(f, z) - chain_bound_value(r, a)
    raise ValueError(f"no interior sweep for {equation!r}")

