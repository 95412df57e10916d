"""Independent numerics used to cross-check the closed forms in diskmap.

* radial difference quotients with Richardson extrapolation
* adaptive Simpson quadrature of the boundary speed |f'(e^{i theta})|,
  giving image arc length counted with multiplicity
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .bounds import InequalityViolation, SlackReport, _require_origin_fixed, lemma1_bound
from .diskmap import TWO_PI, BoundaryPoint, DiskSelfMap, derivative, derivative_at_origin, eval_map

RADIAL_STEPS = (1e-3, 5e-4, 2.5e-4, 1.25e-4)
QUAD_TOL = 1e-10
MAX_PANELS = 2**20
# a single coarse Simpson pair can agree by accident on symmetric integrands
INITIAL_PANELS = 8
LOEWNER_TOL = 1e-8


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class ArcSpec:
    theta_start: float
    theta_end: float

    def __post_init__(self):
        length = float(self.theta_end) - float(self.theta_start)
        # (start + 2pi) - start may round a few ulps above 2pi
        slack = 8 * np.finfo(float).eps * max(abs(float(self.theta_end)), TWO_PI)
        if not (0.0 < length <= TWO_PI + slack):
            raise ValueError(f"arc length must lie in (0, 2pi], got {length!r}")

    @property
    def length(self) -> float:
        return self.theta_end - self.theta_start

    @classmethod
    def full_circle(cls, start: float = 0.0) -> "ArcSpec":
        return cls(start, start + TWO_PI)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    panels: int

    def to_dict(self) -> dict:
        return {"value": self.value, "error_estimate": self.error_estimate, "panels": self.panels}


def radial_derivative(f: DiskSelfMap, b: BoundaryPoint, steps=RADIAL_STEPS) -> complex:
    """f'(b) from one-sided radial quotients (f(b) - f(tb))/(1 - t), t = 1 - h.

    The quotient tends to b f'(b); steps must halve so the Richardson
    weights 2^j apply.
    """
    bv = b.value
    fb = complex(eval_map(f, bv))
    table = [(fb - complex(eval_map(f, (1.0 - h) * bv))) / h for h in steps]
    for level in range(1, len(table)):
        w = 2.0**level
        table = [(w * table[i + 1] - table[i]) / (w - 1.0) for i in range(len(table) - 1)]
    return table[0] / bv


def boundary_speed(f: DiskSelfMap, theta) -> np.ndarray:
    """|f'(e^{i theta})| for an array of angles."""
    return np.abs(derivative(f, np.exp(1j * np.asarray(theta, dtype=float))))


def _feature_width(f: DiskSelfMap) -> float:
    # |f'| on the circle is a sum of Poisson bumps of width ~ 1 - |a|
    widths = [1.0 - abs(z) for z, _ in f.zeros]
    if f.post_shift is not None:
        widths.append(1.0 - abs(f.post_shift))
    return max(min(widths), 1e-6)


def _initial_panels(f: DiskSelfMap, length: float) -> int:
    return max(INITIAL_PANELS, math.ceil(length / _feature_width(f)))


def image_arc_length(
    f: DiskSelfMap, arc: ArcSpec, tol: float = QUAD_TOL, max_panels: int = MAX_PANELS
) -> QuadratureResult:
    """Length of f(arc) with multiplicity, by adaptive Simpson on |f'|.

    The starting mesh resolves the narrowest bump of |f'| so that no coarse
    panel passes the test by accident.  Panels are refined level by level;
    each level is evaluated as one array call.  A panel is accepted when |S2 - S1| <= 15 tol * width / total, and
    the accepted Richardson-corrected contributions are summed with fsum,
    so the result does not depend on evaluation order.
    """
    a, b = float(arc.theta_start), float(arc.theta_end)
    total = b - a
    edges = np.linspace(a, b, _initial_panels(f, total) + 1)
    lo, hi = edges[:-1], edges[1:]
    f_lo = boundary_speed(f, lo)
    f_hi = boundary_speed(f, hi)
    f_mid = boundary_speed(f, 0.5 * (lo + hi))
    pieces: list[np.ndarray] = []
    errors: list[np.ndarray] = []
    panels = 0
    while lo.size:
        if panels + lo.size > max_panels:
            raise QuadratureError(
                f"adaptive Simpson exceeded {max_panels} panels without meeting tol {tol:g}"
            )
        mid = 0.5 * (lo + hi)
        width = hi - lo
        q1 = 0.5 * (lo + mid)
        q3 = 0.5 * (mid + hi)
        f_q = boundary_speed(f, np.concatenate([q1, q3]))
        f_q1, f_q3 = f_q[: lo.size], f_q[lo.size:]
        whole = width / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
        halves = width / 12.0 * (f_lo + 4.0 * f_q1 + 2.0 * f_mid + 4.0 * f_q3 + f_hi)
        diff = np.abs(halves - whole)
        done = diff <= 15.0 * tol * width / total
        pieces.append(halves[done] + (halves[done] - whole[done]) / 15.0)
        errors.append(diff[done] / 15.0)
        panels += int(done.sum())
        keep = ~done
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])
        f_lo_new = np.concatenate([f_lo[keep], f_mid[keep]])
        f_hi = np.concatenate([f_mid[keep], f_hi[keep]])
        f_mid = np.concatenate([f_q1[keep], f_q3[keep]])
        f_lo = f_lo_new
    value = math.fsum(np.concatenate(pieces).tolist())
    err = math.fsum(np.concatenate(errors).tolist())
    return QuadratureResult(value, err, panels)


def loewner_check(f: DiskSelfMap, arc: ArcSpec, tolerance: float = LOEWNER_TOL) -> SlackReport:
    """sigma >= 2 s/(1 + |f'(0)|), plus the weaker sigma >= s."""
    _require_origin_fixed(f, "loewner_check")
    quad = image_arc_length(f, arc)
    s = arc.length
    report = SlackReport.lower_bound(
        "eq4", lemma1_bound(abs(derivative_at_origin(f))) * s, quad.value, tolerance
    )
    if quad.value < s - tolerance:
        raise InequalityViolation(f"image arc {quad.value!r} shorter than arc {s!r}", report)
    return report


def arc_profile_csv(f: DiskSelfMap, arc: ArcSpec, samples: int = 256) -> str:
    """CSV with columns theta, |f'(e^{i theta})|, cumulative_sigma."""
    thetas = np.linspace(arc.theta_start, arc.theta_end, samples + 1)
    speeds = boundary_speed(f, thetas)
    cumulative = [0.0]
    for t0, t1 in zip(thetas[:-1], thetas[1:]):
        seg = image_arc_length(f, ArcSpec(float(t0), float(t1))).value
        cumulative.append(cumulative[-1] + seg)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["theta", "|f'(e^{i theta})|", "cumulative_sigma"])
    for t, v, c in zip(thetas, speeds, cumulative):
        writer.writerow([repr(float(t)), repr(float(v)), repr(float(c))])
    return out.getvalue()


__all__ = [
    "ArcSpec",
    "QuadratureResult",
    "QuadratureError",
    "radial_derivative",
    "boundary_speed",
    "image_arc_length",
    "loewner_check",
    "arc_profile_csv",
]
