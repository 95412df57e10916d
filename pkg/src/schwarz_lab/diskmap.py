"""Finite Blaschke products as holomorphic self-maps of the unit disk.

A map is stored in factored form

    f(z) = S_c( e^{i phase} * prod_j ((z - a_j) / (1 - conj(a_j) z)) ** m_j )

where ``S_c(w) = (w + c) / (1 + conj(c) w)`` is an optional post-composed
disk automorphism.  Nothing is ever expanded into polynomial coefficients.

Evaluation helpers accept either Python complex scalars or numpy arrays;
the arithmetic is written with plain operators so both work unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
BOUNDARY_TOL = 1e-12


class DiskMapError(ValueError):
    """Raised when a map or point violates the disk invariants."""


def _as_finite_complex(value, what: str) -> complex:
    try:
        z = complex(value)
    except (TypeError, ValueError) as exc:
        raise DiskMapError(f"{what} is not a complex number: {value!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DiskMapError(f"{what} must be finite, got {z!r}")
    return z


@dataclass(frozen=True)
class DiskPoint:
    value: complex

    def __post_init__(self):
        z = _as_finite_complex(self.value, "disk point")
        if not abs(z) < 1.0:
            raise DiskMapError(f"disk point must satisfy |z| < 1, got |z| = {abs(z)!r}")
        object.__setattr__(self, "value", z)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class BoundaryPoint:
    """A point e^{i angle} on the unit circle; the angle is reduced to [0, 2pi)."""

    angle: float

    def __post_init__(self):
        theta = float(self.angle)
        if not math.isfinite(theta):
            raise DiskMapError(f"boundary angle must be finite, got {theta!r}")
        theta = math.fmod(theta, TWO_PI)
        if theta < 0.0:
            theta += TWO_PI
        if theta >= TWO_PI:
            theta = 0.0
        object.__setattr__(self, "angle", theta)

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class DiskSelfMap:
    """Finite Blaschke product with rotation phase and optional post-shift.

    ``zeros`` is a tuple of ``(zero, multiplicity)`` pairs.  Exactly equal
    zeros are merged, so ``extremal_lemma1(0)`` really is ``z**2``.
    """

    zeros: tuple
    phase: float = 0.0
    post_shift: complex | None = None

    def __post_init__(self):
        merged: dict[complex, int] = {}
        for entry in self.zeros:
            if isinstance(entry, tuple):
                a, m = entry
            else:
                a, m = entry, 1
            a = _as_finite_complex(a, "zero")
            if not abs(a) < 1.0:
                raise DiskMapError(f"zero {a!r} lies outside the open unit disk")
            if isinstance(m, bool) or int(m) != m or int(m) < 1:
                raise DiskMapError(f"multiplicity must be a positive integer, got {m!r}")
            # -0.0 and 0.0 compare equal, so the origin is always merged
            merged[a] = merged.get(a, 0) + int(m)
        if not merged:
            raise DiskMapError("a disk self-map needs at least one zero (degree >= 1)")
        phase = float(self.phase)
        if not math.isfinite(phase):
            raise DiskMapError(f"phase must be finite, got {phase!r}")
        object.__setattr__(self, "zeros", tuple(merged.items()))
        object.__setattr__(self, "phase", phase)
        if self.post_shift is not None:
            c = _as_finite_complex(self.post_shift, "post_shift")
            if not abs(c) < 1.0:
                raise DiskMapError(f"post_shift must lie in the open disk, got {c!r}")
            object.__setattr__(self, "post_shift", c)

    # -- structure -----------------------------------------------------------

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    @property
    def origin_multiplicity(self) -> int:
        for a, m in self.zeros:
            if a == 0:
                return m
        return 0

    @property
    def rotation(self) -> complex:
        return complex(math.cos(self.phase), math.sin(self.phase))

    @property
    def fixes_origin(self) -> bool:
        """True when f(0) = 0 holds by construction (no post-shift, zero at 0)."""
        return self.post_shift is None and self.origin_multiplicity > 0

    @property
    def is_rotation(self) -> bool:
        return self.fixes_origin and self.degree == 1

    @property
    def is_automorphism(self) -> bool:
        return self.degree == 1

    def inner(self) -> "DiskSelfMap":
        """The Blaschke product with the post-shift stripped."""
        if self.post_shift is None:
            return self
        return DiskSelfMap(self.zeros, self.phase, None)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "zeros": [{"re": a.real, "im": a.imag, "mult": m} for a, m in self.zeros],
            "post_shift": None
            if self.post_shift is None
            else {"re": self.post_shift.real, "im": self.post_shift.imag},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiskSelfMap":
        try:
            zeros = tuple(
                (complex(float(z["re"]), float(z["im"])), z.get("mult", 1))
                for z in data["zeros"]
            )
            shift = data.get("post_shift")
            c = None if shift is None else complex(float(shift["re"]), float(shift["im"]))
            return cls(zeros, float(data.get("phase", 0.0)), c)
        except (KeyError, TypeError) as exc:
            raise DiskMapError(f"malformed map description: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DiskSelfMap":
        return cls.from_dict(json.loads(text))

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_zeros(cls, zeros: Iterable, phase: float = 0.0, post_shift=None) -> "DiskSelfMap":
        return cls(tuple(zeros), phase, post_shift)

    @classmethod
    def rotation_map(cls, alpha: float = 0.0) -> "DiskSelfMap":
        return cls(((0j, 1),), alpha)

    @classmethod
    def power(cls, k: int, alpha: float = 0.0) -> "DiskSelfMap":
        """e^{i alpha} z^k."""
        return cls(((0j, k),), alpha)

    @classmethod
    def automorphism(cls, c: complex, alpha: float = 0.0) -> "DiskSelfMap":
        """w -> (w + c)/(1 + conj(c) w) applied to e^{i alpha} z."""
        return cls(((0j, 1),), alpha, complex(c))


# -- evaluation ----------------------------------------------------------------


def _check_domain(z):
    if isinstance(z, np.ndarray):
        if not np.all(np.isfinite(z)):
            raise DiskMapError("evaluation point must be finite")
        r = float(np.max(np.abs(z))) if z.size else 0.0
    else:
        z = _as_finite_complex(z, "evaluation point")
        r = abs(z)
    if r > 1.0 + BOUNDARY_TOL:
        raise DiskMapError(f"evaluation point outside the closed disk (|z| = {r!r})")
    return z


def _factor(a: complex, z):
    return (z - a) / (1 - a.conjugate() * z)


def _factor_derivative(a: complex, z):
    return (1 - abs(a) ** 2) / (1 - a.conjugate() * z) ** 2


def _shift(c: complex, w):
    return (w + c) / (1 + c.conjugate() * w)


def _inner_value(f: DiskSelfMap, z):
    w = f.rotation
    for a, m in f.zeros:
        w = w * _factor(a, z) ** m
    return w


def _inner_derivative(f: DiskSelfMap, z):
    # product rule over factors; stays finite at the zeros themselves
    values = [_factor(a, z) for a, _ in f.zeros]
    total = 0
    for j, (a, m) in enumerate(f.zeros):
        term = m * _factor_derivative(a, z)
        if m > 1:
            term = term * values[j] ** (m - 1)
        for i, (_, mi) in enumerate(f.zeros):
            if i != j:
                term = term * values[i] ** mi
        total = total + term
    return f.rotation * total


def eval_map(f: DiskSelfMap, z):
    """f(z) for |z| <= 1."""
    z = _check_domain(z)
    w = _inner_value(f, z)
    if f.post_shift is not None:
        w = _shift(f.post_shift, w)
    return w


def derivative(f: DiskSelfMap, z):
    """f'(z) from the closed form, chained through the post-shift."""
    z = _check_domain(z)
    d = _inner_derivative(f, z)
    if f.post_shift is not None:
        c = f.post_shift
        w = _inner_value(f, z)
        d = d * (1 - abs(c) ** 2) / (1 + c.conjugate() * w) ** 2
    return d


def leading_order(f: DiskSelfMap) -> tuple[int, complex]:
    """Order k of vanishing at 0 and the Taylor coefficient a_k.

    Maps that do not vanish at the origin by construction report
    ``(0, f(0))``.
    """
    if not f.fixes_origin:
        return 0, complex(eval_map(f, 0j))
    k = f.origin_multiplicity
    coeff = f.rotation
    for a, m in f.zeros:
        if a != 0:
            coeff = coeff * _factor(a, 0j) ** m
    return k, coeff


def derivative_at_origin(f: DiskSelfMap) -> complex:
    if f.fixes_origin:
        # read off the Taylor data so k = 1 reports share bits with a_1
        k, coeff = leading_order(f)
        return coeff if k == 1 else 0j
    return complex(derivative(f, 0j))


def boundary_derivative(f: DiskSelfMap, b: BoundaryPoint) -> complex:
    return complex(derivative(f, b.value))


def additive_boundary_speed(f: DiskSelfMap, b) -> float:
    """|B'(b)| = sum_j m_j (1 - |a_j|^2) / |b - a_j|^2 for a pure Blaschke product.

    Independent of the product-rule path; valid only without a post-shift.
    """
    if f.post_shift is not None:
        raise DiskMapError("additive boundary formula needs a pure Blaschke product")
    bv = complex(b)
    return math.fsum(m * (1 - abs(a) ** 2) / abs(bv - a) ** 2 for a, m in f.zeros)


def modulus_defect(f: DiskSelfMap, z, one_minus_abs_z_sq=None):
    """1 - |f(z)|^2 without cancellation near the boundary.

    Uses 1 - |phi_a(z)|^2 = (1 - |a|^2)(1 - |z|^2)/|1 - conj(a) z|^2 per factor
    and 1 - pq = (1 - p) + p(1 - q) across the product.  Pass
    ``one_minus_abs_z_sq`` when it is known more accurately than from z
    (e.g. z = t b with 1 - t exact).
    """
    z = _check_domain(z)
    if one_minus_abs_z_sq is None:
        one_minus_abs_z_sq = 1 - abs(z) ** 2
    p = 1.0
    d = 0.0
    for a, m in f.zeros:
        q = abs(_factor(a, z)) ** 2
        e = (1 - abs(a) ** 2) * one_minus_abs_z_sq / abs(1 - a.conjugate() * z) ** 2
        for _ in range(m):
            d = d + p * e
            p = p * q
    if f.post_shift is not None:
        c = f.post_shift
        w = _inner_value(f, z)
        d = (1 - abs(c) ** 2) * d / abs(1 + c.conjugate() * w) ** 2
    return d


# -- extremal constructors -----------------------------------------------------


def _check_a(a: float) -> float:
    a = float(a)
    if not (0.0 <= a < 1.0):
        raise DiskMapError(f"extremal parameter must lie in [0, 1), got {a!r}")
    return a


def extremal_lemma1(a: float) -> DiskSelfMap:
    """z (z + a)/(1 + a z): equality in the boundary bound at b = 1."""
    a = _check_a(a)
    return DiskSelfMap(((0j, 1), (complex(-a, 0.0), 1)))


def extremal_order_k(k: int, a: float) -> DiskSelfMap:
    """z^k (z + a)/(1 + a z)."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DiskMapError(f"order k must be an integer >= 1, got {k!r}")
    a = _check_a(a)
    return DiskSelfMap(((0j, int(k)), (complex(-a, 0.0), 1)))


def boundary_points(angles: Sequence[float]) -> list[BoundaryPoint]:
    return [BoundaryPoint(t) for t in angles]

