"""Executable sharp Schwarz-type inequalities for finite Blaschke products."""

__version__ = "0.1.0"

from .diskmap import (  # noqa: E402
    BoundaryPoint,
    DiskMapError,
    DiskPoint,
    DiskSelfMap,
    boundary_derivative,
    derivative,
    derivative_at_origin,
    eval_map,
    extremal_lemma1,
    extremal_order_k,
    leading_order,
)
from .bounds import SlackReport, Verdict  # noqa: E402

__all__ = [
    "BoundaryPoint",
    "DiskMapError",
    "DiskPoint",
    "DiskSelfMap",
    "SlackReport",
    "Verdict",
    "boundary_derivative",
    "derivative",
    "derivative_at_origin",
    "eval_map",
    "extremal_lemma1",
    "extremal_order_k",
    "leading_order",
]
