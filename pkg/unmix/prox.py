from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, NegativeDelta, NegativeThreshold
from .linalg import as_vector
from .types import Vector, VectorLike

__all__ = (
    "Ball",
    "soft_threshold",
    "soft_threshold_nonneg",
    "project_ball",
)

# Points within rounding of the sphere count as inside, so projection is idempotent
_BOUNDARY_RTOL: float = 1e-13


@dataclass(frozen=True)
class Ball:
    """The closed Euclidean ball `{z : ‖z − center‖₂ ≤ radius}`."""

    center: Vector
    radius: float

    def __post_init__(self) -> None:
        if not self.radius >= 0:
            raise NegativeDelta(self.radius)

        object.__setattr__(self, "center", as_vector(self.center, subject="center"))

    @classmethod
    def around(cls, center: VectorLike, radius: float, /) -> "Ball":
        return cls(np.asarray(center, dtype=np.float64), float(radius))

    def contains(self, point: Vector, /, *, rtol: float = 1e-12) -> bool:
        return bool(np.linalg.norm(point - self.center) <= self.radius * (1 + rtol))


def _check_threshold(threshold: float, /) -> None:
    if not threshold >= 0:
        raise NegativeThreshold(threshold)


def soft_threshold(
    v: Vector, threshold: float, /, *, out: Optional[Vector] = None
) -> Vector:
    """`sign(v)·max(|v| − threshold, 0)`, written into `out` when given."""
    _check_threshold(threshold)

    magnitude: Vector = np.abs(v) - threshold
    np.maximum(magnitude, 0.0, out=magnitude)

    return np.multiply(np.sign(v), magnitude, out=out)


def soft_threshold_nonneg(
    v: Vector, threshold: float, /, *, out: Optional[Vector] = None
) -> Vector:
    """`max(0, v − threshold)` componentwise."""
    _check_threshold(threshold)

    if out is None:
        out = np.empty_like(v, dtype=np.float64)

    np.subtract(v, threshold, out=out)

    return np.maximum(out, 0.0, out=out)


def project_ball(v: Vector, ball: Ball, /) -> Vector:
    if v.shape != ball.center.shape:
        raise DimensionMismatch(
            "projected point", expected=ball.center.shape, actual=v.shape
        )

    offset: Vector = v - ball.center
    distance: float = float(np.linalg.norm(offset))

    if distance <= ball.radius * (1 + _BOUNDARY_RTOL):
        return v.copy()

    return ball.center + (ball.radius / distance) * offset
