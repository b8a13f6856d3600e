"""Regions used by the estimators: axis-aligned hypercubes and euclidean balls"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from shared.errors import ConfigError


@dataclass(frozen=True)
class Hypercube:
    """Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d]"""
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ConfigError("Hypercube corners must have equal, positive dimension")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ConfigError(f"Hypercube has inverted axis: lo={self.lo}, hi={self.hi}")

    @classmethod
    def symmetric(cls, d: int, r: float) -> "Hypercube":
        return cls(tuple([-float(r)] * d), tuple([float(r)] * d))

    @classmethod
    def from_config(cls, spec: Sequence[Sequence[float]]) -> "Hypercube":
        """Build from [[lo, hi], ...] per axis"""
        try:
            return cls(tuple(float(a) for a, _ in spec), tuple(float(b) for _, b in spec))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid hypercube spec {spec!r}: {e}")

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(np.subtract(self.hi, self.lo)))

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points >= self.lo) & (points <= self.hi), axis=1)

    def scale(self, u: np.ndarray) -> np.ndarray:
        """Map unit-cube samples of shape (N, d) into the box"""
        lo = np.asarray(self.lo)
        return lo + u * (np.asarray(self.hi) - lo)


@dataclass(frozen=True)
class Ball:
    """Closed euclidean ball B(center, radius)"""
    center: Tuple[float, ...]
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ConfigError(f"Ball radius must be nonnegative, got {self.radius}")

    @classmethod
    def centered(cls, d: int, r: float) -> "Ball":
        return cls(tuple([0.0] * d), float(r))

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return ball_volume(self.dimension, self.radius)

    def enclosing_cube(self) -> Hypercube:
        c = np.asarray(self.center, dtype=float)
        return Hypercube(tuple(c - self.radius), tuple(c + self.radius))

    def contains(self, points: np.ndarray) -> np.ndarray:
        diff = np.atleast_2d(points) - np.asarray(self.center)
        return np.einsum("ij,ij->i", diff, diff) <= self.radius ** 2


def ball_volume(d: int, r: float) -> float:
    """
    Volume of a d-dimensional euclidean ball of radius r

    Examples:
        >>> round(ball_volume(2, 1.0), 6)
        3.141593
    """
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d
