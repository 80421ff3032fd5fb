"""Uniform sampling grids on [0, 1) and grid-valued results.

Two conventions are used throughout:

* trig paths sample at x_j = offset + j/M with offset = 1/(2M) by default,
  which keeps samples away from step-function jump points;
* Walsh paths sample at the dyadic points x_j = j/2^p (offset 0), where
  generation-p step functions take exact values.

Grid L1 norms are Riemann sums: mean of |values|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .intervals import RationalLike, as_fraction, format_ratio


@dataclass(frozen=True)
class GridSpec:
    """M sample points x_j = offset + j/M, offset in [0, 1/M)."""

    size: int
    offset: Fraction

    def __post_init__(self):
        offset = as_fraction(self.offset)
        object.__setattr__(self, "offset", offset)
        if self.size < 1:
            raise ValueError("grid size must be >= 1")
        if not (0 <= offset < Fraction(1, self.size)):
            raise ValueError(f"offset must lie in [0, 1/M), got {offset}")

    @classmethod
    def trig(cls, size: int) -> "GridSpec":
        return cls(size=size, offset=Fraction(1, 2 * size))

    @classmethod
    def dyadic(cls, level: int) -> "GridSpec":
        if level < 0:
            raise ValueError("level must be >= 0")
        return cls(size=2**level, offset=Fraction(0))

    @property
    def level(self) -> int:
        """Dyadic level when the grid is 2^p points at offset 0."""
        size = self.size
        if self.offset != 0 or size & (size - 1):
            raise ValueError("not a dyadic grid")
        return size.bit_length() - 1

    def points(self) -> np.ndarray:
        return (np.arange(self.size, dtype=np.float64) + float(self.offset) * self.size) / self.size

    def to_json(self) -> dict:
        return {"size": self.size, "offset": format_ratio(self.offset)}

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec":
        return cls(size=int(obj["size"]), offset=as_fraction(obj["offset"]))


def grid_l1(values: np.ndarray) -> float:
    """Riemann-sum L1 norm of grid samples."""
    return float(np.mean(np.abs(values)))


@dataclass(frozen=True)
class GridFunction:
    """Real samples of a function on a uniform grid."""

    spec: GridSpec
    values: np.ndarray
    imag_residue: float = 0.0

    def __post_init__(self):
        if len(self.values) != self.spec.size:
            raise ValueError("sample count does not match grid size")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid samples must be finite")

    def norm_l1(self) -> float:
        return grid_l1(self.values)


@dataclass(frozen=True)
class MaximalScan:
    """Pointwise truncated maximal function sup_{n <= n_max} |S_n|."""

    spec: GridSpec
    n_max: int
    values: np.ndarray
    argmax_n: np.ndarray

    def max_value(self) -> float:
        return float(np.max(self.values))

    def superlevel_fraction(self, level: float) -> float:
        """Fraction of grid points with scan value > level."""
        return float(np.count_nonzero(self.values > level)) / self.spec.size
