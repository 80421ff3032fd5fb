"""Step functions (finite linear combinations of interval indicators).

Coefficients are exact rationals, so L1/L2 norms, integrals, sums, and
difference loci are computed exactly.  Grid sampling converts to float64
at the last moment.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .intervals import (
    ZERO,
    ONE,
    FiniteIntervalSet,
    Interval,
    RationalLike,
    as_fraction,
    format_decimal,
    format_ratio,
    is_dyadic,
)


class StepFunction:
    """Piecewise-constant function on [0, 1) with rational coefficients.

    Pieces are kept sorted and disjoint with zero coefficients dropped;
    adjacent pieces are NOT merged, so a refinement keeps its piece list
    (the correction machinery depends on the piece count).  Instances are
    immutable; all operations return new objects.
    """

    __slots__ = ("_pieces",)

    def __init__(self, pieces: Iterable[tuple[Interval, Fraction]] = ()):
        self._pieces = self._normalize(pieces)

    @staticmethod
    def _normalize(pieces) -> tuple[tuple[Interval, Fraction], ...]:
        items = [(iv, as_fraction(c)) for iv, c in pieces if as_fraction(c) != 0]
        items.sort(key=lambda p: p[0].a)
        for (u, _), (v, _) in zip(items, items[1:]):
            if u.b > v.a:
                raise ValueError(f"overlapping pieces {u} and {v}")
        return tuple(items)

    @classmethod
    def indicator(cls, where: Interval | FiniteIntervalSet, coef: RationalLike = 1) -> "StepFunction":
        coef = as_fraction(coef)
        if isinstance(where, Interval):
            return cls([(where, coef)])
        return cls([(iv, coef) for iv in where])

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls(())

    @property
    def pieces(self) -> tuple[tuple[Interval, Fraction], ...]:
        return self._pieces

    def __bool__(self) -> bool:
        return bool(self._pieces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self._pieces == other._pieces

    def __hash__(self) -> int:
        return hash(self._pieces)

    def __repr__(self):
        body = " + ".join(f"{format_ratio(c)}*1_{iv}" for iv, c in self._pieces)
        return f"StepFunction({body or '0'})"

    def support(self) -> FiniteIntervalSet:
        return FiniteIntervalSet(iv for iv, _ in self._pieces)

    def evaluate(self, x: RationalLike) -> Fraction:
        x = as_fraction(x)
        for iv, c in self._pieces:
            if iv.a > x:
                return ZERO
            if x < iv.b:
                return c
        return ZERO

    def norm_l1(self) -> Fraction:
        return sum((abs(c) * iv.length for iv, c in self._pieces), ZERO)

    def norm_l2_sq(self) -> Fraction:
        return sum((c * c * iv.length for iv, c in self._pieces), ZERO)

    def norm_lp_p(self, p: int) -> Fraction:
        """Exact integral of |f|^p for integer p >= 1."""
        if p < 1:
            raise ValueError("p must be a positive integer")
        return sum((abs(c) ** p * iv.length for iv, c in self._pieces), ZERO)

    def integral(self) -> Fraction:
        return sum((c * iv.length for iv, c in self._pieces), ZERO)

    def integral_over(self, region: FiniteIntervalSet) -> Fraction:
        total = ZERO
        for iv, c in self._pieces:
            part = FiniteIntervalSet([iv]).intersect(region)
            total += c * part.measure()
        return total

    def scale(self, c: RationalLike) -> "StepFunction":
        c = as_fraction(c)
        return StepFunction((iv, c * coef) for iv, coef in self._pieces)

    def __neg__(self) -> "StepFunction":
        return self.scale(-1)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if not isinstance(other, StepFunction):
            return NotImplemented
        cuts = sorted(
            {ZERO, ONE}
            | {iv.a for iv, _ in self._pieces}
            | {iv.b for iv, _ in self._pieces}
            | {iv.a for iv, _ in other._pieces}
            | {iv.b for iv, _ in other._pieces}
        )
        pieces = []
        for a, b in zip(cuts, cuts[1:]):
            c = self.evaluate(a) + other.evaluate(a)
            if c != 0:
                pieces.append((Interval(a, b), c))
        return StepFunction(pieces)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (-other)

    def difference_locus(self, other: "StepFunction") -> FiniteIntervalSet:
        """Exact set {x : self(x) != other(x)}."""
        return (self - other).support()

    def shift(self, tau: RationalLike) -> "StepFunction":
        """Cyclic translate x -> f(x - tau) on the unit circle."""
        tau = as_fraction(tau) % 1
        pieces = []
        for iv, c in self._pieces:
            a, b = iv.a + tau, iv.b + tau
            if b <= ONE:
                pieces.append((Interval(a, b), c))
            elif a >= ONE:
                pieces.append((Interval(a - 1, b - 1), c))
            else:
                pieces.append((Interval(a, ONE), c))
                pieces.append((Interval(ZERO, b - 1), c))
        return StepFunction(pieces)

    def max_abs_coef(self) -> Fraction:
        return max((abs(c) for _, c in self._pieces), default=ZERO)

    def breakpoints(self) -> list[Fraction]:
        pts = sorted({iv.a for iv, _ in self._pieces} | {iv.b for iv, _ in self._pieces})
        return pts

    def is_dyadic(self) -> bool:
        return all(is_dyadic(iv.a) and is_dyadic(iv.b) for iv, _ in self._pieces)

    def evaluate_grid(self, xs: np.ndarray) -> np.ndarray:
        """Sample at float points (boundaries resolved half-open in float)."""
        if not self._pieces:
            return np.zeros_like(xs)
        bps = self.breakpoints()
        vals = [0.0] + [float(self.evaluate(a)) for a in bps[:-1]] + [0.0]
        bp_arr = np.asarray([float(b) for b in bps], dtype=np.float64)
        idx = np.searchsorted(bp_arr, xs, side="right")
        return np.asarray(vals, dtype=np.float64)[idx]

    def to_json(self) -> dict:
        return {
            "pieces": [
                {"a": format_ratio(iv.a), "b": format_ratio(iv.b), "coef": format_decimal(c)}
                for iv, c in self._pieces
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StepFunction":
        pieces = [
            (Interval(as_fraction(p["a"]), as_fraction(p["b"])), as_fraction(p["coef"]))
            for p in obj["pieces"]
        ]
        return cls(pieces)


class RationalBasis:
    """Basis of all rational subintervals; every split count is allowed."""

    name = "rational"

    def contains(self, iv: Interval) -> bool:
        return True

    def admissible_splits(self, iv: Interval):
        s = 2
        while True:
            yield s
            s += 1

    def decompose(self, iv: Interval) -> list[Interval]:
        return [iv]

    def refine(self, iv: Interval, delta: Fraction) -> list[Interval]:
        """Split into equal basis children of length < delta."""
        delta = as_fraction(delta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        if iv.length < delta:
            return [iv]
        s = int(iv.length / delta) + 1
        return iv.split(s)


class DyadicBasis:
    """Basis of dyadic cells; split counts restricted to powers of two."""

    name = "dyadic"

    def contains(self, iv: Interval) -> bool:
        return iv.is_dyadic_cell()

    def admissible_splits(self, iv: Interval):
        s = 2
        while True:
            yield s
            s *= 2

    def decompose(self, iv: Interval) -> list[Interval]:
        """Greedy split of a dyadic-endpoint interval into maximal cells."""
        if not (is_dyadic(iv.a) and is_dyadic(iv.b)):
            raise ValueError(f"{iv} has non-dyadic endpoints")
        cells = []
        a = iv.a
        while a < iv.b:
            length = Fraction(1)
            while (a / length).denominator != 1 or a + length > iv.b:
                length /= 2
            cells.append(Interval(a, a + length))
            a += length
        return cells

    def refine(self, iv: Interval, delta: Fraction) -> list[Interval]:
        delta = as_fraction(delta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        if not self.contains(iv):
            raise ValueError(f"{iv} is not a dyadic cell")
        s = 1
        while iv.length / s >= delta:
            s *= 2
        return iv.split(s) if s > 1 else [iv]


def refine_step(f: StepFunction, basis, delta: RationalLike) -> StepFunction:
    """Rewrite f so every piece belongs to the basis and is shorter
    than delta; pointwise values are unchanged."""
    delta = as_fraction(delta)
    pieces = []
    for iv, c in f.pieces:
        for cell in basis.decompose(iv):
            for child in basis.refine(cell, delta):
                pieces.append((child, c))
    return StepFunction(pieces)
