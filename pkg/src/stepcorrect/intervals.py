"""Exact interval-set arithmetic on the unit circle [0, 1).

Sets are finite unions of half-open intervals [a, b) with rational
endpoints.  All set operations (measure, intersection, union, complement,
circle shifts, dilation preimages) are carried out in ``fractions.Fraction``
arithmetic, so results are exact; floating point enters only when a set is
sampled on a grid.  Values are immutable and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

import numpy as np

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value: RationalLike) -> Fraction:
    """Parse an exact rational from a Fraction, int, or a 'p/q' string.

    Decimal strings ('0.25') are accepted and converted exactly; floats are
    rejected so callers cannot smuggle rounded endpoints in by accident.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected exact rational, got {type(value).__name__}")


def format_ratio(q: Fraction) -> str:
    """Render a Fraction as 'p/q' ('p' when the denominator is 1)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction) -> str:
    """Render a Fraction as an exact decimal string when possible.

    Falls back to 'p/q' when the denominator has prime factors other than
    2 and 5 (no finite decimal expansion exists).  Round-trips through
    ``as_fraction`` losslessly either way.
    """
    den = q.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return format_ratio(q)
    k = max(twos, fives)
    if k == 0:
        return str(q.numerator)
    scaled = q.numerator * 10**k // q.denominator
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(k + 1, "0")
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def is_dyadic(q: Fraction) -> bool:
    den = q.denominator
    return den & (den - 1) == 0


def dyadic_level(q: Fraction) -> int:
    """Smallest p with q = k/2^p; raises for non-dyadic rationals."""
    if not is_dyadic(q):
        raise ValueError(f"{q} is not a dyadic rational")
    return q.denominator.bit_length() - 1


@dataclass(frozen=True)
class Interval:
    """Half-open interval [a, b) with 0 <= a < b <= 1."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = as_fraction(self.a), as_fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (ZERO <= a < b <= ONE):
            raise ValueError(f"invalid interval [{a}, {b})")

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    def contains(self, x: Fraction) -> bool:
        return self.a <= x < self.b

    def is_dyadic_cell(self) -> bool:
        """True for a standard dyadic cell [k/2^n, (k+1)/2^n)."""
        if not (is_dyadic(self.a) and is_dyadic(self.b)):
            return False
        length = self.length
        if length.numerator != 1 or not is_dyadic(length):
            return False
        return (self.a / length).denominator == 1

    def split(self, s: int) -> list["Interval"]:
        """Split into s equal half-open children."""
        if s < 1:
            raise ValueError("split count must be >= 1")
        d = self.length / s
        return [Interval(self.a + j * d, self.a + (j + 1) * d) for j in range(s)]

    def as_pair(self) -> tuple[str, str]:
        return (format_ratio(self.a), format_ratio(self.b))

    def __repr__(self):
        return f"[{format_ratio(self.a)}, {format_ratio(self.b)})"


def dyadic_cell(k: int, n: int) -> Interval:
    """The k-th generation-n dyadic cell [(k-1)/2^n, k/2^n), 1 <= k <= 2^n."""
    if not (0 <= n and 1 <= k <= 2**n):
        raise ValueError(f"invalid dyadic cell index k={k}, n={n}")
    return Interval(Fraction(k - 1, 2**n), Fraction(k, 2**n))


class FiniteIntervalSet:
    """Normalized finite union of half-open intervals in [0, 1).

    The canonical form is sorted, pairwise disjoint, with touching
    intervals merged, so equality of sets is equality of the
    representation.  Instances are immutable.
    """

    __slots__ = ("_intervals",)

    def __init__(self, intervals: Iterable[Interval] = ()):
        self._intervals = self._normalize(intervals)

    @staticmethod
    def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
        items = sorted(intervals, key=lambda iv: (iv.a, iv.b))
        merged: list[list[Fraction]] = []
        for iv in items:
            if merged and iv.a <= merged[-1][1]:
                if iv.b > merged[-1][1]:
                    merged[-1][1] = iv.b
            else:
                merged.append([iv.a, iv.b])
        return tuple(Interval(a, b) for a, b in merged)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[RationalLike, RationalLike]]) -> "FiniteIntervalSet":
        return cls(Interval(as_fraction(a), as_fraction(b)) for a, b in pairs)

    @classmethod
    def empty(cls) -> "FiniteIntervalSet":
        return cls(())

    @classmethod
    def unit(cls) -> "FiniteIntervalSet":
        return cls((Interval(ZERO, ONE),))

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return self._intervals

    def __bool__(self) -> bool:
        return bool(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __iter__(self):
        return iter(self._intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteIntervalSet):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self):
        body = ", ".join(repr(iv) for iv in self._intervals)
        return f"{{{body}}}"

    def measure(self) -> Fraction:
        return sum((iv.length for iv in self._intervals), ZERO)

    def contains_point(self, x: RationalLike) -> bool:
        x = as_fraction(x)
        for iv in self._intervals:
            if iv.a > x:
                return False
            if x < iv.b:
                return True
        return False

    def intersect(self, other: "FiniteIntervalSet") -> "FiniteIntervalSet":
        out = []
        i = j = 0
        a, b = self._intervals, other._intervals
        while i < len(a) and j < len(b):
            lo = max(a[i].a, b[j].a)
            hi = min(a[i].b, b[j].b)
            if lo < hi:
                out.append(Interval(lo, hi))
            if a[i].b <= b[j].b:
                i += 1
            else:
                j += 1
        return FiniteIntervalSet(out)

    def union(self, other: "FiniteIntervalSet") -> "FiniteIntervalSet":
        return FiniteIntervalSet(self._intervals + other._intervals)

    def complement(self) -> "FiniteIntervalSet":
        """Complement within [0, 1)."""
        out = []
        cursor = ZERO
        for iv in self._intervals:
            if cursor < iv.a:
                out.append(Interval(cursor, iv.a))
            cursor = iv.b
        if cursor < ONE:
            out.append(Interval(cursor, ONE))
        return FiniteIntervalSet(out)

    def difference(self, other: "FiniteIntervalSet") -> "FiniteIntervalSet":
        return self.intersect(other.complement())

    def is_subset_of(self, other: "FiniteIntervalSet") -> bool:
        return self.intersect(other) == self

    def shift(self, s: RationalLike) -> "FiniteIntervalSet":
        """Translate by s modulo 1 (exact circle shift)."""
        s = as_fraction(s) % 1
        out = []
        for iv in self._intervals:
            a, b = iv.a + s, iv.b + s
            if b <= ONE:
                out.append(Interval(a, b))
            elif a >= ONE:
                out.append(Interval(a - 1, b - 1))
            else:
                out.append(Interval(a, ONE))
                out.append(Interval(ZERO, b - 1))
        return FiniteIntervalSet(out)

    def dilate(self, n: int) -> "FiniteIntervalSet":
        """Exact preimage {x in [0,1): nx mod 1 in self}; measure-preserving."""
        if n < 1:
            raise ValueError("dilation factor must be a positive integer")
        out = []
        for iv in self._intervals:
            for j in range(n):
                out.append(Interval(Fraction(iv.a + j, n), Fraction(iv.b + j, n)))
        return FiniteIntervalSet(out)

    def boundary_array(self) -> np.ndarray:
        """Flattened endpoint array [a0, b0, a1, b1, ...] as float64."""
        flat = []
        for iv in self._intervals:
            flat.append(float(iv.a))
            flat.append(float(iv.b))
        return np.asarray(flat, dtype=np.float64)

    def indicator_on(self, xs: np.ndarray) -> np.ndarray:
        """Sample the indicator function at float points xs in [0, 1)."""
        if not self._intervals:
            return np.zeros_like(xs)
        idx = np.searchsorted(self.boundary_array(), xs, side="right")
        return (idx % 2).astype(np.float64)

    def to_json(self) -> dict:
        return {"intervals": [iv.as_pair() for iv in self._intervals]}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteIntervalSet":
        return cls.from_pairs(obj["intervals"])


def equal_spacing(points: Sequence[Fraction]) -> Fraction | None:
    """Common spacing of an arithmetic progression, or None."""
    if len(points) < 2:
        return None
    step = points[1] - points[0]
    for u, v in zip(points, points[1:]):
        if v - u != step:
            return None
    return step
