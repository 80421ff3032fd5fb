"""Walsh-Paley system: dyadic addition, Walsh functions, Dirichlet kernels,
and exact partial sums on dyadic grids.

Paley enumeration: w_n = product of Rademacher functions r_i over the set
bits i of n, with r_i(x) = (-1)^(b_{i+1}(x)) reading the binary digits
x = 0.b_1 b_2 ...  On the level-p grid x_j = j/2^p this gives
w_n(x_j) = (-1)^<n, bitrev_p(j)>, so the fast transform is a Hadamard
butterfly applied to bit-reversed samples.  All quantities are dyadic
rationals with denominator 2^p, which float64 represents exactly; the fast
path therefore agrees with direct kernel summation to the last bit for
integer-scaled data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .grids import GridFunction, GridSpec, MaximalScan, grid_l1
from .intervals import RationalLike, as_fraction, dyadic_level, is_dyadic
from .stepfunc import StepFunction


@dataclass(frozen=True)
class DyadicPoint:
    """Point num / 2^level in [0, 1)."""

    num: int
    level: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.num < 2**self.level:
            raise ValueError(f"invalid dyadic point {self.num}/2^{self.level}")

    @classmethod
    def from_fraction(cls, x: RationalLike) -> "DyadicPoint":
        x = as_fraction(x)
        if not (0 <= x < 1):
            raise ValueError(f"point {x} outside [0, 1)")
        if not is_dyadic(x):
            raise ValueError(f"{x} is not a dyadic rational")
        level = dyadic_level(x) if x else 0
        return cls(num=int(x * 2**level), level=level)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 2**self.level)

    def at_level(self, level: int) -> int:
        """Numerator after padding to the given (>=) level."""
        if level < self.level:
            raise ValueError("cannot reduce level")
        return self.num << (level - self.level)


def _coerce_point(x) -> DyadicPoint:
    if isinstance(x, DyadicPoint):
        return x
    return DyadicPoint.from_fraction(x)


def dyadic_add(x, y) -> DyadicPoint:
    """Bitwise XOR of binary expansions; the dyadic group operation."""
    x, y = _coerce_point(x), _coerce_point(y)
    level = max(x.level, y.level)
    return DyadicPoint(num=x.at_level(level) ^ y.at_level(level), level=level)


def walsh_fn(n: int, x) -> int:
    """Walsh-Paley function w_n at a dyadic point; returns +1 or -1."""
    if n < 0:
        raise ParameterError("Walsh index must be >= 0")
    pt = _coerce_point(x)
    u, p = pt.num, pt.level
    acc = 0
    i = 0
    nn = n
    while nn and i < p:
        if nn & 1:
            acc ^= (u >> (p - 1 - i)) & 1
        nn >>= 1
        i += 1
    return 1 - 2 * acc


def walsh_dirichlet(m: int, x) -> int:
    """Dirichlet kernel D_m = sum_{k=0}^{m-1} w_k at a dyadic point.

    Evaluated through the block decomposition over the set bits of m,
    using D_{2^i} = 2^i * 1_{[0, 2^-i)}; exact integer arithmetic.
    """
    if m < 1:
        raise ParameterError("Dirichlet kernel order must be >= 1")
    pt = _coerce_point(x)
    xval = pt.to_fraction()
    total = 0
    prefix = 0
    for i in range(m.bit_length() - 1, -1, -1):
        if not (m >> i) & 1:
            continue
        if xval < Fraction(1, 2**i):
            total += walsh_fn(prefix, pt) * 2**i
        prefix += 1 << i
    return total


@lru_cache(maxsize=None)
def bit_reversal(level: int) -> np.ndarray:
    """Permutation j -> bitrev_p(j) on {0, ..., 2^p - 1}."""
    n = 2**level
    rev = np.zeros(n, dtype=np.int64)
    for j in range(n):
        r = 0
        v = j
        for _ in range(level):
            r = (r << 1) | (v & 1)
            v >>= 1
        rev[j] = r
    return rev


def _hadamard_inplace(v: np.ndarray) -> np.ndarray:
    """Unnormalized Hadamard butterflies: H[k] = sum_j (-1)^<k,j> v[j]."""
    n = v.shape[0]
    h = 1
    while h < n:
        w = v.reshape(n // (2 * h), 2, h)
        x = w[:, 0, :] + w[:, 1, :]
        y = w[:, 0, :] - w[:, 1, :]
        w[:, 0, :] = x
        w[:, 1, :] = y
        h *= 2
    return v


def walsh_forward(samples: np.ndarray, level: int) -> np.ndarray:
    """Paley-ordered coefficients a_n = 2^-p sum_j w_n(x_j) v_j."""
    n = 2**level
    if samples.shape[0] != n:
        raise ParameterError("sample count must be 2^level")
    buf = np.array(samples[bit_reversal(level)], dtype=np.float64)
    _hadamard_inplace(buf)
    buf /= n
    return buf

def walsh_inverse(coeffs: np.ndarray, level: int) -> np.ndarray:
    """Samples v_j = sum_n a_n w_n(x_j) on the level-p grid."""
    n = 2**level
    if coeffs.shape[0] != n:
        raise ParameterError("coefficient count must be 2^level")
    buf = np.array(coeffs, dtype=np.float64)
    _hadamard_inplace(buf)
    return buf[bit_reversal(level)]


@dataclass(frozen=True)
class WalshSpectrum:
    """Paley-ordered Walsh coefficients of a generation-p step function."""

    level: int
    coeffs: np.ndarray

    def support(self) -> np.ndarray:
        return np.nonzero(self.coeffs)[0]


def _validate_dyadic_samples(f: StepFunction, level: int) -> np.ndarray:
    for bp in f.breakpoints():
        if not is_dyadic(bp):
            raise ParameterError(f"non-dyadic piece endpoint {bp}; Walsh paths need dyadic pieces")
        if bp != 0 and dyadic_level(bp) > level:
            raise ParameterError(
                f"piece endpoint {bp} is finer than the level-{level} grid"
            )
    return f.evaluate_grid(GridSpec.dyadic(level).points())


def walsh_spectrum(f: StepFunction, level: int) -> WalshSpectrum:
    samples = _validate_dyadic_samples(f, level)
    return WalshSpectrum(level=level, coeffs=walsh_forward(samples, level))


def walsh_partial_sum(f: StepFunction, m: int, level: int) -> GridFunction:
    """S_m(., f) on the level-p dyadic grid via the fast transform.

    Forward transform, truncate to the first m Paley coefficients, invert.
    Exact for generation-p step functions (and equal to direct kernel
    convolution against D_m).
    """
    if m < 0 or m > 2**level:
        raise ParameterError(f"partial sum order must lie in [0, 2^level], got {m}")
    samples = _validate_dyadic_samples(f, level)
    coeffs = walsh_forward(samples, level)
    coeffs[m:] = 0.0
    values = walsh_inverse(coeffs, level)
    return GridFunction(spec=GridSpec.dyadic(level), values=values)


def rademacher_rows(level: int) -> np.ndarray:
    """Rows r_i(x_j) for i < p on the level-p grid, as +-1 floats."""
    n = 2**level
    j = np.arange(n)
    rows = np.empty((level, n))
    for i in range(level):
        rows[i] = 1.0 - 2.0 * ((j >> (level - 1 - i)) & 1)
    return rows


def partial_sum_sweep(coeffs: np.ndarray, level: int, m_max: int):
    """Yield (m, S_m samples) for m = 1..m_max given Paley coefficients.

    Incremental: S_{m+1} = S_m + a_m w_m, with the Walsh row updated by
    Gray-code sign flips (w_{m xor (m+1)} is a product of leading
    Rademacher rows).  The yielded array is a live buffer.
    """
    n = 2**level
    if m_max > n:
        raise ParameterError("m_max must not exceed the grid size")
    rad = rademacher_rows(level)
    # prefix_products[k] = r_0 * ... * r_k
    prefix = np.empty_like(rad)
    if level:
        prefix[0] = rad[0]
        for i in range(1, level):
            prefix[i] = prefix[i - 1] * rad[i]
    row = np.ones(n)
    s = np.zeros(n)
    for m in range(1, m_max + 1):
        s += coeffs[m - 1] * row
        yield m, s
        if m < m_max:
            # advance row from w_{m-1} to w_m: multiply by w_{(m-1) xor m},
            # and (m-1) xor m = 2^(t+1) - 1 has Walsh function r_0 ... r_t.
            flip = ((m - 1) ^ m).bit_length() - 1
            row *= prefix[flip]


def walsh_maximal(f: StepFunction, m_max: int, level: int) -> MaximalScan:
    """Pointwise max of |S_m| over 1 <= m <= m_max on the level-p grid."""
    if m_max < 1:
        raise ParameterError("m_max must be >= 1")
    samples = _validate_dyadic_samples(f, level)
    coeffs = walsh_forward(samples, level)
    best = np.zeros(2**level)
    arg = np.zeros(2**level, dtype=np.int64)
    for m, s in partial_sum_sweep(coeffs, level, m_max):
        mag = np.abs(s)
        better = mag > best
        best[better] = mag[better]
        arg[better] = m
    return MaximalScan(spec=GridSpec.dyadic(level), n_max=m_max, values=best, argmax_n=arg)


def partial_sum_l1_curve(
    f: StepFunction,
    m_max: int,
    level: int,
    against: np.ndarray | None = None,
) -> np.ndarray:
    """Grid L1 norms of S_m (or S_m - against) for m = 0..m_max."""
    samples = _validate_dyadic_samples(f, level)
    coeffs = walsh_forward(samples, level)
    out = np.empty(m_max + 1)
    out[0] = grid_l1(against) if against is not None else 0.0
    for m, s in partial_sum_sweep(coeffs, level, m_max):
        if against is None:
            out[m] = grid_l1(s)
        else:
            out[m] = grid_l1(s - against)
    return out


def tail_sup_error(
    f: StepFunction,
    start: int,
    m_max: int,
    level: int,
    against: np.ndarray | None = None,
) -> np.ndarray:
    """Pointwise sup over m in [start, m_max] of |S_m - against|."""
    samples = _validate_dyadic_samples(f, level)
    if against is None:
        against = samples
    coeffs = walsh_forward(samples, level)
    best = np.zeros(2**level)
    for m, s in partial_sum_sweep(coeffs, level, m_max):
        if m < start:
            continue
        np.maximum(best, np.abs(s - against), out=best)
    return best
