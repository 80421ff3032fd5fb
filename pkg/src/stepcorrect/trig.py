"""Trigonometric Fourier coefficients, partial sums, and the truncated
maximal operator for step functions.

Coefficients of interval indicators have the closed form
(e^{-2 pi i k a} - e^{-2 pi i k b}) / (2 pi i k), so no quadrature is
involved.  Partial sums are symmetric, S_n = sum_{|k| <= n} c_k e^{2 pi i k x},
and grid sweeps are incremental: cost O(M * n_max) for all of S_0..S_{n_max}.

Everything here is pure; sweeps iterate in a fixed order, so outputs are
deterministic regardless of how callers parallelize over inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ParameterError, ScanError
from .grids import GridFunction, GridSpec, MaximalScan, grid_l1
from .stepfunc import StepFunction

IMAG_RESIDUE_HARD_LIMIT = 1e-8


@dataclass(frozen=True)
class TrigCoefficients:
    """Fourier coefficients c_k for |k| <= n_max, stored at index k + n_max."""

    n_max: int
    c: np.ndarray

    def __post_init__(self):
        if len(self.c) != 2 * self.n_max + 1:
            raise ValueError("coefficient array must have length 2*n_max + 1")

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.n_max:
            raise IndexError(f"|k| = {abs(k)} exceeds truncation order {self.n_max}")
        return complex(self.c[k + self.n_max])

    def scaled(self, factor: complex) -> "TrigCoefficients":
        return TrigCoefficients(self.n_max, self.c * factor)


def trig_coeffs(f: StepFunction, n_max: int) -> TrigCoefficients:
    """Exact-form Fourier coefficients of a step function, |k| <= n_max."""
    if n_max < 0:
        raise ParameterError("truncation order must be >= 0")
    c = np.zeros(2 * n_max + 1, dtype=np.complex128)
    if not f.pieces:
        return TrigCoefficients(n_max, c)
    a = np.array([float(iv.a) for iv, _ in f.pieces])
    b = np.array([float(iv.b) for iv, _ in f.pieces])
    coefs = np.array([float(coef) for _, coef in f.pieces])
    c[n_max] = float(f.integral())
    if n_max > 0:
        k = np.concatenate([np.arange(-n_max, 0), np.arange(1, n_max + 1)])
        phase_a = np.exp(-2j * np.pi * np.outer(k, a))
        phase_b = np.exp(-2j * np.pi * np.outer(k, b))
        vals = (phase_a - phase_b) @ coefs / (2j * np.pi * k)
        c[: n_max] = vals[: n_max]
        c[n_max + 1 :] = vals[n_max :]
    return TrigCoefficients(n_max, c)


def partial_sum_sweep(
    coeffs: TrigCoefficients, spec: GridSpec, n_max: int
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (n, S_n samples) for n = 0..n_max, built incrementally.

    The yielded array is a live buffer reused across iterations; callers
    must copy it if they keep a reference.
    """
    if n_max > coeffs.n_max:
        raise ParameterError(
            f"sweep order {n_max} exceeds available coefficients {coeffs.n_max}"
        )
    xs = spec.points()
    z = np.exp(2j * np.pi * xs)
    zp = np.ones_like(z)
    s = np.full(spec.size, coeffs[0], dtype=np.complex128)
    yield 0, s
    for n in range(1, n_max + 1):
        np.multiply(zp, z, out=zp)
        s += coeffs[n] * zp
        s += coeffs[-n] * np.conj(zp)
        yield n, s


def _real_with_residue(values: np.ndarray) -> tuple[np.ndarray, float]:
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if residue > IMAG_RESIDUE_HARD_LIMIT:
        raise ScanError(
            f"imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_HARD_LIMIT:.0e}; "
            "coefficient symmetry is broken"
        )
    return values.real.copy(), residue


def trig_partial_sum(
    f: StepFunction, n: int, spec: GridSpec, coeffs: TrigCoefficients | None = None
) -> GridFunction:
    """Samples of S_n(., f) on the grid (real part; residue recorded)."""
    if n < 0:
        raise ParameterError("partial sum order must be >= 0")
    if coeffs is None:
        coeffs = trig_coeffs(f, n)
    values = None
    for m, s in partial_sum_sweep(coeffs, spec, n):
        if m == n:
            values = s
    real, residue = _real_with_residue(values)
    return GridFunction(spec=spec, values=real, imag_residue=residue)


def trig_maximal(
    f: StepFunction, n_max: int, spec: GridSpec, coeffs: TrigCoefficients | None = None
) -> MaximalScan:
    """Truncated maximal function: pointwise max of |S_n| over 0 <= n <= n_max."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    if coeffs is None:
        coeffs = trig_coeffs(f, n_max)
    best = np.zeros(spec.size)
    arg = np.zeros(spec.size, dtype=np.int64)
    residue = 0.0
    for n, s in partial_sum_sweep(coeffs, spec, n_max):
        residue = max(residue, float(np.max(np.abs(s.imag))))
        mag = np.abs(s.real)
        better = mag > best
        best[better] = mag[better]
        arg[better] = n
    if residue > IMAG_RESIDUE_HARD_LIMIT:
        raise ScanError(f"imaginary residue {residue:.3e} in maximal scan")
    return MaximalScan(spec=spec, n_max=n_max, values=best, argmax_n=arg)


def partial_sum_l1_curve(
    f: StepFunction,
    n_max: int,
    spec: GridSpec,
    coeffs: TrigCoefficients | None = None,
    against: np.ndarray | None = None,
) -> np.ndarray:
    """Grid L1 norms of S_n (or of S_n - against) for n = 0..n_max."""
    if coeffs is None:
        coeffs = trig_coeffs(f, n_max)
    out = np.empty(n_max + 1)
    for n, s in partial_sum_sweep(coeffs, spec, n_max):
        if against is None:
            out[n] = grid_l1(s.real)
        else:
            out[n] = grid_l1(s.real - against)
    return out


def tail_sup_error(
    f: StepFunction,
    start: int,
    n_max: int,
    spec: GridSpec,
    coeffs: TrigCoefficients | None = None,
    against: np.ndarray | None = None,
) -> np.ndarray:
    """Pointwise sup over n in [start, n_max] of |S_n - against|."""
    if coeffs is None:
        coeffs = trig_coeffs(f, n_max)
    if against is None:
        against = f.evaluate_grid(spec.points())
    best = np.zeros(spec.size)
    for n, s in partial_sum_sweep(coeffs, spec, n_max):
        if n < start:
            continue
        np.maximum(best, np.abs(s.real - against), out=best)
    return best
