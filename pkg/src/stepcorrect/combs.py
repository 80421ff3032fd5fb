"""Comb-set generators: uniformly distributed unions of small teeth.

Three constructions are provided:

* ``uniform_comb``  -- one tooth at the left edge of each cell [k/l, (k+1)/l).
* ``trig_comb``     -- teeth centered in the l equal cells of a parent
  interval; total measure is exactly eps * |parent|.
* ``walsh_comb``    -- dyadic teeth obtained by intersecting a dyadic parent
  with the dilation preimage of a generation-r cell.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParameterError
from .intervals import (
    FiniteIntervalSet,
    Interval,
    RationalLike,
    as_fraction,
    dyadic_cell,
)


def _check_eps(eps: Fraction) -> Fraction:
    eps = as_fraction(eps)
    if not (0 < eps < 1):
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    return eps


def uniform_comb(eps: RationalLike, l: int) -> FiniteIntervalSet:
    """Union of [k/l, (k+eps)/l) for k < l; measure is exactly eps."""
    eps = _check_eps(eps)
    if l < 1:
        raise ParameterError("l must be a positive integer")
    return FiniteIntervalSet(
        Interval(Fraction(k, l), Fraction(k + eps, l)) for k in range(l)
    )


def trig_comb(delta: Interval, eps: RationalLike, l: int) -> FiniteIntervalSet:
    """Centered comb in delta: l teeth of width eps*|delta|/l at cell centers."""
    eps = _check_eps(eps)
    if l < 1:
        raise ParameterError("l must be a positive integer")
    d = delta.length / l
    half = d * eps / 2
    teeth = []
    for k in range(1, l + 1):
        center = delta.a + (2 * k - 1) * d / 2
        teeth.append(Interval(center - half, center + half))
    return FiniteIntervalSet(teeth)


def walsh_comb(delta: Interval, r: int, t: int, l: int) -> FiniteIntervalSet:
    """Dyadic comb: delta intersected with the 2^l-dilation preimage of the
    t-th generation-r cell.  All endpoints are dyadic rationals."""
    if not delta.is_dyadic_cell():
        raise ParameterError(f"walsh_comb requires a dyadic parent cell, got {delta}")
    if r < 1:
        raise ParameterError("r must be a positive integer")
    if not (1 <= t <= 2**r):
        raise ParameterError(f"t must lie in [1, 2^r], got t={t}, r={r}")
    if l < 0:
        raise ParameterError("l must be a nonnegative integer")
    base = FiniteIntervalSet([dyadic_cell(t, r)])
    return FiniteIntervalSet([delta]).intersect(base.dilate(2**l))
