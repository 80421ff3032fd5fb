"""Operator families: the partial-sum systems packaged with their interval
basis, working grid, and comb-set sources.

A family exposes the n-th partial-sum operator on step functions, the
truncated maximal operator, norm-curve sweeps used by the correction
schedule search, and comb sequences satisfying the uniform-distribution
properties (plain, and constrained to lie inside a given open set).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2

import numpy as np

from . import trig as _trig
from . import walsh as _walsh
from .combs import trig_comb, walsh_comb
from .errors import ParameterError
from .grids import GridFunction, GridSpec, MaximalScan, grid_l1
from .intervals import FiniteIntervalSet, Interval, as_fraction, format_ratio
from .stepfunc import DyadicBasis, RationalBasis, StepFunction

_UNIT = Interval(Fraction(0), Fraction(1))


class CombSequence:
    """Deterministic sequence m -> G_m of finite-interval comb sets.

    ``candidate(m)`` returns None for indices that produce no usable set
    (infeasible geometry); ``max_index`` is the last representable index,
    or None when the sequence is unbounded.
    """

    max_index: int | None = None

    def candidate(self, m: int) -> FiniteIntervalSet | None:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class TrigCombs(CombSequence):
    """G_m = centered comb with m teeth on [0,1), measure exactly eps."""

    def __init__(self, eps: Fraction):
        self.eps = as_fraction(eps)

    def candidate(self, m: int) -> FiniteIntervalSet | None:
        if m < 1:
            return None
        return trig_comb(_UNIT, self.eps, m)

    def describe(self) -> dict:
        return {"kind": "trig_comb", "eps": format_ratio(self.eps)}


class WalshCombs(CombSequence):
    """G_m = 2^m-dilation preimage of the first generation-r cell.

    r is the smallest integer with 2^-r <= eps, so measure(G_m) = 2^-r
    lies in (eps/2, eps].  Teeth live at dyadic level m + r, so the
    sequence is capped by the working grid level.
    """

    def __init__(self, eps: Fraction, grid_level: int):
        eps = as_fraction(eps)
        if not 0 < eps < 1:
            raise ParameterError("eps must lie in (0, 1)")
        self.eps = eps
        self.r = ceil(log2(1 / eps))
        if Fraction(1, 2**self.r) > eps:  # guard against float log rounding
            self.r += 1
        self.max_index = grid_level - self.r

    def candidate(self, m: int) -> FiniteIntervalSet | None:
        if m < 1 or (self.max_index is not None and m > self.max_index):
            return None
        return walsh_comb(_UNIT, self.r, 1, m)

    def describe(self) -> dict:
        return {"kind": "walsh_comb", "r": self.r, "t": 1}


class TrigCombsInside(CombSequence):
    """Combs constrained inside an open set U (finite-interval proxy).

    Feasible tooth counts are those l for which a full cyclic progression
    of l teeth fits in U: the admissible left-endpoint set
    W_l = intersection over k of (U shifted by -k/l) is computed exactly
    and teeth are anchored at its first component.  A non-dense U admits
    only finitely many such l, so the sequence cycles through them with
    tooth widths halved on every round; every candidate is a subset of U
    by construction and the sequence never terminates.
    """

    def __init__(self, u_set: FiniteIntervalSet, eps: Fraction, l_cap: int = 256):
        if not u_set:
            raise ParameterError("inside-set comb source needs a nonempty set")
        self.u_set = u_set
        self.eps = as_fraction(eps)
        self.l_cap = l_cap
        self._feasible: list[tuple[int, Fraction, Fraction]] | None = None  # (l, anchor, width)

    def _scan(self) -> list[tuple[int, Fraction, Fraction]]:
        if self._feasible is not None:
            return self._feasible
        found = []
        for l in range(1, self.l_cap + 1):
            w = self.u_set
            for k in range(1, l + 1):
                w = w.intersect(self.u_set.shift(Fraction(-k, l)))
                if not w:
                    break
            if not w:
                continue
            first = w.intervals[0]
            found.append((l, first.a, min(first.length, self.eps / l)))
        self._feasible = found
        return found

    def candidate(self, m: int) -> FiniteIntervalSet | None:
        if m < 1:
            return None
        feasible = self._scan()
        if not feasible:
            return None
        round_idx, pos = divmod(m - 1, len(feasible))
        l, anchor, width = feasible[pos]
        width = width / 2**round_idx
        base = FiniteIntervalSet([Interval(anchor, anchor + width)])
        return FiniteIntervalSet(
            iv for k in range(l) for iv in base.shift(Fraction(k, l))
        )

    def describe(self) -> dict:
        return {"kind": "trig_comb_inside", "eps": format_ratio(self.eps)}


class WalshCombsInside(CombSequence):
    """Dyadic combs dilate(cell_t^(r), 2^l) constrained inside U.

    Candidates are enumerated by total tooth level L = l + r ascending
    (l descending within a level, preferring high dilation and hence high
    spectra); t is the smallest admissible cell index.  Capped by the
    working grid level.
    """

    def __init__(self, u_set: FiniteIntervalSet, eps: Fraction, grid_level: int):
        if not u_set:
            raise ParameterError("inside-set comb source needs a nonempty set")
        self.u_set = u_set
        eps = as_fraction(eps)
        self.r_min = ceil(log2(1 / eps))
        if Fraction(1, 2**self.r_min) > eps:
            self.r_min += 1
        self.grid_level = grid_level
        self._found: list[tuple[int, int, int]] = []  # (l, r, t)
        self._w_cache: dict[int, FiniteIntervalSet] = {}
        self._enumerated = False

    def _admissible_t(self, l: int, r: int) -> int | None:
        w = self._w_cache.get(l)
        if w is None:
            w = self.u_set
            for j in range(2**l):
                w = w.intersect(self.u_set.shift(Fraction(-j, 2**l)))
                if not w:
                    break
            self._w_cache[l] = w
        scale = 2 ** (l + r)
        for iv in w.intervals:
            t = int(iv.a * scale) + 1
            while Fraction(t - 1, scale) < iv.a:
                t += 1
            if Fraction(t, scale) <= iv.b and t <= 2**r:
                return t
        return None

    def _enumerate(self):
        for total in range(self.r_min + 1, self.grid_level + 1):
            for l in range(total - self.r_min, -1, -1):
                r = total - l
                t = self._admissible_t(l, r)
                if t is not None:
                    self._found.append((l, r, t))
        self._enumerated = True
        self.max_index = len(self._found)

    def candidate(self, m: int) -> FiniteIntervalSet | None:
        if not self._enumerated:
            self._enumerate()
        if m < 1 or m > len(self._found):
            return None
        l, r, t = self._found[m - 1]
        return walsh_comb(_UNIT, r, t, l)

    def describe(self) -> dict:
        return {"kind": "walsh_comb_inside", "r_min": self.r_min}


class TrigFamily:
    """Symmetric trigonometric partial sums on a half-offset uniform grid."""

    name = "trig"

    def __init__(self, grid_size: int = 8192):
        self.basis = RationalBasis()
        self.grid = GridSpec.trig(grid_size)
        self.alpha = Fraction(1)

    def samples(self, f: StepFunction) -> np.ndarray:
        return f.evaluate_grid(self.grid.points())

    def partial_sum(self, f: StepFunction, n: int) -> GridFunction:
        return _trig.trig_partial_sum(f, n, self.grid)

    def maximal(self, f: StepFunction, n_max: int) -> MaximalScan:
        return _trig.trig_maximal(f, n_max, self.grid)

    def norm_curve(self, f: StepFunction, n_max: int, against: np.ndarray | None = None) -> np.ndarray:
        return _trig.partial_sum_l1_curve(f, n_max, self.grid, against=against)

    def schedule_sweep(self, lam: StepFunction, n_max: int, thresh: float):
        """One pass over n = 0..n_max: (||S_n||_1, ||S_n - lam||_1,
        boolean exceed matrix |S_n - lam| > thresh)."""
        coeffs = _trig.trig_coeffs(lam, n_max)
        target = self.samples(lam)
        s_norms = np.empty(n_max + 1)
        e_norms = np.empty(n_max + 1)
        exceed = np.empty((n_max + 1, self.grid.size), dtype=bool)
        for n, s in _trig.partial_sum_sweep(coeffs, self.grid, n_max):
            sr = s.real
            s_norms[n] = grid_l1(sr)
            err = np.abs(sr - target)
            e_norms[n] = float(np.mean(err))
            np.greater(err, thresh, out=exceed[n])
        return s_norms, e_norms, exceed

    def comb_sequence(self, eps: Fraction) -> CombSequence:
        return TrigCombs(eps)

    def comb_sequence_in(self, u_set: FiniteIntervalSet, eps: Fraction) -> CombSequence:
        return TrigCombsInside(u_set, eps)

    def describe(self) -> dict:
        return {"family": self.name, "grid": self.grid.to_json()}


class WalshFamily:
    """Walsh-Paley partial sums, exact on a dyadic grid."""

    name = "walsh"

    def __init__(self, level: int = 13):
        self.basis = DyadicBasis()
        self.level = level
        self.grid = GridSpec.dyadic(level)
        self.alpha = Fraction(1, 2)

    def samples(self, f: StepFunction) -> np.ndarray:
        return f.evaluate_grid(self.grid.points())

    def partial_sum(self, f: StepFunction, n: int) -> GridFunction:
        return _walsh.walsh_partial_sum(f, n, self.level)

    def maximal(self, f: StepFunction, n_max: int) -> MaximalScan:
        return _walsh.walsh_maximal(f, n_max, self.level)

    def norm_curve(self, f: StepFunction, n_max: int, against: np.ndarray | None = None) -> np.ndarray:
        return _walsh.partial_sum_l1_curve(f, n_max, self.level, against=against)

    def schedule_sweep(self, lam: StepFunction, n_max: int, thresh: float):
        samples = _walsh._validate_dyadic_samples(lam, self.level)
        coeffs = _walsh.walsh_forward(samples, self.level)
        size = 2**self.level
        s_norms = np.empty(n_max + 1)
        e_norms = np.empty(n_max + 1)
        exceed = np.empty((n_max + 1, size), dtype=bool)
        s_norms[0] = 0.0
        e_norms[0] = grid_l1(samples)
        np.greater(np.abs(samples), thresh, out=exceed[0])
        for m, s in _walsh.partial_sum_sweep(coeffs, self.level, n_max):
            s_norms[m] = grid_l1(s)
            err = np.abs(s - samples)
            e_norms[m] = float(np.mean(err))
            np.greater(err, thresh, out=exceed[m])
        return s_norms, e_norms, exceed

    def comb_sequence(self, eps: Fraction) -> CombSequence:
        return WalshCombs(eps, self.level)

    def comb_sequence_in(self, u_set: FiniteIntervalSet, eps: Fraction) -> CombSequence:
        return WalshCombsInside(u_set, eps, self.level)

    def describe(self) -> dict:
        return {"family": self.name, "level": self.level, "grid": self.grid.to_json()}


def make_family(name: str, grid_size: int = 8192, level: int = 13):
    if name == "trig":
        return TrigFamily(grid_size=grid_size)
    if name == "walsh":
        return WalshFamily(level=level)
    raise ParameterError(f"unknown operator family {name!r}")
