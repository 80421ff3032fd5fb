"""Empirical weak-type (1,1) measurement for truncated maximal operators.

For a maximal scan S* of an indicator 1_G, the quantity of interest is
lambda * |{S* > lambda}| / |G| over a grid of thresholds; its maximum is
the empirical weak-type constant c_emp.  Superlevel measures are grid
counts, so doubling the spatial grid is the convergence check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .combs import trig_comb, uniform_comb, walsh_comb
from .errors import ParameterError
from .grids import GridSpec, MaximalScan
from .intervals import FiniteIntervalSet, Interval, as_fraction, equal_spacing, format_ratio
from .stepfunc import StepFunction
from .trig import trig_maximal
from .walsh import walsh_maximal


@dataclass(frozen=True)
class WeakTypeReport:
    """Distribution scan of a truncated maximal function of an indicator."""

    family: str
    set_descriptor: dict
    g_measure: Fraction
    n_max: int
    grid_size: int
    lambda_grid: np.ndarray
    values: np.ndarray          # lambda * |{S* > lambda}| / |G|
    c_emp: float
    argmax_lambda: float
    alpha_emp: float | None = None
    beta_emp: float | None = None

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "set": self.set_descriptor,
            "g_measure": format_ratio(self.g_measure),
            "n_max": self.n_max,
            "grid_size": self.grid_size,
            "lambda_grid": [float(v) for v in self.lambda_grid],
            "values": [float(v) for v in self.values],
            "c_emp": self.c_emp,
            "argmax_lambda": self.argmax_lambda,
            "alpha_emp": self.alpha_emp,
            "beta_emp": self.beta_emp,
        }


def default_lambda_grid(
    g_measure: Fraction, n_max: int, s_max: float, points: int = 64
) -> np.ndarray:
    """Logarithmic threshold grid covering both weak-type regimes.

    Spans [|G|/4, 4*n_max*|G|], clipped from above to the scan maximum
    (thresholds beyond S*_max have empty superlevel sets).
    """
    if points < 2:
        raise ParameterError("lambda grid needs at least 2 points")
    g = float(g_measure)
    if g <= 0:
        raise ParameterError("set measure must be positive")
    hi = min(4.0 * n_max * g, s_max)
    lo = min(g / 4.0, hi / 2.0)
    return np.geomspace(lo, hi, points)


def distribution_scan(
    scan: MaximalScan,
    g_measure: Fraction,
    lambda_grid: Sequence[float],
    family: str = "",
    set_descriptor: dict | None = None,
    eps: Fraction | None = None,
) -> WeakTypeReport:
    """Per-threshold normalized superlevel measures and their maximum."""
    lam = np.asarray(lambda_grid, dtype=np.float64)
    if lam.size == 0:
        raise ParameterError("lambda grid must not be empty")
    if np.any(lam <= 0) or np.any(np.diff(lam) < 0):
        raise ParameterError("lambda grid must be positive and ascending")
    g = as_fraction(g_measure)
    if g <= 0:
        raise ParameterError("set measure must be positive")
    ordered = np.sort(scan.values)
    counts = ordered.size - np.searchsorted(ordered, lam, side="right")
    fractions = counts / scan.spec.size
    values = lam * fractions / float(g)
    imax = int(np.argmax(values))
    alpha = float(g / eps) if eps else None
    return WeakTypeReport(
        family=family,
        set_descriptor=set_descriptor or {},
        g_measure=g,
        n_max=scan.n_max,
        grid_size=scan.spec.size,
        lambda_grid=lam,
        values=values,
        c_emp=float(values[imax]),
        argmax_lambda=float(lam[imax]),
        alpha_emp=alpha,
        beta_emp=float(values[imax]),
    )


def _comb_for(family: str, eps: Fraction, l: int, r: int, t: int) -> tuple[FiniteIntervalSet, dict]:
    full = Interval(Fraction(0), Fraction(1))
    if family == "trig":
        comb = trig_comb(full, eps, l)
        desc = {"kind": "trig_comb", "eps": format_ratio(eps), "l": l}
    elif family == "walsh":
        comb = walsh_comb(full, r, t, l)
        desc = {"kind": "walsh_comb", "r": r, "t": t, "l": l}
    elif family == "uniform":
        comb = uniform_comb(eps, l)
        desc = {"kind": "uniform_comb", "eps": format_ratio(eps), "l": l}
    else:
        raise ParameterError(f"unknown comb family {family!r}")
    return comb, desc


def comb_scan(
    family: str,
    l: int,
    n_max: int,
    grid: GridSpec,
    eps: Fraction = Fraction(1, 8),
    r: int = 3,
    t: int = 1,
    lambda_points: int = 64,
) -> WeakTypeReport:
    """Full pipeline for one comb: build set, scan S*(1_G), measure."""
    comb, desc = _comb_for(family, as_fraction(eps), l, r, t)
    f = StepFunction.indicator(comb)
    if family == "trig":
        scan = trig_maximal(f, n_max, grid)
    else:
        scan = walsh_maximal(f, n_max, grid.level)
    lam = default_lambda_grid(comb.measure(), n_max, scan.max_value(), lambda_points)
    eps_ref = as_fraction(eps) if family != "walsh" else Fraction(1, 2**r)
    return distribution_scan(scan, comb.measure(), lam, family, desc, eps=eps_ref)


@dataclass(frozen=True)
class StabilityResult:
    reports: tuple[WeakTypeReport, ...]
    ratio: float           # max c_emp / min c_emp across the l-list
    monotone_growth: bool  # True when c_emp strictly increases along l

    def to_json(self) -> dict:
        return {
            "reports": [r.to_json() for r in self.reports],
            "ratio": self.ratio,
            "monotone_growth": self.monotone_growth,
        }


def stability_study(
    family: str,
    l_list: Sequence[int],
    n_max: int,
    grid: GridSpec,
    eps: Fraction = Fraction(1, 8),
    r: int = 3,
    t: int = 1,
    lambda_points: int = 64,
) -> StabilityResult:
    """One report per l, plus the spread of c_emp across the list."""
    if not l_list or any(b <= a for a, b in zip(l_list, l_list[1:])):
        raise ParameterError("l_list must be nonempty and ascending")
    reports = tuple(
        comb_scan(family, l, n_max, grid, eps=eps, r=r, t=t, lambda_points=lambda_points)
        for l in l_list
    )
    cs = [rep.c_emp for rep in reports]
    ratio = max(cs) / min(cs)
    monotone = all(b > a for a, b in zip(cs, cs[1:]))
    return StabilityResult(reports=reports, ratio=ratio, monotone_growth=monotone)


def _frequency_integral(g_set: FiniteIntervalSet, k: int) -> complex | Fraction:
    """Integral of e^{2 pi i k x} over the set; exact 0 when the comb's
    translate sum vanishes as a root-of-unity sum."""
    if k == 0:
        return g_set.measure()
    components = g_set.intervals
    lefts = [iv.a for iv in components]
    widths = {iv.length for iv in components}
    spacing = equal_spacing(lefts)
    if spacing is not None and len(widths) == 1:
        ratio = k * spacing
        q = ratio.denominator
        if q > 1 and len(lefts) % q == 0:
            # sum of e^{2 pi i k (t0 + j s)} over j is a full root-of-unity
            # cycle, hence exactly zero; the tooth factor cannot rescue it.
            return Fraction(0)
    total = 0j
    for iv in components:
        a, b = float(iv.a), float(iv.b)
        total += (np.exp(2j * np.pi * k * b) - np.exp(2j * np.pi * k * a)) / (2j * np.pi * k)
    return total


def weak_convergence_gap(g_set: FiniteIntervalSet, test) -> Fraction | float:
    """| |G|^-1 * integral_G(test) - integral_[0,1)(test) |.

    ``test`` is a StepFunction (exact Fraction result) or an integer
    frequency k, meaning e^{2 pi i k x} (float result; exactly 0.0 when the
    translate sum vanishes identically).
    """
    g = g_set.measure()
    if g <= 0:
        raise ParameterError("weak-convergence gap needs a set of positive measure")
    if isinstance(test, StepFunction):
        return abs(test.integral_over(g_set) / g - test.integral())
    if isinstance(test, int):
        if test == 0:
            return Fraction(0)
        val = _frequency_integral(g_set, test)
        if isinstance(val, Fraction):
            return 0.0
        return float(abs(val / float(g)))
    raise ParameterError("test must be a StepFunction or an integer frequency")


def basis_transfer_check(
    family: str,
    delta: Interval,
    n_max: int,
    grid: GridSpec,
    lambda_points: int = 64,
) -> WeakTypeReport:
    """Distribution scan for S*(1_delta) itself: the weak-type inequality
    transferred from comb sets to a basis interval."""
    f = StepFunction.indicator(delta)
    if family == "trig":
        scan = trig_maximal(f, n_max, grid)
    elif family == "walsh":
        scan = walsh_maximal(f, n_max, grid.level)
    else:
        raise ParameterError(f"unknown family {family!r}")
    measure = delta.length
    lam = default_lambda_grid(measure, n_max, scan.max_value(), lambda_points)
    desc = {"kind": "interval", "a": format_ratio(delta.a), "b": format_ratio(delta.b)}
    return distribution_scan(scan, measure, lam, family, desc)
