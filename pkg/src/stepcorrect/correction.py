"""Small-set correction of step functions.

Given a step function f and an operator family, the constructor replaces
each piece a_k 1_{Delta_k} by the zero-mean piece

    lambda_m^(k) = a_k (1_{Delta_k} - |Delta_k| 1_{G_m^(k)} / |G_m^(k)|),

where G_m^(k) is a comb set intersected with Delta_k.  A greedy inductive
search chooses comb indices m_1 < ... < m_l and verification thresholds
N_1 < ... < N_l so that, on the truncated range [1, n_max]:

  (low)  ||S_n(lambda_{m_j})||_1 < xi / N_{j-1}   for n <= N_{j-1},
  (conv) ||S_n(lambda_{m_j}) - lambda_{m_j}||_1 < xi   for N_j <= n <= n_max,
  (tail) |{ sup_{n >= N_j} |S_n(lambda) - lambda| > eta/(4l) }| < xi.

All three margins are measured and stored per stage.  (low) and (conv)
gate the search; (tail) is recorded and can additionally gate it via
``gate_tail=True`` (it belongs to the pointwise-maximal-function half of
the construction, which the result reports as a weak-type scan either
way).  Exact invariants -- zero-mean pieces, {g != f} equal to the union
of the chosen comb pieces, ||g||_1 <= 2 ||f||_1 -- are verified in
rational arithmetic on every run.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ParameterError, ScanError, ScheduleSearchError, StepCorrectError
from .intervals import ZERO, FiniteIntervalSet, Interval, as_fraction, format_ratio
from .stepfunc import StepFunction, refine_step
from .weaktype import WeakTypeReport, distribution_scan


@dataclass(frozen=True)
class CorrectionConfig:
    """Tunable knobs for the correction constructor.

    ``xi`` defaults to max(||f||_1 / (2 l^2), xi_floor_factor * 2 * max_k
    |a_k| |Delta_k|): the first term is the proof-shaped slack, the floor
    keeps the truncated search feasible at desk scale (see README).
    """

    n_max: int = 512
    m_cap: int = 4096
    xi: float | None = None
    xi_floor_factor: float = 2.0
    gate_tail: bool = False
    delta: Fraction | None = None
    enforce_l2_delta: bool = False
    eps_inside: Fraction = Fraction(1, 8)
    weak_type_points: int = 32


@dataclass(frozen=True)
class CorrectionPiece:
    """One zero-mean replacement piece and its exact bookkeeping."""

    index: int
    coef: Fraction
    interval: Interval
    comb_index: int
    g_set: FiniteIntervalSet
    lam: StepFunction
    g_measure: Fraction
    sandwich_low: Fraction | None
    sandwich_high: Fraction
    l2_norm_sq: Fraction

    def zero_mean(self) -> bool:
        return self.lam.integral() == 0


class PieceCandidates:
    """Lazy sequence m -> candidate piece for one interval of f."""

    def __init__(self, index, interval, coef, combs, eps, alpha, require_lower):
        self.index = index
        self.interval = interval
        self.coef = as_fraction(coef)
        self.combs = combs
        self.eps = as_fraction(eps)
        self.alpha = alpha
        self.require_lower = require_lower
        self._cache: dict[int, CorrectionPiece | None] = {}

    def candidate(self, m: int) -> CorrectionPiece | None:
        if m in self._cache:
            return self._cache[m]
        piece = self._build(m)
        self._cache[m] = piece
        return piece

    def _build(self, m: int) -> CorrectionPiece | None:
        comb = self.combs.candidate(m)
        if comb is None:
            return None
        g = FiniteIntervalSet([self.interval]).intersect(comb)
        gm = g.measure()
        if gm == 0:
            return None
        length = self.interval.length
        high = self.eps * length
        low = self.alpha * self.eps / 4 * length if self.require_lower else None
        if gm > high or (low is not None and gm < low):
            return None
        scale = self.coef * (1 - length / gm)
        rest = FiniteIntervalSet([self.interval]).difference(g)
        lam = StepFunction(
            [(iv, self.coef) for iv in rest] + [(iv, scale) for iv in g]
        )
        return CorrectionPiece(
            index=self.index,
            coef=self.coef,
            interval=self.interval,
            comb_index=m,
            g_set=g,
            lam=lam,
            g_measure=gm,
            sandwich_low=low,
            sandwich_high=high,
            l2_norm_sq=lam.norm_l2_sq(),
        )

    def exhausted_beyond(self, m: int) -> bool:
        cap = self.combs.max_index
        return cap is not None and m >= cap


def l2_delta_bound(f: StepFunction, alpha: Fraction, eps: Fraction) -> Fraction:
    """Largest piece length guaranteeing ||lambda||_2 <= ||f||_1 exactly,
    from the worst-case comb measure alpha*eps/4 per unit piece length."""
    worst = Fraction(4) / (alpha * eps) - 1
    top = f.max_abs_coef()
    if top == 0:
        raise ParameterError("cannot correct the zero function")
    return f.norm_l1() ** 2 / (top**2 * worst)


def make_pieces(
    f: StepFunction,
    family,
    eps: Fraction,
    config: CorrectionConfig = CorrectionConfig(),
    inside: FiniteIntervalSet | None = None,
) -> tuple[StepFunction, list[PieceCandidates]]:
    """Refine f per config and attach a candidate sequence to every piece.

    Lemma-1 mode draws combs at measure eps/2 and enforces the two-sided
    measure sandwich; inside-set mode draws combs from ``inside`` and
    enforces only the upper bound.
    """
    if not f.pieces:
        raise ParameterError("cannot correct the zero function")
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0, 1)")
    delta = config.delta
    if config.enforce_l2_delta:
        bound = l2_delta_bound(f, family.alpha, eps)
        delta = bound if delta is None else min(as_fraction(delta), bound)
    try:
        if delta is not None:
            work = refine_step(f, family.basis, delta)
        else:
            work = StepFunction(
                (cell, c)
                for iv, c in f.pieces
                for cell in family.basis.decompose(iv)
            )
    except ValueError as exc:
        raise ParameterError(f"{exc}; pieces must fit the {family.name} basis") from exc
    if inside is not None:
        combs = family.comb_sequence_in(inside, config.eps_inside)
    else:
        combs = family.comb_sequence(eps / 2)
    sources = [
        PieceCandidates(k + 1, iv, c, combs, eps, family.alpha, inside is None)
        for k, (iv, c) in enumerate(work.pieces)
    ]
    return work, sources


@dataclass(frozen=True)
class StageCertificate:
    """Chosen (m_j, N_j) with measured margins of the three conditions."""

    index: int
    m: int
    n: int
    margin_low: float | None     # xi/N_{j-1} - max_{n <= N_{j-1}} ||S_n lam||_1
    margin_conv: float           # xi - max_{n in [N_j, n_max]} ||S_n lam - lam||_1
    tail_fraction: float         # |{sup_{n in [N_j, n_max]} |S_n lam - lam| > eta/4l}|
    margin_tail: float           # xi - tail_fraction
    g_measure: Fraction
    sandwich_low: Fraction | None
    sandwich_high: Fraction
    l2_norm_sq: Fraction


@dataclass(frozen=True)
class CorrectionSchedule:
    l: int
    xi: float
    eta: float
    n_max: int
    m_cap: int
    gate_tail: bool
    stages: tuple[StageCertificate, ...]

    @property
    def m_indices(self) -> tuple[int, ...]:
        return tuple(s.m for s in self.stages)

    @property
    def n_indices(self) -> tuple[int, ...]:
        return tuple(s.n for s in self.stages)

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "xi": self.xi,
            "eta": self.eta,
            "n_max": self.n_max,
            "m_cap": self.m_cap,
            "gate_tail": self.gate_tail,
            "stages": [
                {
                    "j": s.index,
                    "m": s.m,
                    "N": s.n,
                    "margin_low": s.margin_low,
                    "margin_conv": s.margin_conv,
                    "tail_fraction": s.tail_fraction,
                    "margin_tail": s.margin_tail,
                    "g_measure": format_ratio(s.g_measure),
                    "l2_norm_sq": format_ratio(s.l2_norm_sq),
                }
                for s in self.stages
            ],
        }


def find_schedule(
    sources: Sequence[PieceCandidates],
    family,
    xi: float,
    eta: float,
    n_max: int,
    m_cap: int = 4096,
    gate_tail: bool = False,
) -> tuple[CorrectionSchedule, list[CorrectionPiece]]:
    """Greedy inductive search in the order m_1, N_1, m_2, N_2, ...

    Smallest admissible values are always taken, so the schedule is
    deterministic.  Exhaustion raises ScheduleSearchError naming the
    binding condition and the best margin reached.
    """
    l = len(sources)
    if l == 0:
        raise ParameterError("no pieces to schedule")
    if not 0 < eta < 1:
        raise ParameterError("eta must lie in (0, 1)")
    if l > n_max:
        raise ParameterError(f"{l} pieces cannot fit strictly increasing N_j <= {n_max}")
    thresh = eta / (4 * l)
    stages: list[StageCertificate] = []
    pieces: list[CorrectionPiece] = []
    m_prev = 0
    n_prev = 0
    for j, src in enumerate(sources, start=1):
        chosen = None
        best_condition = "sandwich"
        best_margin: float | None = None
        for m in range(m_prev + 1, m_cap + 1):
            piece = src.candidate(m)
            if piece is None:
                if src.exhausted_beyond(m):
                    break
                continue
            lam = piece.lam
            margin_low = None
            if n_prev >= 1:
                # cheap precheck of the low-index condition before the full sweep
                low_norms = family.norm_curve(lam, n_prev)
                worst = float(np.max(low_norms[1:]))
                margin_low = xi / n_prev - worst
                if margin_low <= 0:
                    if best_condition != "conv":
                        best_condition, best_margin = "low", _best(best_margin, margin_low)
                    continue
            s_norms, e_norms, exceed = family.schedule_sweep(lam, n_max, thresh)
            suffix = np.maximum.accumulate(e_norms[::-1])[::-1]
            tail_any = np.logical_or.accumulate(exceed[::-1], axis=0)[::-1]
            fracs = tail_any.mean(axis=1)
            valid = suffix < xi
            if gate_tail:
                valid = valid & (fracs < xi)
            hits = np.nonzero(valid[n_prev + 1 :])[0]
            if hits.size == 0:
                margin_conv = xi - float(np.min(suffix[n_prev + 1 :]))
                best_condition, best_margin = "conv", _best(best_margin, margin_conv)
                continue
            n_j = n_prev + 1 + int(hits[0])
            cert = StageCertificate(
                index=j,
                m=m,
                n=n_j,
                margin_low=margin_low,
                margin_conv=xi - float(suffix[n_j]),
                tail_fraction=float(fracs[n_j]),
                margin_tail=xi - float(fracs[n_j]),
                g_measure=piece.g_measure,
                sandwich_low=piece.sandwich_low,
                sandwich_high=piece.sandwich_high,
                l2_norm_sq=piece.l2_norm_sq,
            )
            chosen = (piece, cert)
            break
        if chosen is None:
            raise ScheduleSearchError(
                condition=best_condition,
                stage=j,
                detail=f"m in ({m_prev}, {m_cap}] exhausted",
                best_margin=best_margin,
            )
        piece, cert = chosen
        pieces.append(piece)
        stages.append(cert)
        m_prev, n_prev = cert.m, cert.n
    schedule = CorrectionSchedule(
        l=l,
        xi=xi,
        eta=eta,
        n_max=n_max,
        m_cap=m_cap,
        gate_tail=gate_tail,
        stages=tuple(stages),
    )
    return schedule, pieces


def _best(current: float | None, margin: float) -> float:
    return margin if current is None or margin > current else current


def default_xi(work: StepFunction, floor_factor: float) -> float:
    """Proof-shaped slack with a desk-scale feasibility floor."""
    l = len(work.pieces)
    fnorm = float(work.norm_l1())
    proof = fnorm / (2 * l * l)
    floor = floor_factor * 2 * max(float(abs(c) * iv.length) for iv, c in work.pieces)
    return max(proof, floor)


@dataclass(frozen=True)
class CorrectionResult:
    """Corrected function g with exact invariants and scan diagnostics."""

    family: str
    f: StepFunction
    g: StepFunction
    eps: Fraction | None
    eta: float
    modified: FiniteIntervalSet
    modified_measure: Fraction
    schedule: CorrectionSchedule
    pieces: tuple[CorrectionPiece, ...]
    f_norm_l1: Fraction
    g_norm_l1: Fraction
    sn_norm_curve: np.ndarray
    sup_sn_ratio: float
    weak_type: WeakTypeReport
    inside_ok: bool | None = None

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "eps": format_ratio(self.eps) if self.eps is not None else None,
            "eta": self.eta,
            "f": self.f.to_json(),
            "g": self.g.to_json(),
            "modified": self.modified.to_json(),
            "modified_measure": format_ratio(self.modified_measure),
            "f_norm_l1": format_ratio(self.f_norm_l1),
            "g_norm_l1": format_ratio(self.g_norm_l1),
            "norm_doubling_ok": self.g_norm_l1 <= 2 * self.f_norm_l1,
            "sup_sn_ratio": self.sup_sn_ratio,
            "schedule": self.schedule.to_json(),
            "weak_type": self.weak_type.to_json(),
            "inside_ok": self.inside_ok,
        }


def _assemble(
    family,
    f: StepFunction,
    work: StepFunction,
    schedule: CorrectionSchedule,
    pieces: list[CorrectionPiece],
    eps: Fraction | None,
    eta: float,
    config: CorrectionConfig,
    inside: FiniteIntervalSet | None,
) -> CorrectionResult:
    g = StepFunction.zero()
    modified = FiniteIntervalSet.empty()
    for piece in pieces:
        if not piece.zero_mean():
            raise ScanError(f"piece {piece.index} failed the exact zero-mean check")
        g = g + piece.lam
        modified = modified.union(piece.g_set)
    locus = g.difference_locus(work)
    if locus != modified:
        raise ScanError("modification locus does not match the union of comb pieces")
    f_norm = work.norm_l1()
    g_norm = g.norm_l1()
    if g_norm > 2 * f_norm:
        raise ScanError("norm doubling bound violated")
    measure = modified.measure()
    if eps is not None and measure > eps:
        raise ScanError(f"modified measure {measure} exceeds eps {eps}")
    inside_ok = None
    if inside is not None:
        inside_ok = modified.is_subset_of(inside)
        if not inside_ok:
            raise ScanError("modification locus escapes the prescribed open set")
    sn_curve = family.norm_curve(g, schedule.n_max)
    sup_ratio = float(np.max(sn_curve)) / float(f_norm)
    scan = family.maximal(g, schedule.n_max)
    t_grid = np.geomspace(eta, 1.0, config.weak_type_points + 2)[1:-1]
    weak = distribution_scan(
        scan,
        f_norm,
        t_grid,
        family=family.name,
        set_descriptor={"kind": "corrected", "normalizer": "f_l1_norm"},
    )
    return CorrectionResult(
        family=family.name,
        f=work,
        g=g,
        eps=eps,
        eta=eta,
        modified=modified,
        modified_measure=measure,
        schedule=schedule,
        pieces=tuple(pieces),
        f_norm_l1=f_norm,
        g_norm_l1=g_norm,
        sn_norm_curve=sn_curve,
        sup_sn_ratio=sup_ratio,
        weak_type=weak,
        inside_ok=inside_ok,
    )


def build_correction(
    f: StepFunction,
    family,
    eps: Fraction,
    eta: float,
    config: CorrectionConfig = CorrectionConfig(),
) -> CorrectionResult:
    """Correct f on a set of measure <= eps so the truncated partial-sum
    diagnostics certify the construction; all set/norm claims are exact."""
    eps = as_fraction(eps)
    work, sources = make_pieces(f, family, eps, config)
    xi = config.xi if config.xi is not None else default_xi(work, config.xi_floor_factor)
    schedule, pieces = find_schedule(
        sources, family, xi, eta, config.n_max, config.m_cap, config.gate_tail
    )
    return _assemble(family, f, work, schedule, pieces, eps, eta, config, None)


def build_correction_in_set(
    f: StepFunction,
    family,
    u_set: FiniteIntervalSet,
    eta: float,
    config: CorrectionConfig = CorrectionConfig(),
) -> CorrectionResult:
    """Correction whose modification locus is contained in the open set
    proxy ``u_set`` (exact inclusion); the measure bound is waived."""
    work, sources = make_pieces(f, family, config.eps_inside, config, inside=u_set)
    xi = config.xi if config.xi is not None else default_xi(work, config.xi_floor_factor)
    schedule, pieces = find_schedule(
        sources, family, xi, eta, config.n_max, config.m_cap, config.gate_tail
    )
    return _assemble(family, f, work, schedule, pieces, None, eta, config, u_set)


class StageFailure(StepCorrectError):
    """A finite-stage driver aborted; carries the partial result."""

    exit_code = 4

    def __init__(self, stage: int, cause: Exception, partial: list[CorrectionResult]):
        self.stage = stage
        self.cause = cause
        self.partial = partial
        super().__init__(f"stage {stage} failed: {cause}")


@dataclass(frozen=True)
class StagedCorrectionResult:
    """Truncated series of stage corrections g_K = sum_k g_k."""

    family: str
    eps: Fraction
    stages: tuple[CorrectionResult, ...]
    g: StepFunction
    modified: FiniteIntervalSet
    modified_measure: Fraction
    measure_budget: Fraction          # eps * (1 - 2^-K)
    error_curve: np.ndarray           # ||S_n g_K - g_K||_1 for n = 0..n_max

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "eps": format_ratio(self.eps),
            "stage_count": len(self.stages),
            "modified_measure": format_ratio(self.modified_measure),
            "measure_budget": format_ratio(self.measure_budget),
            "stages": [s.to_json() for s in self.stages],
        }


def finite_stage_driver(
    stage_targets: Sequence[StepFunction],
    family,
    eps: Fraction,
    config: CorrectionConfig = CorrectionConfig(),
) -> StagedCorrectionResult:
    """Correct each stage target with eps_k = eps 2^-k, eta_k = 4^-k and
    sum the results; stage norms must decay like 4^-k."""
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0, 1)")
    if not stage_targets:
        raise ParameterError("need at least one stage target")
    base = stage_targets[0].norm_l1()
    if base == 0:
        raise ParameterError("first stage target must be nonzero")
    for k, target in enumerate(stage_targets, start=1):
        if target.norm_l1() * 4**k > 4 * base:
            raise ParameterError(f"stage {k} norm violates the 4^-k decay budget")
    results: list[CorrectionResult] = []
    for k, target in enumerate(stage_targets, start=1):
        try:
            res = build_correction(target, family, eps * Fraction(1, 2**k), 4.0**-k, config)
        except StepCorrectError as exc:
            raise StageFailure(stage=k, cause=exc, partial=results) from exc
        results.append(res)
    g = StepFunction.zero()
    modified = FiniteIntervalSet.empty()
    for res in results:
        g = g + res.g
        modified = modified.union(res.modified)
    k_stages = len(results)
    budget = eps * (1 - Fraction(1, 2**k_stages))
    measure = modified.measure()
    if measure > budget:
        raise ScanError(f"total modified measure {measure} exceeds budget {budget}")
    curve = family.norm_curve(g, config.n_max, against=family.samples(g))
    return StagedCorrectionResult(
        family=family.name,
        eps=eps,
        stages=tuple(results),
        g=g,
        modified=modified,
        modified_measure=measure,
        measure_budget=budget,
        error_curve=curve,
    )
