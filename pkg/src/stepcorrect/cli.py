"""Command-line front end.

Subcommands: gen-comb, partial-sum, maximal-scan, weak-type, weak-gap,
correct, demo.  Options can also be supplied through a flat key=value
config file (--config); explicit flags override file entries.  Exact
quantities (set endpoints, eps) are given as 'p/q' strings; decimal
strings are rejected for them.

Exit codes: 0 success, 1 input error, 2 parameter error, 3 scan failure,
4 schedule-search failure.

Example:
  stepcorrect gen-comb --family trig --eps 1/8 --l 16 --out out/
  stepcorrect weak-type --family trig --eps 1/8 --l-list 4,8,16,32 \
      --n-max 1024 --grid-size 8192 --out out/
  stepcorrect correct --family trig --input f.json --eps 1/8 --eta 1/16 --out out/
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .combs import trig_comb, uniform_comb, walsh_comb
from .correction import (
    CorrectionConfig,
    CorrectionResult,
    build_correction,
    build_correction_in_set,
    finite_stage_driver,
)
from .errors import InputError, ParameterError, StepCorrectError
from .families import make_family
from .grids import GridSpec
from .intervals import FiniteIntervalSet, Interval, format_ratio
from .stepfunc import StepFunction
from . import reporting
from .weaktype import (
    comb_scan,
    stability_study,
    weak_convergence_gap,
)


def parse_exact(text: str, name: str) -> Fraction:
    """Parse 'p/q' (or integer) rationals; decimals are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ParameterError(f"{name} must be an exact rational 'p/q', got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse {name}={text!r} as a rational") from exc


def parse_real(text: str, name: str) -> float:
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse {name}={text!r} as a number") from exc


def parse_int_list(text: str, name: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"cannot parse {name}={text!r} as integers") from exc


def load_config_file(path: str) -> dict[str, str]:
    """Flat key=value format, '#' comments; round-trips losslessly."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def dump_config_file(entries: dict) -> str:
    return "".join(f"{k}={entries[k]}\n" for k in sorted(entries))


def load_step_function(path: str) -> StepFunction:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read step function from {path}: {exc}") from exc
    try:
        return StepFunction.from_json(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed step function in {path}: {exc}") from exc


def load_interval_set(path: str) -> FiniteIntervalSet:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read interval set from {path}: {exc}") from exc
    try:
        return FiniteIntervalSet.from_json(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed interval set in {path}: {exc}") from exc


def _resolved_config(args, keys) -> dict:
    out = {"version": __version__}
    for key in keys:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            out[key] = str(value)
    return out


def _family(args):
    return make_family(args.family, grid_size=args.grid_size, level=args.level)


def _parent_interval(args) -> Interval:
    return Interval(parse_exact(args.a, "a"), parse_exact(args.b, "b"))


def cmd_gen_comb(args) -> int:
    out = Path(args.out)
    eps = parse_exact(args.eps, "eps") if args.eps else None
    if args.family == "trig":
        comb = trig_comb(_parent_interval(args), eps, args.l)
        desc = {"kind": "trig_comb", "eps": format_ratio(eps), "l": args.l,
                "a": args.a, "b": args.b}
    elif args.family == "walsh":
        comb = walsh_comb(_parent_interval(args), args.r, args.t, args.l)
        desc = {"kind": "walsh_comb", "r": args.r, "t": args.t, "l": args.l,
                "a": args.a, "b": args.b}
    elif args.family == "uniform":
        comb = uniform_comb(eps, args.l)
        desc = {"kind": "uniform_comb", "eps": format_ratio(eps), "l": args.l}
    else:
        raise ParameterError(f"unknown comb family {args.family!r}")
    config = _resolved_config(args, ["family", "eps", "l", "r", "t", "a", "b"])
    reporting.write_json(out / "comb.json", {"set": comb.to_json(), "descriptor": desc,
                                             "measure": format_ratio(comb.measure())}, config)
    lines = [
        f"{desc['kind']} with {len(comb)} teeth",
        f"measure == {format_ratio(comb.measure())}",
        f"first teeth: {', '.join(repr(iv) for iv in comb.intervals[:4])}",
    ]
    reporting.atomic_write_text(out / "comb_summary.txt", "\n".join(lines) + "\n")
    print(f"wrote {out / 'comb.json'} (measure {format_ratio(comb.measure())})")
    return 0


def cmd_partial_sum(args) -> int:
    out = Path(args.out)
    f = load_step_function(args.input)
    family = _family(args)
    gf = family.partial_sum(f, args.n)
    config = _resolved_config(args, ["family", "input", "n", "grid-size", "level"])
    xs = gf.spec.points()
    reporting.write_csv(out / "partial_sum.csv", ["x", "value"],
                        zip(xs, gf.values), config)
    if args.figures:
        reporting.render_samples(xs, gf.values, out / "partial_sum.png",
                                 title=f"S_{args.n} samples ({args.family})")
    print(f"wrote {out / 'partial_sum.csv'} (imag residue {gf.imag_residue:.2e})")
    return 0


def cmd_maximal_scan(args) -> int:
    out = Path(args.out)
    f = load_step_function(args.input)
    family = _family(args)
    scan = family.maximal(f, args.n_max)
    config = _resolved_config(args, ["family", "input", "n-max", "grid-size", "level"])
    reporting.write_csv(out / "maximal_scan.csv", ["x", "S_star", "argmax_n"],
                        reporting.maximal_scan_rows(scan), config)
    if args.figures:
        reporting.render_scan(scan, out / "maximal_scan.png")
    print(f"wrote {out / 'maximal_scan.csv'} (max {scan.max_value():.4g})")
    return 0


def cmd_weak_type(args) -> int:
    out = Path(args.out)
    family = args.family
    l_list = parse_int_list(args.l_list, "l-list")
    if not l_list:
        raise ParameterError("l-list must not be empty")
    eps = parse_exact(args.eps, "eps")
    grid = GridSpec.trig(args.grid_size) if family == "trig" else GridSpec.dyadic(args.level)
    config = _resolved_config(
        args, ["family", "eps", "l-list", "n-max", "grid-size", "level", "r", "t", "lambda-points"]
    )
    if len(l_list) == 1:
        report = comb_scan(family, l_list[0], args.n_max, grid, eps=eps,
                           r=args.r, t=args.t, lambda_points=args.lambda_points)
        name = f"weak_type_{family}_l{l_list[0]}"
        reporting.write_json(out / f"{name}.json", {"report": report.to_json()}, config)
        reporting.write_csv(out / f"{name}.csv", ["lambda", "value"],
                            reporting.weak_type_rows(report), config)
        if args.figures:
            reporting.render_weak_type(report, out / f"{name}.png")
        print(f"wrote {out / (name + '.json')} (c_emp {report.c_emp:.4g})")
        return 0
    result = stability_study(family, l_list, args.n_max, grid, eps=eps,
                             r=args.r, t=args.t, lambda_points=args.lambda_points)
    for rep in result.reports:
        l = rep.set_descriptor["l"]
        name = f"weak_type_{family}_l{l}"
        reporting.write_json(out / f"{name}.json", {"report": rep.to_json()}, config)
        reporting.write_csv(out / f"{name}.csv", ["lambda", "value"],
                            reporting.weak_type_rows(rep), config)
        if args.figures:
            reporting.render_weak_type(rep, out / f"{name}.png")
    summary = {
        "c_emp": {str(rep.set_descriptor["l"]): rep.c_emp for rep in result.reports},
        "ratio": result.ratio,
        "monotone_growth": result.monotone_growth,
    }
    reporting.write_json(out / f"weak_type_{family}_summary.json", {"summary": summary}, config)
    if args.figures:
        reporting.render_stability(result, out / f"weak_type_{family}_stability.png")
    print(f"wrote {len(result.reports)} reports; c_emp spread ratio {result.ratio:.4g}")
    return 0


def cmd_weak_gap(args) -> int:
    out = Path(args.out)
    eps = parse_exact(args.eps, "eps")
    l_list = parse_int_list(args.l_list, "l-list")
    if args.test_file:
        test = load_step_function(args.test_file)
        test_desc = f"step:{args.test_file}"
    else:
        test = int(args.freq)
        test_desc = f"freq:{args.freq}"
    rows = []
    for l in l_list:
        gap = weak_convergence_gap(uniform_comb(eps, l), test)
        rows.append((l, format_ratio(gap) if isinstance(gap, Fraction) else repr(gap)))
    config = _resolved_config(args, ["eps", "l-list", "test-file", "freq"])
    reporting.write_csv(out / "weak_gap.csv", ["l", "gap"], rows, config)
    if args.figures:
        vals = np.array([float(Fraction(g)) if "/" in g else float(g) for _, g in rows])
        fig_path = out / "weak_gap.png"
        reporting.render_norm_curve(vals, fig_path, ylabel="gap",
                                    title=f"weak-convergence gap ({test_desc})")
    for l, gap in rows:
        print(f"l={l}: gap={gap}")
    return 0


def _correction_outputs(args, result: CorrectionResult, out: Path, config: dict) -> None:
    reporting.write_json(out / "correction.json", {"result": result.to_json()}, config)
    reporting.write_csv(out / "sn_norms.csv", ["n", "norm_l1"],
                        enumerate(result.sn_norm_curve), config)
    reporting.write_csv(out / "weak_type.csv", ["t", "value"],
                        reporting.weak_type_rows(result.weak_type), config)
    if args.figures:
        reporting.render_norm_curve(result.sn_norm_curve, out / "sn_norms.png",
                                    ylabel=r"$\|S_n g\|_1$",
                                    title=f"partial-sum norms ({result.family})")
        reporting.render_weak_type(result.weak_type, out / "weak_type.png",
                                   title="corrected function weak-type scan")


def cmd_correct(args) -> int:
    out = Path(args.out)
    f = load_step_function(args.input)
    family = _family(args)
    eta = parse_real(args.eta, "eta")
    if not 0 < eta < 1:
        raise ParameterError("eta must lie in (0, 1)")
    cfg = CorrectionConfig(
        n_max=args.n_max,
        m_cap=args.m_cap,
        xi=parse_real(args.xi, "xi") if args.xi else None,
        gate_tail=args.gate_tail,
        enforce_l2_delta=args.enforce_l2_delta,
    )
    config = _resolved_config(
        args,
        ["family", "input", "eps", "eta", "n-max", "m-cap", "xi",
         "grid-size", "level", "stages", "inside-set"],
    )
    if args.inside_set:
        u_set = load_interval_set(args.inside_set)
        result = build_correction_in_set(f, family, u_set, eta, cfg)
        _correction_outputs(args, result, out, config)
        print(f"wrote {out / 'correction.json'} (modified inside set: {result.inside_ok})")
        return 0
    eps = parse_exact(args.eps, "eps")
    if args.stages > 1:
        targets = [f.scale(Fraction(1, 4 ** (k - 1))) for k in range(1, args.stages + 1)]
        staged = finite_stage_driver(targets, family, eps, cfg)
        reporting.write_json(out / "correction.json", {"result": staged.to_json()}, config)
        reporting.write_csv(out / "error_curve.csv", ["n", "error_l1"],
                            enumerate(staged.error_curve), config)
        if args.figures:
            reporting.render_norm_curve(staged.error_curve, out / "error_curve.png",
                                        ylabel=r"$\|S_n g - g\|_1$",
                                        title=f"{args.stages}-stage driver error")
        print(
            f"wrote {out / 'correction.json'} (modified measure "
            f"{format_ratio(staged.modified_measure)} <= {format_ratio(staged.measure_budget)})"
        )
        return 0
    result = build_correction(f, family, eps, eta, cfg)
    _correction_outputs(args, result, out, config)
    print(
        f"wrote {out / 'correction.json'} (|{{g != f}}| = "
        f"{format_ratio(result.modified_measure)}, sup ratio {result.sup_sn_ratio:.3g})"
    )
    return 0


def cmd_demo(args) -> int:
    out = Path(args.out)
    f = StepFunction([
        (Interval(Fraction(0), Fraction(1, 2)), Fraction(1)),
        (Interval(Fraction(1, 2), Fraction(1)), Fraction(-1)),
    ])
    reporting.write_json(out / "demo_input.json", f.to_json(), {"version": __version__})
    args.family = "trig"
    args.l_list = "4,8,16"
    args.eps = "1/8"
    args.r, args.t, args.lambda_points = 3, 1, 64
    args.n_max = min(args.n_max, 256)
    cmd_weak_type(args)
    args.input = str(out / "demo_input.json")
    args.eta = "1/16"
    args.stages = 1
    args.inside_set = None
    args.xi = None
    cmd_correct(args)
    print("demo complete")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--grid-size", type=int, default=8192,
                        help="trig grid size (half-offset samples)")
    parser.add_argument("--level", type=int, default=13, help="walsh dyadic grid level")
    parser.add_argument("--seed", type=int, default=0, help="random seed recorded in outputs")
    fig = parser.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_true", default=True)
    fig.add_argument("--no-figures", dest="figures", action="store_false")


TOOL_BANNER = f"stepcorrect {__version__}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepcorrect",
        description="comb sets, partial-sum operators, weak-type scans, corrections",
    )
    parser.add_argument("--version", action="version", version=TOOL_BANNER)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-comb", help="generate a comb set")
    _add_common(p)
    p.add_argument("--family", required=True, choices=["uniform", "trig", "walsh"])
    p.add_argument("--eps", default=None, help="tooth measure parameter 'p/q'")
    p.add_argument("--l", type=int, required=True, help="tooth count / dilation level")
    p.add_argument("--r", type=int, default=3, help="walsh generation")
    p.add_argument("--t", type=int, default=1, help="walsh cell index")
    p.add_argument("--a", default="0", help="parent interval left endpoint 'p/q'")
    p.add_argument("--b", default="1", help="parent interval right endpoint 'p/q'")
    p.set_defaults(func=cmd_gen_comb)

    p = sub.add_parser("partial-sum", help="sample S_n of a step function")
    _add_common(p)
    p.add_argument("--family", required=True, choices=["trig", "walsh"])
    p.add_argument("--input", required=True, help="step function JSON file")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_partial_sum)

    p = sub.add_parser("maximal-scan", help="truncated maximal function scan")
    _add_common(p)
    p.add_argument("--family", required=True, choices=["trig", "walsh"])
    p.add_argument("--input", required=True)
    p.add_argument("--n-max", type=int, default=1024)
    p.set_defaults(func=cmd_maximal_scan)

    p = sub.add_parser("weak-type", help="weak-type (1,1) distribution scans")
    _add_common(p)
    p.add_argument("--family", required=True, choices=["trig", "walsh"])
    p.add_argument("--eps", default="1/8")
    p.add_argument("--l-list", required=True, help="comma-separated tooth counts")
    p.add_argument("--n-max", type=int, default=1024)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--lambda-points", type=int, default=64)
    p.set_defaults(func=cmd_weak_type)

    p = sub.add_parser("weak-gap", help="weak-convergence gaps of uniform combs")
    _add_common(p)
    p.add_argument("--eps", default="1/4")
    p.add_argument("--l-list", required=True)
    p.add_argument("--test-file", default=None, help="step function JSON test")
    p.add_argument("--freq", type=int, default=None, help="pure frequency test e^(2 pi i k x)")
    p.set_defaults(func=cmd_weak_gap)

    p = sub.add_parser("correct", help="small-set correction of a step function")
    _add_common(p)
    p.add_argument("--family", required=True, choices=["trig", "walsh"])
    p.add_argument("--input", required=True)
    p.add_argument("--eps", default="1/8")
    p.add_argument("--eta", default="1/16")
    p.add_argument("--n-max", type=int, default=512)
    p.add_argument("--m-cap", type=int, default=4096)
    p.add_argument("--xi", default=None, help="schedule slack override")
    p.add_argument("--gate-tail", action="store_true",
                   help="also gate stages on the pointwise tail condition")
    p.add_argument("--enforce-l2-delta", action="store_true",
                   help="refine pieces until the exact L2 piece bound holds")
    p.add_argument("--stages", type=int, default=1, help="finite-stage driver depth")
    p.add_argument("--inside-set", default=None,
                   help="interval-set JSON; constrain the modification locus inside it")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("demo", help="small end-to-end run")
    _add_common(p)
    p.add_argument("--n-max", type=int, default=256)
    p.add_argument("--m-cap", type=int, default=4096)
    p.add_argument("--gate-tail", action="store_true")
    p.add_argument("--enforce-l2-delta", action="store_true")
    p.set_defaults(func=cmd_demo)

    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    entries = load_config_file(args.config)
    for key, value in entries.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise InputError(f"unknown config key {key!r}")
        current = getattr(args, attr)
        if isinstance(current, bool):
            setattr(args, attr, value.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, attr, int(value))
        else:
            setattr(args, attr, value)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        # flags override the config file: re-parse with file values as defaults
        if getattr(args, "config", None):
            _apply_config_file(args)
            args = parser.parse_args(argv, namespace=args)
        return args.func(args)
    except StepCorrectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
