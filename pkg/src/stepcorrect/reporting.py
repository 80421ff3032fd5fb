"""Deterministic report emission: JSON, CSV, and rendered figures.

Every artifact embeds the resolved run configuration and the tool
version, contains no timestamps, and is written atomically (temp file +
rename), so identical configurations produce byte-identical files.
Figures are matplotlib renders of the delimited data placed next to it.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .grids import MaximalScan
from .weaktype import StabilityResult, WeakTypeReport

TOOL = f"stepcorrect {__version__}"

_PNG_METADATA = {"Software": TOOL}


def atomic_write_bytes(path: Path, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: Path, payload: dict, config: Mapping | None = None) -> None:
    body = {"tool": TOOL, "config": dict(config or {}), **payload}
    atomic_write_text(path, json.dumps(body, indent=2, sort_keys=True) + "\n")


def _fmt(value) -> str:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    config: Mapping | None = None,
) -> None:
    lines = [f"# tool: {TOOL}"]
    for key, value in sorted((config or {}).items()):
        lines.append(f"# {key}: {value}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _save(fig, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata=_PNG_METADATA)
    plt.close(fig)


def render_weak_type(report: WeakTypeReport, path: Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(report.lambda_grid, report.values, "o-", ms=3, lw=1)
    ax.axhline(report.c_emp, color="crimson", ls="--", lw=1,
               label=f"c_emp = {report.c_emp:.3g}")
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$\lambda\,|\{S^* > \lambda\}| / |G|$")
    ax.set_title(title or f"{report.family} weak-type scan")
    ax.legend(loc="lower left", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def render_stability(result: StabilityResult, path: Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ls = [rep.set_descriptor.get("l", i + 1) for i, rep in enumerate(result.reports)]
    cs = [rep.c_emp for rep in result.reports]
    ax.plot(ls, cs, "s-", lw=1)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("teeth count l")
    ax.set_ylabel("empirical weak-type constant")
    ax.set_title(title or f"stability across l (ratio {result.ratio:.3f})")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_scan(scan: MaximalScan, path: Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(scan.spec.points(), scan.values, lw=0.6)
    ax.set_xlabel("x")
    ax.set_ylabel("S*(x)")
    ax.set_title(title or f"truncated maximal function (n_max = {scan.n_max})")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_samples(xs: np.ndarray, values: np.ndarray, path: Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, values, lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("value")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_norm_curve(curve: np.ndarray, path: Path, ylabel: str, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(len(curve)), curve, lw=1)
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def maximal_scan_rows(scan: MaximalScan):
    xs = scan.spec.points()
    for x, v, n in zip(xs, scan.values, scan.argmax_n):
        yield (x, v, n)


def weak_type_rows(report: WeakTypeReport):
    for lam, value in zip(report.lambda_grid, report.values):
        yield (lam, value)
