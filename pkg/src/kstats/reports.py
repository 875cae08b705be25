"""Deterministic report files: canonical JSON, CSV, and rendered figures.

Reports embed their configuration and a format version, never wall-clock
data, so identical runs produce byte-identical files.  Files are grouped
under cache_dir/<command>/<param-hash>/ and named by content hash.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

REPORT_FORMAT_VERSION = 1


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    return obj


def canonical_json_bytes(payload: dict) -> bytes:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=1,
                      ensure_ascii=False).encode()


def param_hash(params: dict) -> str:
    return hashlib.sha256(canonical_json_bytes(params)).hexdigest()[:12]


def write_report(cache_dir: str | Path, command: str, params: dict, payload: dict,
                 csv_rows: list[dict] | None = None) -> Path:
    """Write report JSON (and optional CSV) under the content-addressed layout."""
    doc = {
        "format_version": REPORT_FORMAT_VERSION,
        "command": command,
        "config": params,
        "result": payload,
    }
    body = canonical_json_bytes(doc)
    out_dir = Path(cache_dir) / command / param_hash(params)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"report-{hashlib.sha256(body).hexdigest()[:16]}.json"
    path.write_bytes(body)
    if csv_rows:
        write_csv(out_dir / "report.csv", csv_rows)
    return path


def write_csv(path: str | Path, rows: list[dict]) -> Path:
    path = Path(path)
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(str(_jsonable(row.get(c, ""))) for c in cols))
    path.write_text("\n".join(lines) + "\n")
    return path


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def figure_distribution(path: str | Path, empirical: list[float], reference: list[float],
                        title: str, r_max: int = 5) -> Path:
    """Bar chart of an empirical dim-coker distribution against alpha."""
    plt = _pyplot()
    rs = list(range(min(r_max, len(empirical) - 1) + 1))
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.4
    ax.bar([r - width/2 for r in rs], [empirical[r] for r in rs], width, label="empirical")
    ax.bar([r + width/2 for r in rs], [reference[r] for r in rs], width, label="alpha")
    ax.set_xlabel("cokernel dimension r")
    ax.set_ylabel("probability")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def figure_density(path: str | Path, labels: list[str], ratios: list[float],
                   references: list[float], title: str) -> Path:
    """Per-cell empirical densities next to their reference values."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = range(len(labels))
    width = 0.4
    ax.bar([x - width/2 for x in xs], ratios, width, label="count/X")
    ax.bar([x + width/2 for x in xs], references, width, label="reference")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def figure_convergence(path: str | Path, xs: list[int], series: dict[str, list[float]],
                       title: str, ylabel: str = "relative error") -> Path:
    """Relative error per cell across growing bounds, log-x."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, ys in series.items():
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_xscale("log")
    ax.axhline(0.0, color="grey", lw=0.8)
    ax.set_xlabel("X")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
