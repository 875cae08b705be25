"""Command-line surface: every pipeline as a reproducible, cached run.

Exit codes: 0 success, 2 invalid configuration, 3 cache corruption,
4 a verification/acceptance check failed, 5 a resource bound was exceeded.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .exact import ResourceLimitError, coset3, is_odd_prime
from . import cokernel as ck
from . import cubic as cb
from . import heuristics as hx
from . import ktheory as kt
from . import quadratic as qd
from . import reports as rp

EXIT_INVALID = 2
EXIT_CACHE = 3
EXIT_CHECK_FAILED = 4
EXIT_RESOURCE = 5

DEFAULT_CACHE = os.environ.get("KSTATS_CACHE_DIR", os.path.join(os.path.expanduser("~"), ".cache", "kstats"))


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


class _Run:
    def __init__(self, cache_dir: str, fmt: str, figures: bool):
        self.cache_dir = Path(cache_dir)
        self.fmt = fmt
        self.figures = figures

    def emit(self, command: str, params: dict, payload: dict,
             csv_rows=None, pretty=None):
        params = {"version": __version__, **params}
        path = rp.write_report(self.cache_dir, command, params, payload, csv_rows)
        if self.fmt == "json":
            click.echo(path.read_text())
        elif self.fmt == "csv" and csv_rows:
            click.echo((path.parent / "report.csv").read_text(), nl=False)
        else:
            if pretty:
                click.echo(pretty)
            click.echo(f"report: {path}")
        return path.parent


@click.group()
@click.option("--cache-dir", default=DEFAULT_CACHE, show_default=True,
              help="Report/cache directory (env KSTATS_CACHE_DIR)")
@click.option("--format", "fmt", type=click.Choice(["pretty", "json", "csv"]),
              default="pretty", show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Render matplotlib figures next to the delimited output")
@click.version_option(__version__)
@click.pass_context
def main(ctx, cache_dir, fmt, figures):
    """Class-group / K-group statistics for quadratic fields."""
    ctx.obj = _Run(cache_dir, fmt, figures)


def _parse_sign(s: str) -> int:
    if s in ("+", "pos", "real"):
        return 1
    if s in ("-", "neg", "imaginary"):
        return -1
    _fail(EXIT_INVALID, f"bad sign {s!r}")


@main.command()
@click.option("--p", type=int, required=True)
@click.option("--u", type=int, default=0, show_default=True)
@click.option("--r-max", type=int, default=8, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--check-moments", is_flag=True, help="Verify sum alpha = 1 and sum p^r alpha = 1 + p^-u")
@click.pass_obj
def alpha(run, p, u, r_max, tol, check_moments):
    """Cohen-Lenstra constants alpha(p, u, r) with certified bounds."""
    if not is_odd_prime(p):
        _fail(EXIT_INVALID, f"p={p} is not an odd prime")
    vals = [hx.alpha(p, u, r, tol) for r in range(r_max + 1)]
    payload = {"alpha": [{"r": a.r, "value": a.value, "error_bound": a.error_bound} for a in vals]}
    lines = [f"alpha({p},{u},{r}) = {a.value:.12f}  (+/- {a.error_bound:.2e})"
             for r, a in enumerate(vals)]
    if check_moments:
        s0, s1 = hx.alpha_moment_sums(p, u, tol=tol)
        target1 = 1 + p ** -u
        payload["moments"] = {"sum": s0, "sum_weighted": s1,
                              "sum_error": abs(s0 - 1), "weighted_error": abs(s1 - target1)}
        lines.append(f"sum alpha = {s0:.12f} (err {abs(s0-1):.2e}); "
                     f"sum p^r alpha = {s1:.12f} (err {abs(s1-target1):.2e})")
        if abs(s0 - 1) > 1e-8 or abs(s1 - target1) > 1e-6:
            _fail(EXIT_CHECK_FAILED, "alpha moment identity violated")
    rows = [{"p": p, "u": u, "r": a.r, "value": a.value, "error_bound": a.error_bound} for a in vals]
    run.emit("alpha", {"p": p, "u": u, "r_max": r_max, "tol": tol}, payload, rows, "\n".join(lines))


@main.command()
@click.option("--p", type=int, required=True)
@click.pass_obj
def tables(run, p):
    """Conjecture tables: distribution cells, average orders, class averages."""
    if not is_odd_prime(p):
        _fail(EXIT_INVALID, f"p={p} is not an odd prime")
    avg = hx.average_table(p)
    cls_avg = hx.class_average_table(p)
    k_res = hx.k_residue_average_table(p)
    valid = hx.valid_n_classes(p)
    lines = [f"average order of (K_2n(O_F)/{p})^-  [rows marked * are empty for p={p}]"]
    for row in hx.N_CLASSES:
        mark = " " if row in valid else "*"
        lines.append(f"{mark} {row:<34} real {str(avg[(row, hx.REAL)]):>10}   "
                     f"imaginary {str(avg[(row, hx.IMAGINARY)]):>10}")
    lines.append("")
    lines.append("average order of the class-group component (condition row / complement)")
    for row in hx.N_CLASSES:
        mark = " " if row in valid else "*"
        for holds in (True, False):
            if (row, hx.REAL, holds) not in cls_avg:
                continue
            tag = "condition holds" if holds else "all other cases"
            lines.append(f"{mark} {row:<34} {tag:<16} "
                         f"d>0 {str(cls_avg[(row, hx.REAL, holds)]):>6}   "
                         f"d<0 {str(cls_avg[(row, hx.IMAGINARY, holds)]):>6}")
    rows = (hx.table_rows_json(p, avg, "average_k_minus")
            + hx.table_rows_json(p, cls_avg, "average_class_component")
            + hx.table_rows_json(p, k_res, "average_k_minus_residue"))
    payload = {
        "valid_n_classes": list(valid),
        "average_k_minus": {f"{k[0]} | {k[1]}": str(v) for k, v in avg.items()},
        "average_class_component": {f"{k[0]} | {k[1]} | cond={k[2]}": str(v) for k, v in cls_avg.items()},
        "average_k_minus_residue": {f"{k[0]} | {k[1]} | cond={k[2]}": str(v) for k, v in k_res.items()},
    }
    run.emit("tables", {"p": p}, payload, rows, "\n".join(lines))


@main.command()
@click.option("--p", type=int, default=3, show_default=True)
@click.option("--u", type=int, default=0, show_default=True)
@click.option("--m", type=int, default=100, show_default=True)
@click.option("--samples", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--exhaustive", is_flag=True)
@click.pass_obj
def cokernel(run, p, u, m, samples, seed, threads, exhaustive):
    """Distribution of dim coker of seeded random maps F_p^(m+u) -> F_p^m."""
    try:
        rep = ck.simulate(p, u, m, samples, seed, threads=threads, exhaustive=exhaustive)
    except ValueError as exc:
        _fail(EXIT_INVALID, str(exc))
    pretty = [f"p={p} u={u} m={m} samples={rep.samples} engine={rep.engine}"]
    for r in range(min(m, 5) + 1):
        pretty.append(f"  Prob(dim={r}) = {rep.probabilities[r]:.6f}   alpha = {rep.reference[r]:.6f}")
    pretty.append(f"max |empirical - alpha| = {rep.max_abs_deviation:.6f}")
    params = {"p": p, "u": u, "m": m, "samples": samples,
              "seed": None if exhaustive else seed, "exhaustive": exhaustive}
    rows = [{"r": r, "count": rep.counts[r], "probability": rep.probabilities[r],
             "alpha": rep.reference[r]} for r in range(m + 1)]
    out_dir = run.emit("cokernel", params, rep.to_json(), rows, "\n".join(pretty))
    if run.figures:
        rp.figure_distribution(out_dir / "distribution.png", rep.probabilities,
                               rep.reference, f"cokernel dims, p={p} u={u} m={m}")


@main.command()
@click.option("--x", "--X", "bound", type=int, required=True)
@click.option("--sign", type=str, default="both", show_default=True)
@click.option("--list", "list_all", is_flag=True,
              help="Emit one CSV row per discriminant instead of density cells")
@click.pass_obj
def quads(run, bound, sign, list_all):
    """Count fundamental discriminants per (sign, 3-adic class) against the sieve density."""
    signs = (1, -1) if sign == "both" else (_parse_sign(sign),)
    if list_all:
        rows = []
        for sg in signs:
            ds = qd.enumerate_discriminants(qd.QuadFamily(sign=sg, bound=bound))
            cosets = qd.coset3_array(ds)
            rows += [{"d": int(d), "sign": "+" if sg > 0 else "-", "coset3": int(c)}
                     for d, c in zip(ds, cosets)]
        run.emit("quads", {"X": bound, "sign": sign, "list": True},
                 {"count": len(rows)}, rows, f"{len(rows)} fundamental discriminants")
        return
    rows = []
    for sg in signs:
        for coset in qd.COSETS:
            repdr = qd.density_report(qd.QuadFamily(sign=sg, coset3=coset, bound=bound))
            rows.append({"sign": "+" if sg > 0 else "-", "coset3": coset,
                         "count": repdr.count, "ratio": repdr.ratio,
                         "reference": repdr.reference, "rel_error": repdr.rel_error})
    pretty = [f"{r['sign']} d={r['coset3']} mod {3 if r['coset3'] in (1,2) else 9}: "
              f"count={r['count']} count/X={r['ratio']:.6f} ref={r['reference']:.6f} "
              f"rel={r['rel_error']:+.4%}" for r in rows]
    out_dir = run.emit("quads", {"X": bound, "sign": sign}, {"cells": rows}, rows, "\n".join(pretty))
    if run.figures:
        rp.figure_density(out_dir / "densities.png",
                          [f"{r['sign']}{r['coset3']}" for r in rows],
                          [r["ratio"] for r in rows], [r["reference"] for r in rows],
                          f"fundamental discriminant densities, X={bound}")


@main.command()
@click.option("--d", type=int, default=None, help="negative fundamental discriminant")
@click.option("--max-abs-d", type=int, default=None,
              help="run the oracle over every negative fundamental d up to this bound")
@click.pass_obj
def classgroup(run, d, max_abs_d):
    """Imaginary class-group oracle: h, 3-rank, and #Cl(O_K[1/3])/3, for one d or a range."""
    if (d is None) == (max_abs_d is None):
        _fail(EXIT_INVALID, "give exactly one of --d or --max-abs-d")
    ds = [d] if d is not None else [int(v) for v in qd.enumerate_discriminants(
        qd.QuadFamily(sign=-1, bound=max_abs_d + 1))]
    rows = []
    try:
        for dd in ds:
            data = qd.imaginary_class_group(dd)
            rows.append({"d": dd, "sign": "-", "coset3": coset3(dd),
                         "h": data.h, "rank3": data.rank3, "cl_13_order": qd.cl_13_order(dd)})
    except ResourceLimitError as exc:
        _fail(EXIT_RESOURCE, str(exc))
    except ValueError as exc:
        _fail(EXIT_INVALID, str(exc))
    if d is not None:
        payload = rows[0]
        pretty = (f"d={d}: h={payload['h']}, rank3={payload['rank3']}, "
                  f"#Cl(O_K[1/3])/3 = {payload['cl_13_order']}")
    else:
        payload = {"max_abs_d": max_abs_d, "count": len(rows),
                   "rank3_histogram": {str(r): sum(1 for row in rows if row["rank3"] == r)
                                       for r in sorted({row["rank3"] for row in rows})}}
        pretty = f"{len(rows)} class groups computed; rank3 histogram {payload['rank3_histogram']}"
    run.emit("classgroup", {"d": d, "max_abs_d": max_abs_d}, payload, rows, pretty)


def _load_tables(run, bound, threads):
    cache = cb.CubicCache(run.cache_dir)
    return {1: cache.get(bound, 1, threads), -1: cache.get(bound, -1, threads)}


@main.command()
@click.option("--x", "--X", "bound", type=int, required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.pass_obj
def cubics(run, bound, threads):
    """Build/extend the cubic field cache and report the density table cells."""
    if bound < 23:
        _fail(EXIT_INVALID, "X must be >= 23")
    try:
        tables_ = _load_tables(run, bound, threads)
    except cb.CacheCorruptionError as exc:
        _fail(EXIT_CACHE, str(exc))
    rows = []
    decades = [10 ** k for k in range(4, 12) if 10 ** k <= bound] or [bound]
    if decades[-1] != bound:
        decades.append(bound)
    for sg in (1, -1):
        table = tables_[sg]
        for coset in qd.COSETS:
            ref = float(cb.ALPHA3[(sg, coset)]) / qd.ZETA2
            cell = {"sign": "+" if sg > 0 else "-", "coset3": coset, "reference": ref}
            for X in decades:
                cnt = cb.count_by_family(table, qd.QuadFamily(sign=sg, coset3=coset, bound=X),
                                         require_3_split=(coset == 1))
                cell[f"count_{X}"] = cnt
                cell[f"rel_error_{X}"] = cnt / X / ref - 1
            rows.append(cell)
    pretty = [f"cubic fields cached: real={len(tables_[1])} complex={len(tables_[-1])} (|d_L| < {bound})"]
    for r in rows:
        pretty.append(f"{r['sign']} coset {r['coset3']}: count={r[f'count_{bound}']} "
                      f"rel={r[f'rel_error_{bound}']:+.3%}")
    out_dir = run.emit("cubics", {"X": bound}, {"cells": rows}, rows, "\n".join(pretty))
    if run.figures:
        series = {f"{r['sign']}{r['coset3']}": [r[f"rel_error_{X}"] for X in decades] for r in rows}
        rp.figure_convergence(out_dir / "convergence.png", decades, series,
                              "cubic density relative error vs reference")


@main.command("bijection-check")
@click.option("--max-abs-d", type=int, default=10000, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.pass_obj
def bijection_check(run, max_abs_d, threads):
    """Exact correspondence check: cubic counts vs the class-group oracle."""
    try:
        table = cb.CubicCache(run.cache_dir).get(max_abs_d, -1, threads)
    except cb.CacheCorruptionError as exc:
        _fail(EXIT_CACHE, str(exc))
    plain = cb.counts_per_discriminant(table, max_abs_d, split_where_coset1=False)
    split = cb.counts_per_discriminant(table, max_abs_d, split_where_coset1=True)
    mismatches = []
    checked = 0
    for d in qd.enumerate_discriminants(qd.QuadFamily(sign=-1, bound=max_abs_d)):
        d = int(d)
        data = qd.imaginary_class_group(d)
        expected = (3 ** data.rank3 - 1) // 2
        if plain.get(d, 0) != expected:
            mismatches.append({"d": d, "kind": "field-count", "got": plain.get(d, 0), "expected": expected})
        order = qd.cl_13_order(d)
        if 2 * split.get(d, 0) + 1 != order:
            mismatches.append({"d": d, "kind": "cl13", "got": 2 * split.get(d, 0) + 1, "expected": order})
        checked += 1
    payload = {"max_abs_d": max_abs_d, "discriminants_checked": checked,
               "mismatches": mismatches}
    pretty = f"{checked} discriminants checked: {len(mismatches)} mismatches"
    run.emit("bijection-check", {"max_abs_d": max_abs_d}, payload, None, pretty)
    if mismatches:
        _fail(EXIT_CHECK_FAILED, f"{len(mismatches)} bijection mismatches")


@main.command("verify-thm12")
@click.option("--x", "--X", "bound", type=int, default=10 ** 6, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.pass_obj
def verify_thm12(run, bound, threads):
    """End-to-end empirical check of the four average orders of K_2n(O_F)_3."""
    try:
        tables_ = _load_tables(run, bound, threads)
    except cb.CacheCorruptionError as exc:
        _fail(EXIT_CACHE, str(exc))
    results = kt.theorem12_run(tables_, bound)
    rows = [r.to_json() for r in results]
    pretty = []
    ok = True
    for r in results:
        pretty.append(f"n {r.n_parity:<5} {r.sign:<10} X={r.X}: empirical {float(r.empirical):.5f} "
                      f"vs {r.reference} ({r.rel_error:+.3%}, {r.sample_count} fields)")
        ok &= abs(r.rel_error) < 0.10
    out_dir = run.emit("verify-thm12", {"X": bound}, {"results": rows}, rows, "\n".join(pretty))
    if run.figures:
        rp.figure_density(out_dir / "averages.png",
                          [f"{r.n_parity}/{r.sign}" for r in results],
                          [float(r.empirical) for r in results],
                          [float(r.reference) for r in results],
                          f"average #K_2n(O_F)_3, X={bound}")
    if not ok:
        _fail(EXIT_CHECK_FAILED, "an average is off by more than 10%")


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--p", type=int, required=True)
@click.pass_obj
def kappa(run, n, p):
    """dim K_2n(Z)/p via Bernoulli numerators (conditional on Vandiver)."""
    try:
        val = kt.kappa(n, p)
    except ResourceLimitError as exc:
        _fail(EXIT_RESOURCE, str(exc))
    except ValueError as exc:
        _fail(EXIT_INVALID, str(exc))
    payload = {"n": n, "p": p, "kappa": val.value,
               "assumes_vandiver": val.assumes_vandiver,
               "vandiver_verified": val.vandiver_verified}
    pretty = (f"kappa(2n={2*n}, p={p}) = {val.value}  "
              f"[assumes Vandiver; {'verified' if val.vandiver_verified else 'unverified'} for this p]")
    run.emit("kappa", {"n": n, "p": p}, payload, [payload], pretty)


@main.command("odd-k")
@click.option("--p", type=int, required=True)
@click.option("--i", type=int, required=True)
@click.option("--d", type=int, default=None, help="quadratic field discriminant; omit for Q")
@click.pass_obj
def odd_k(run, p, i, d):
    """p-torsion dimension of the odd K-group K_{2i-1}(O_F)."""
    try:
        val = kt.odd_k_torsion(p, i, d)
    except ValueError as exc:
        _fail(EXIT_INVALID, str(exc))
    payload = {"p": p, "i": i, "d": d, "dim": val}
    run.emit("odd-k", {"p": p, "i": i, "d": d}, payload, [payload],
             f"dim K_{{{2*i-1}}}(O_F)_{p} = {val}")


@main.command()
@click.option("--p", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.pass_obj
def brauer(run, p, n, d):
    """Brauer summand dimension for the (p, n, d) family."""
    try:
        val = kt.brauer_dim(kt.LocalClassifier(p=p, n=n, d=d))
    except ValueError as exc:
        _fail(EXIT_INVALID, str(exc))
    payload = {"p": p, "n": n, "d": d, "brauer_dim": val}
    run.emit("brauer", {"p": p, "n": n, "d": d}, payload, [payload], f"brauer_dim = {val}")


@main.command()
@click.option("--p", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.pass_obj
def uvalue(run, p, n, d):
    """u-value (unit-group column deficiency) for the (p, n, d) family."""
    try:
        val = kt.u_value(kt.LocalClassifier(p=p, n=n, d=d))
    except ValueError as exc:
        _fail(EXIT_INVALID, str(exc))
    payload = {"p": p, "n": n, "d": d, "u": val}
    run.emit("uvalue", {"p": p, "n": n, "d": d}, payload, [payload], f"u = {val}")


if __name__ == "__main__":
    main()
