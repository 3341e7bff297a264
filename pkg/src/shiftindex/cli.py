"""The workbench command line: experiment orchestration and reporting.

Commands (all take --config, optionally --out and --seed):

* check-group: growth census and Diophantine margin sweep for the group.
* ellipticity: the symbol's ellipticity certificate.
* index: both index computations, full report.
* verify: index plus the agreement gate (nonzero exit on disagreement).
* sweep: rerun the index while varying one numeric knob; delimited output.

Exit codes: 0 success/agreement, 2 parse error, 3 not elliptic, 4 unstable
numerics, 5 index disagreement.  Reports are written as a human-readable
text document plus a machine-readable JSON mirror; identical config and seed
produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import group_model as gm
from .chern_index import ProjectionError, ClosednessError
from .config import ConfigParseError, ExperimentConfig, emit_config, load_config
from .fredholm import UnstableIndex
from .index_engine import IndexReport, PairingError, cohomological_index
from .symbol_calc import InversionError, NotElliptic, is_elliptic, symbol_of

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_ELLIPTIC = 3
EXIT_UNSTABLE = 4
EXIT_DISAGREE = 5


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and (np.isinf(obj) or np.isnan(obj)):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    return obj


def _write_report(out_dir: str, stem: str, human: str, payload: dict):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}.txt").write_text(human, encoding="utf-8")
    (out / f"{stem}.json").write_text(
        json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _report_lines_index(report: IndexReport, seed: int) -> list[str]:
    lines = [
        "index report",
        "============",
        f"cohomological value : {report.cohomological_value.real:+.12e} {report.cohomological_value.imag:+.3e}i",
        f"rounded integer     : {report.rounded}",
        f"analytic index      : {report.analytic.index} (stable: {report.analytic.stable})",
        f"agreement           : {report.agreement}",
        f"residual (imag)     : {report.residual_imag:.3e}",
        f"residual (integer)  : {report.residual_integer:.3e}",
        "",
        "ellipticity certificate:",
        f"  verdict  : {report.certificate.verdict}",
        f"  s_min    : {report.certificate.s_min:.6e} (tol {report.certificate.tol:.1e}, drift {report.certificate.drift:.2%})",
        f"  history  : " + ", ".join(f"N={n}: {v:.6e}" for n, v in zip(report.certificate.cutoffs, report.certificate.history)),
        "",
        "analytic (singular-value) history:",
    ]
    for h in report.analytic.history:
        lines.append(
            f"  N={h.cutoff:4d}: index={h.index:+d} ker={h.kernel_dim} coker={h.cokernel_dim} "
            f"gap={h.gap:.2e} raw_small={h.raw_small}"
        )
    lines += ["", "per-class contributions:"]
    for g0, v in sorted(report.per_class.items()):
        lines.append(f"  g0={g0}: {complex(v).real:+.6e} {complex(v).imag:+.3e}i")
    lines += ["", "discarded-mass ledger:"]
    for k, v in sorted(report.discarded_masses.items()):
        lines.append(f"  {k}: {v:.3e}")
    d = report.diagnostics
    lines += [
        "",
        "pipeline diagnostics:",
        f"  idempotency defect     : {d['projection_defect']:.3e}",
        f"  hermiticity defect     : {d['projection_hermiticity']:.3e}",
        f"  smoothness (beta tail) : {d['projection_smoothness']:.3e}",
        f"  curvature support def. : {d['curvature_support_defect']:.3e}",
        f"  mollify iterations     : {d['mollify']['iterations']} (drift {d['mollify']['drift']:.3e})",
        "",
        "configuration snapshot:",
    ]
    for k, v in sorted(report.config_snapshot.items()):
        lines.append(f"  {k} = {v}")
    lines.append(f"  seed = {seed}")
    lines.append("")
    return lines


def _run_index(config: ExperimentConfig, seed: int):
    spec = config.group_spec()
    D = config.shift_operator(spec)
    nc = config.numerics
    return cohomological_index(
        D,
        schedule=nc.cutoffs,
        sv_tol=nc.sv_tol,
        grid=nc.grid,
        window_radius=nc.window,
        ellipticity_tol=nc.ellipticity_tol,
        invert_tol=nc.invert_tol,
        idempotent_tol=nc.idempotent_tol,
        mollifier_cells=nc.mollifier_cells,
        taper_fraction=nc.taper_fraction,
        quadrature_points=nc.quadrature_points or None,
    )


def cmd_check_group(config: ExperimentConfig, out_dir: str, seed: int) -> int:
    spec = config.group_spec()
    g = config.group
    kmax = g.census_kmax or (64 if spec.kind == gm.DENSE else max(10, 3 * spec.order))
    counts, degree = gm.growth_census(spec, kmax)
    worst_k, worst_margin, satisfied = gm.diophantine_sweep(spec, g.dioph_kmax, g.dioph_c, g.dioph_n)
    payload = {
        "group": {"kind": spec.kind, "theta": spec.theta, "order": spec.order,
                  "generators": spec.generators},
        "census": {"kmax": kmax, "counts": counts.tolist(), "fitted_degree": degree},
        "diophantine": {
            "C": g.dioph_c, "N": g.dioph_n, "kmax": g.dioph_kmax,
            "worst_k": worst_k, "worst_margin": worst_margin, "satisfied": satisfied,
        },
        "seed": seed,
    }
    if spec.kind == gm.DENSE:
        dens = gm.convergent_denominators(spec.theta, g.dioph_kmax)
        oracle = [(q,) + gm.diophantine_margin(spec, q, g.dioph_c, g.dioph_n) for q in dens]
        worst_oracle = min(oracle, key=lambda t: t[1]) if oracle else None
        payload["diophantine"]["convergent_denominators"] = dens
        payload["diophantine"]["oracle_worst"] = worst_oracle
    lines = [
        "group hypothesis report",
        "=======================",
        f"kind: {spec.kind}  theta: {spec.theta}  order: {spec.order}  generators: {spec.generators}",
        f"growth census (k <= {kmax}): {counts.tolist()}",
        f"fitted polynomial degree: {degree:.4f}",
        f"diophantine sweep (C={g.dioph_c}, N={g.dioph_n}, k <= {g.dioph_kmax}):",
        f"  worst k: {worst_k}  worst margin: {worst_margin}",
        f"  satisfied: {satisfied}",
        "",
    ]
    _write_report(out_dir, "check-group", "\n".join(lines), payload)
    print("\n".join(lines))
    return EXIT_OK if satisfied else EXIT_UNSTABLE


def cmd_ellipticity(config: ExperimentConfig, out_dir: str, seed: int) -> int:
    spec = config.group_spec()
    D = config.shift_operator(spec)
    cert = is_elliptic(symbol_of(D), tol=config.numerics.ellipticity_tol,
                       schedule=config.numerics.cutoffs)
    payload = {"certificate": cert, "seed": seed}
    lines = [
        "ellipticity certificate",
        "=======================",
        f"verdict : {cert.verdict}",
        f"s_min   : {cert.s_min:.6e} (tol {cert.tol:.1e})",
        f"drift   : {cert.drift:.2%}",
        "history : " + ", ".join(f"N={n}: {v:.6e}" for n, v in zip(cert.cutoffs, cert.history)),
        "",
    ]
    _write_report(out_dir, "ellipticity", "\n".join(lines), payload)
    print("\n".join(lines))
    return EXIT_OK if cert.elliptic else EXIT_NOT_ELLIPTIC


def cmd_index(config: ExperimentConfig, out_dir: str, seed: int, gate: bool) -> int:
    try:
        report = _run_index(config, seed)
    except NotElliptic as exc:
        lines = ["not Fredholm: symbol is not certified elliptic", str(exc), ""]
        _write_report(out_dir, "index", "\n".join(lines), {"error": str(exc), "certificate": exc.certificate, "seed": seed})
        print("\n".join(lines))
        return EXIT_NOT_ELLIPTIC
    except (UnstableIndex, PairingError, ProjectionError, InversionError, ClosednessError) as exc:
        stage = type(exc).__name__
        lines = [f"unstable numerics in stage {stage}:", str(exc), ""]
        _write_report(out_dir, "index", "\n".join(lines), {"error": str(exc), "stage": stage, "seed": seed})
        print("\n".join(lines))
        return EXIT_UNSTABLE
    lines = _report_lines_index(report, seed)
    payload = {
        "cohomological_value": report.cohomological_value,
        "rounded": report.rounded,
        "per_class": {str(k): v for k, v in report.per_class.items()},
        "analytic": report.analytic,
        "certificate": report.certificate,
        "agreement": report.agreement,
        "residual_imag": report.residual_imag,
        "residual_integer": report.residual_integer,
        "discarded_masses": report.discarded_masses,
        "diagnostics": report.diagnostics,
        "config_snapshot": report.config_snapshot,
        "config_echo": emit_config(config),
        "seed": seed,
    }
    _write_report(out_dir, "verify" if gate else "index", "\n".join(lines), payload)
    print("\n".join(lines))
    if gate:
        if not report.analytic.stable or not report.certificate.elliptic:
            return EXIT_UNSTABLE
        if not report.agreement:
            return EXIT_DISAGREE
    return EXIT_OK


def cmd_sweep(config: ExperimentConfig, out_dir: str, seed: int, param: str, values: list) -> int:
    nc = config.numerics
    rows = []
    for raw in values:
        if param == "cutoff":
            v = int(raw)
            schedule = tuple(sorted({max(8, v // 4), max(12, v // 2), v}))
            nc2 = {"cutoffs": schedule}
        elif param == "grid":
            v = int(raw)
            nc2 = {"grid": (v, v)}
        elif param == "window":
            v = int(raw)
            nc2 = {"window": v}
        elif param == "mollifier":
            v = float(raw)
            nc2 = {"mollifier_cells": v}
        else:
            print(f"unknown sweep parameter {param!r}", file=sys.stderr)
            return EXIT_PARSE
        from dataclasses import replace
        cfg2 = ExperimentConfig(config.group, config.operator, replace(nc, **nc2), config.run)
        try:
            report = _run_index(cfg2, seed)
        except NotElliptic:
            return EXIT_NOT_ELLIPTIC
        except (UnstableIndex, PairingError, ProjectionError, InversionError, ClosednessError) as exc:
            print(f"unstable numerics at {param}={raw}: {exc}", file=sys.stderr)
            return EXIT_UNSTABLE
        rows.append({
            "param": param,
            "value": raw,
            "cohomological_re": report.cohomological_value.real,
            "cohomological_im": report.cohomological_value.imag,
            "rounded": report.rounded,
            "analytic": report.analytic.index,
            "agreement": report.agreement,
            "residual_integer": report.residual_integer,
            "residual_imag": report.residual_imag,
            "discarded_total": sum(report.discarded_masses.values()),
        })
    header = list(rows[0].keys())
    text_rows = ["\t".join(header)]
    for r in rows:
        text_rows.append("\t".join(
            f"{r[k]:.6e}" if isinstance(r[k], float) else str(r[k]) for k in header
        ))
    table = "\n".join(text_rows) + "\n"
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.tsv").write_text(table, encoding="utf-8")
    _write_report(out_dir, "sweep", table, {"rows": rows, "seed": seed})
    print(table, end="")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="numerical index workbench for operators with shifts on the circle",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check-group", "ellipticity", "index", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
    p = sub.add_parser("sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--param", required=True, choices=("cutoff", "grid", "window", "mollifier"))
    p.add_argument("--values", required=True, help="comma-separated values")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
    except ConfigParseError as exc:
        print("config errors:", file=sys.stderr)
        for err in exc.errors:
            print(f"  {err}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE

    out_dir = args.out or config.run.out_dir
    seed = args.seed if args.seed is not None else config.run.seed

    if args.command == "check-group":
        return cmd_check_group(config, out_dir, seed)
    if args.command == "ellipticity":
        return cmd_ellipticity(config, out_dir, seed)
    if args.command == "index":
        return cmd_index(config, out_dir, seed, gate=False)
    if args.command == "verify":
        return cmd_index(config, out_dir, seed, gate=True)
    if args.command == "sweep":
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        return cmd_sweep(config, out_dir, seed, args.param, values)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
