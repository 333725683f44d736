"""
Command-line surface:

    poisswell run <config>      run one experiment described by the config
    poisswell ladder <config>   force the epsilon-ladder experiment
    poisswell plot <report>     emit gnuplot scripts for an existing report

Exit codes: 0 success, 2 blow-up detected (artifacts still written),
1 any other error.  POISSWELL_OUT overrides the output root.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import plots
from .config import RunConfig, config_as_dict, parse_config, serialize_config
from .diagnostics import MonitorThresholds
from .errors import PoisswellError
from .harness import (
    density_current_limit,
    epsilon_ladder,
    monokinetic_study,
    spinor_vs_wkb,
)
from .hydro import run_hydro
from .io import Manifest, records_to_csv, write_field, write_jsonl, write_json
from .pauli_solver import PauliSolver
from .states import reconstruct_spinor
from .wigner import export_slice_csv, wigner_slice

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BLOWUP = 2


def _output_dir(cfg: RunConfig, override=None):
    root = override or cfg.out_dir or os.environ.get("POISSWELL_OUT") or "poisswell-out"
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _thresholds(cfg: RunConfig):
    return MonitorThresholds(ratio=cfg.threshold_ratio, tail=cfg.threshold_tail)


def _dump_records(manifest, records, stem):
    docs = [r.as_dict() for r in records]
    write_jsonl(manifest.path(f"{stem}.jsonl", "diagnostics"), docs)
    records_to_csv(manifest.path(f"{stem}.csv", "diagnostics-csv"), docs)
    return docs


def _write_snapshots(manifest, grid, run, stem):
    # one file per sampled time; the cadence is the run's sample_every
    for i, t in enumerate(run.times):
        data = run.snapshots[i] if hasattr(run, "snapshots") else run.states[i].a
        write_field(manifest.path(f"{stem}_{i:04d}.pwf", "snapshot", t=t), data)


def _run_single(cfg: RunConfig, out: Path, manifest: Manifest):
    grid = cfg.build_grid()
    thresholds = _thresholds(cfg)
    if cfg.kind == "pauli":
        params = cfg.sim_params()
        init = cfg.build_initial(grid)
        psi0 = reconstruct_spinor(grid, init)
        run = PauliSolver(grid, params).run(psi0)
        docs = _dump_records(manifest, run.records, "diagnostics")
        _write_snapshots(manifest, grid, run, "psi")
        summary = {
            "kind": cfg.kind,
            "status": run.status,
            "stop_reason": run.stop_reason,
            "final_time": run.times[-1],
            "dt": run.dt,
            "charge_drift": run.charge_drift,
        }
    else:
        eps = 0.0 if cfg.kind == "euler" else cfg.epsilon
        params = cfg.sim_params(epsilon=eps)
        init = cfg.build_initial(grid, epsilon=eps)
        run = run_hydro(grid, init, params, thresholds)
        docs = _dump_records(manifest, run.records, "diagnostics")
        _write_snapshots(manifest, grid, run, "amplitude")
        from .diagnostics import envelope_check

        env = envelope_check(run.records, cfg.s)
        summary = {
            "kind": cfg.kind,
            "status": run.status,
            "stop_reason": run.stop_reason,
            "final_time": run.times[-1],
            "dt": run.dt,
            "charge_drift": run.charge_drift,
            "envelope_constant": env.constant,
            "envelope_passed": env.passed,
            "final_norms": {
                "charge": run.records[-1].charge,
                "xs": run.records[-1].xs,
                "monitor": run.records[-1].monitor,
            },
        }
    report_path = manifest.path("report.json", "report")
    write_json(report_path, {"config": config_as_dict(cfg), "summary": summary})
    plots.emit_diagnostics_timeseries(
        docs, manifest.path("diagnostics.gp", "plot-script")
    )
    return EXIT_BLOWUP if summary["status"] == "blowup" else EXIT_OK, summary


def _run_ladder(cfg: RunConfig, out: Path, manifest: Manifest, with_wigner: bool):
    grid = cfg.build_grid()
    params = cfg.sim_params()
    init = cfg.build_initial(grid)
    report, runs = epsilon_ladder(
        grid,
        init,
        params,
        cfg.epsilons,
        n_samples=cfg.ladder_samples,
        thresholds=_thresholds(cfg),
        threads=cfg.threads,
    )
    doc = report.as_dict()
    doc["density_current"] = density_current_limit(runs, report)
    base_points = cfg.default_base_points(grid)
    mono = monokinetic_study(runs, base_points)
    doc["monokinetic"] = mono.as_dict()
    if with_wigner and mono.slice_data is not None:
        export_slice_csv(
            mono.slice_data, manifest.path("wigner_final.csv", "wigner-slice")
        )
        init_min = init.copy()
        init_min.epsilon = mono.slice_epsilon
        psi = reconstruct_spinor(grid, init_min)
        slc = wigner_slice(grid, psi, mono.slice_epsilon, base_points)
        export_slice_csv(slc, manifest.path("wigner_initial.csv", "wigner-slice"))

    report_path = manifest.path("report.json", "report")
    write_json(report_path, {"config": config_as_dict(cfg), "ladder": doc})
    write_json(
        manifest.path("timings.json", "timings"),
        {"wall_clock_per_rung": [r.wall_clock for r in report.rungs]},
    )
    rows = [
        {
            "epsilon": r.epsilon,
            "xs_error": r.xs_error,
            "rho_error": r.rho_error,
            "current_error": r.current_error,
            "eps_term_norm": r.eps_term_norm,
        }
        for r in report.rungs
    ]
    records_to_csv(manifest.path("ladder.csv", "ladder-csv"), rows)
    plots.emit_loglog_errors(doc, manifest.path("errors.gp", "plot-script"))
    status = EXIT_OK if report.euler_status == "completed" else EXIT_BLOWUP
    return status, {"slopes": doc["slopes"], "degenerate": doc["degenerate"]}


def _run_spinor_vs_wkb(cfg: RunConfig, out: Path, manifest: Manifest):
    grid = cfg.build_grid()
    params = cfg.sim_params()
    init = cfg.build_initial(grid)
    rep = spinor_vs_wkb(grid, init, params, thresholds=_thresholds(cfg))
    write_json(
        manifest.path("report.json", "report"),
        {"config": config_as_dict(cfg), "comparison": rep.as_dict()},
    )
    return EXIT_OK, {"max_distance": max(rep.distances)}


def run_command(cfg: RunConfig, out_override=None):
    out = _output_dir(cfg, out_override)
    manifest = Manifest(out)
    manifest.path("config.txt", "config")
    (out / "config.txt").write_text(serialize_config(cfg), encoding="utf-8")
    started = time.perf_counter()
    if cfg.kind in ("pauli", "wkb", "euler"):
        code, summary = _run_single(cfg, out, manifest)
    elif cfg.kind in ("ladder", "monokinetic"):
        code, summary = _run_ladder(cfg, out, manifest, with_wigner=cfg.kind == "monokinetic")
    elif cfg.kind == "spinor-vs-wkb":
        code, summary = _run_spinor_vs_wkb(cfg, out, manifest)
    else:  # pragma: no cover - validate() guards this
        raise PoisswellError(f"unhandled kind {cfg.kind}")
    manifest.write(extra={"elapsed_seconds": time.perf_counter() - started})
    return code, summary


def plot_command(report_path, out_override=None):
    path = Path(report_path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    out = Path(out_override) if out_override else path.parent
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "ladder" in doc:
        written.append(plots.emit_loglog_errors(doc["ladder"], out / "errors.gp"))
        mono = doc["ladder"].get("monokinetic", {})
        written.append(plots.emit_wigner_heat(mono, out / "wigner.gp"))
    jsonl = path.parent / "diagnostics.jsonl"
    if jsonl.exists():
        from .io import read_jsonl

        written.append(
            plots.emit_diagnostics_timeseries(read_jsonl(jsonl), out / "diagnostics.gp")
        )
    if not written:
        written.append(plots.emit_wigner_heat({}, out / "wigner.gp"))
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="poisswell",
        description="Pauli-Poisswell / Euler-Poisswell simulation laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "ladder"):
        p = sub.add_parser(name, help=f"{name} an experiment from a config file")
        p.add_argument("config", help="path to a config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--sample-every", type=int, default=None)
    p = sub.add_parser("plot", help="emit plot scripts for an existing report")
    p.add_argument("report", help="path to a report.json")
    p.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    try:
        if args.command == "plot":
            for path in plot_command(args.report, args.out):
                print(path)
            return EXIT_OK
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text)
        if args.command == "ladder":
            cfg = replace(cfg, kind="ladder")
            cfg.validate()
        if args.threads is not None:
            cfg = replace(cfg, threads=args.threads)
        if args.sample_every is not None:
            cfg = replace(cfg, sample_every=args.sample_every)
        code, summary = run_command(cfg, args.out)
        print(json.dumps(summary, sort_keys=True, default=str))
        return code
    except PoisswellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
