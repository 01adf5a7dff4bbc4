"""Command-line front end: spectrum, otoc, micro, sweep, fit.

Options resolve as flags > config file > built-in defaults. Every run gets
its own directory (explicit --out, or a timestamped one under the run
root) holding the output tables plus exactly one manifest that records the
resolved parameters, grids, diagnostics and file list. Worker threads only
compute; all file writes stay on the main thread.
"""

import argparse
import json
import os
import sys
import time

from .analysis import (DEFAULT_ENERGY_FIT_WINDOW, DEFAULT_FIELD_FIT_WINDOW,
                       DEFAULT_SIZES, AveragingConfig, dn_diagnostic,
                       microcanonical_scan, quench_sweep, scaling_gamma_epsilon,
                       scaling_gamma_lambda, scaling_mu)
from .eigensolver import eigh
from .errors import DomainError, NumericalError
from .model import LmgParams, QuenchSpec, build_hamiltonian, rescale_energies
from .otoc import commutator_series, commutator_series_micro, make_time_grid
from .output import (ResultTable, Stopwatch, emit_heatmap_dat, emit_line_dat,
                     write_csv, write_manifest, write_svg_line)
from .spin_ops import SpinSector

RUNS_ENV = "LMG_OTOC_RUNS"


class UsageError(Exception):
    """Bad or missing options; exits with code 2."""


def _parse_float_list(text):
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def _parse_int_list(text):
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(int(p) for p in parts)


def _parse_window(text):
    lo, hi = (float(p) for p in text.replace(",", " ").split())
    if not lo < hi:
        raise ValueError(f"window needs lo < hi, got {lo}, {hi}")
    return (lo, hi)


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(*allowed):
    def cast(text):
        if text not in allowed:
            raise ValueError(f"expected one of {allowed}, got {text!r}")
        return text
    return cast


# per command: option name -> (config cast, default, required)
_OPTIONS = {
    "spectrum": {
        "n": (int, None, True),
        "alpha": (float, None, True),
    },
    "otoc": {
        "n": (int, None, True),
        "alpha": (float, None, True),
        "lambda": (float, 0.0, False),
        "tmax": (float, 200.0, False),
        "dt": (float, 0.05, False),
        "state": (_choice("ground", "level"), "ground", False),
        "level": (int, None, False),
        "plot": (_parse_bool, False, False),
    },
    "micro": {
        "n": (int, None, True),
        "alpha": (float, None, True),
        "tavg": (float, 1.0e4, False),
        "dt": (float, 0.5, False),
        "sizes": (_parse_int_list, None, False),
        "plot": (_parse_bool, False, False),
    },
    "sweep": {
        "alphas": (_parse_float_list, None, True),
        "lambdas": (_parse_float_list, None, True),
        "n": (int, None, True),
        "tavg": (float, 1.0e4, False),
        "dt": (float, 0.5, False),
        "resume": (_parse_bool, False, False),
    },
    "fit": {
        "kind": (_choice("mu", "gamma-lambda", "gamma-epsilon"), None, True),
        "alpha": (float, None, True),
        "n": (int, None, False),
        "sizes": (_parse_int_list, None, False),
        "window": (_parse_window, None, False),
        "tavg": (float, 1.0e4, False),
        "dt": (float, 0.5, False),
    },
}


def _load_config(path):
    """Plain key=value lines; # starts a comment, blanks ignored."""
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _resolve_options(command, args, config):
    """flags > config file > defaults; missing required keys are fatal."""
    spec = _OPTIONS[command]
    unknown = set(config) - set(spec)
    if unknown:
        raise UsageError(f"config keys not understood by {command}: {sorted(unknown)}")
    out = {}
    for key, (cast, default, required) in spec.items():
        flag_value = getattr(args, key.replace("-", "_"), None)
        if flag_value is not None:
            out[key] = flag_value
        elif key in config:
            try:
                out[key] = cast(config[key])
            except ValueError as exc:
                raise UsageError(f"config value for {key}: {exc}") from None
        else:
            out[key] = default
        if required and out[key] is None:
            raise UsageError(f"missing required option --{key}")
    return out


def _make_run_dir(command, out_flag):
    if out_flag:
        os.makedirs(out_flag, exist_ok=True)
        return out_flag
    root = os.environ.get(RUNS_ENV, "runs")
    stamp = time.strftime("%Y%m%d-%H%M%S", time.gmtime())
    base = os.path.join(root, f"{command}-{stamp}")
    path = base
    k = 1
    while os.path.exists(path):
        path = f"{base}-{k}"
        k += 1
    os.makedirs(path)
    return path


def _json_safe(value):
    if isinstance(value, tuple):
        return list(value)
    return value


def _run_spectrum(opts, run_dir, workers):
    params = LmgParams(opts["alpha"], SpinSector(opts["n"]))
    energies = eigh(build_hamiltonian(params)).values
    rescaled = rescale_energies(energies)
    n = opts["n"]
    rows = [(i, float(e), float(e) / n, float(r))
            for i, (e, r) in enumerate(zip(energies, rescaled))]
    table = ResultTable(
        columns=("n", "energy", "energy_per_spin", "rescaled_energy"),
        units=("index", "model units", "model units", "dimensionless"),
        rows=rows)
    write_csv(os.path.join(run_dir, "spectrum.csv"), table)
    return (["spectrum.csv"], {},
            {"dimension": params.sector.dimension,
             "ground_energy_per_spin": float(energies[0]) / n})


def _run_otoc(opts, run_dir, workers):
    params = LmgParams(opts["alpha"], SpinSector(opts["n"]))
    times = make_time_grid(opts["tmax"], opts["dt"])
    if opts["state"] == "level":
        if opts["level"] is None:
            raise UsageError("--state level needs --level")
        if opts["lambda"] != 0.0:
            raise DomainError(
                "eigenstate traces evolve under the bare Hamiltonian; "
                "a nonzero --lambda is inconsistent with --state level")
        series = commutator_series_micro(params, opts["level"], times)
    else:
        series = commutator_series(QuenchSpec(params, opts["lambda"]), times)

    rows = list(zip((float(t) for t in series.times),
                    series.f_values.real.tolist(),
                    series.f_values.imag.tolist(),
                    series.c_values.tolist(),
                    series.a_values.real.tolist()))
    table = ResultTable(
        columns=("t", "re_f", "im_f", "c", "re_a"),
        units=("time", "dimensionless", "dimensionless", "dimensionless",
               "dimensionless"),
        rows=rows)
    write_csv(os.path.join(run_dir, "otoc.csv"), table)
    emit_line_dat(os.path.join(run_dir, "otoc.dat"),
                  series.times, series.f_values.real)
    outputs = ["otoc.csv", "otoc.dat"]
    if opts["plot"]:
        write_svg_line(os.path.join(run_dir, "otoc.svg"),
                       series.times, series.f_values.real,
                       x_label="t [time]", y_label="re_f [dimensionless]",
                       title=series.state_label)
        outputs.append("otoc.svg")
    grid = {"tmax": float(times[-1]), "dt": opts["dt"], "samples": int(times.size)}
    diag = {"protocol": series.protocol,
            "max_abs_im_f": float(abs(series.f_values.imag).max()),
            "min_c": float(series.c_values.min()),
            "min_c_norm": float(series.c_norm_values.min())}
    return outputs, grid, diag


def _run_micro(opts, run_dir, workers):
    params = LmgParams(opts["alpha"], SpinSector(opts["n"]))
    config = AveragingConfig(opts["tavg"], opts["dt"])
    scan = microcanonical_scan(params, config)
    rows = [(i, float(scan.energies_per_spin[i]), float(scan.rescaled[i]),
             float(scan.fbar_raw[i]), float(scan.fbar_norm[i]))
            for i in range(scan.energies.size)]
    table = ResultTable(
        columns=("n", "energy_per_spin", "rescaled_energy",
                 "fbar_n_raw", "fbar_n_norm"),
        units=("index", "model units", "dimensionless", "dimensionless",
               "dimensionless"),
        rows=rows)
    write_csv(os.path.join(run_dir, "micro.csv"), table)
    emit_line_dat(os.path.join(run_dir, "micro.dat"),
                  scan.rescaled, scan.fbar_norm)
    outputs = ["micro.csv", "micro.dat"]
    if opts["plot"]:
        write_svg_line(os.path.join(run_dir, "micro.svg"),
                       scan.rescaled, scan.fbar_norm,
                       x_label="rescaled_energy [dimensionless]",
                       y_label="fbar_n_norm [dimensionless]",
                       title=f"alpha={opts['alpha']}, N={opts['n']}")
        outputs.append("micro.svg")
    if opts["sizes"]:
        scans = [scan if s == opts["n"] else microcanonical_scan(
            LmgParams(opts["alpha"], SpinSector(s)), config)
            for s in opts["sizes"]]
        pairs = dn_diagnostic(opts["alpha"], opts["sizes"], config, scans=scans)
        dn_rows = [(n, d.n_c, d.window[0], d.window[1], d.value)
                   for n, d in pairs]
        dn_table = ResultTable(
            columns=("n_spins", "n_c", "window_lo", "window_hi", "dn"),
            units=("count", "index", "index", "index", "dimensionless"),
            rows=dn_rows)
        write_csv(os.path.join(run_dir, "dn.csv"), dn_table)
        outputs.append("dn.csv")
    grid = {"total_time": opts["tavg"], "dt": opts["dt"],
            "samples": int(config.time_grid().size)}
    diag = {"reference_fbar": float(scan.fbar_raw[0]),
            "critical_rescaled": float(scan.critical_rescaled),
            "flagged_levels": int(scan.flagged.sum())}
    return outputs, grid, diag


def _run_sweep(opts, run_dir, workers):
    config = AveragingConfig(opts["tavg"], opts["dt"])
    cells_path = os.path.join(run_dir, "cells.jsonl")
    precomputed = {}
    if opts["resume"] and os.path.exists(cells_path):
        with open(cells_path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                precomputed[(rec["alpha"], rec["lambda"])] = (
                    rec["fbar_raw"], rec["halfwidth"])

    with open(cells_path, "a") as checkpoint:
        def on_cell(alpha, lam, raw, halfwidth):
            checkpoint.write(json.dumps(
                {"alpha": alpha, "lambda": lam,
                 "fbar_raw": raw, "halfwidth": halfwidth}) + "\n")
            checkpoint.flush()

        grid = quench_sweep(opts["alphas"], opts["lambdas"], opts["n"], config,
                            max_workers=workers, precomputed=precomputed,
                            on_cell=on_cell)

    rows = []
    heat_rows = []
    for i, a in enumerate(grid.alphas):
        lam_c = grid.lambda_c[i]
        if lam_c is None:
            print(f"warning: critical field undefined at alpha={a}; "
                  f"overlay left empty", file=sys.stderr)
        if a in grid.row_errors:
            print(f"warning: {grid.row_errors[a]}", file=sys.stderr)
        for j, lam in enumerate(grid.lambdas):
            cell = grid.cells[i][j]
            if cell is None:
                rows.append((a, lam, "", "", "", lam_c if lam_c is not None else ""))
                continue
            rows.append((a, lam, cell.raw, cell.value, cell.halfwidth,
                         lam_c if lam_c is not None else ""))
            heat_rows.append((a, lam, cell.value))
    table = ResultTable(
        columns=("alpha", "lambda", "fbar_raw", "fbar_norm", "halfwidth",
                 "lambda_c"),
        units=("dimensionless", "field", "dimensionless", "dimensionless",
               "dimensionless", "field"),
        rows=rows)
    write_csv(os.path.join(run_dir, "sweep.csv"), table)
    heat_table = ResultTable(columns=("alpha", "lambda", "fbar_norm"),
                             units=("dimensionless", "field", "dimensionless"),
                             rows=heat_rows)
    emit_heatmap_dat(os.path.join(run_dir, "heatmap.dat"), heat_table)
    outputs = ["sweep.csv", "heatmap.dat", "cells.jsonl"]
    flagged = sum(1 for row in grid.cells for c in row
                  if c is not None and c.flagged)
    grid_spec = {"total_time": opts["tavg"], "dt": opts["dt"],
                 "samples": int(config.time_grid().size)}
    diag = {"cells": len(grid.alphas) * len(grid.lambdas),
            "flagged_cells": flagged,
            "aborted_alphas": sorted(grid.row_errors)}
    return outputs, grid_spec, diag


def _run_fit(opts, run_dir, workers):
    config = AveragingConfig(opts["tavg"], opts["dt"])
    kind = opts["kind"]
    if kind == "mu":
        sizes = opts["sizes"] or DEFAULT_SIZES
        fit = scaling_mu(opts["alpha"], sizes, config, max_workers=workers)
        point_cols, point_units = ("n_spins", "fbar_raw"), ("count", "dimensionless")
    elif kind == "gamma-lambda":
        n = opts["n"] or 400
        window = opts["window"] or DEFAULT_FIELD_FIT_WINDOW
        fit = scaling_gamma_lambda(opts["alpha"], n, config=config,
                                   window=window, max_workers=workers)
        point_cols, point_units = (("field_distance", "fbar_norm"),
                                   ("field", "dimensionless"))
    else:
        n = opts["n"] or 300
        window = opts["window"] or DEFAULT_ENERGY_FIT_WINDOW
        fit = scaling_gamma_epsilon(opts["alpha"], n, config=config,
                                    window=window)
        point_cols, point_units = (("energy_distance", "fbar_norm"),
                                   ("dimensionless", "dimensionless"))

    doc = {"kind": kind, "exponent": fit.exponent,
           "exponent_stderr": fit.exponent_stderr, "amplitude": fit.amplitude,
           "window": list(fit.window), "n_points": fit.n_points}
    with open(os.path.join(run_dir, "fit.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    points = ResultTable(columns=point_cols, units=point_units,
                         rows=list(zip(fit.xs.tolist(), fit.ys.tolist())))
    write_csv(os.path.join(run_dir, "points.csv"), points)
    grid_spec = {"total_time": opts["tavg"], "dt": opts["dt"],
                 "samples": int(config.time_grid().size)}
    return (["fit.json", "points.csv"], grid_spec,
            {"exponent": fit.exponent, "n_points": fit.n_points})


_RUNNERS = {
    "spectrum": _run_spectrum,
    "otoc": _run_otoc,
    "micro": _run_micro,
    "sweep": _run_sweep,
    "fit": _run_fit,
}


def _add_common(sp):
    sp.add_argument("--out", help="run directory (default: timestamped under "
                                  f"the run root, ${RUNS_ENV} or ./runs)")
    sp.add_argument("--config", help="key=value file supplying option defaults")
    sp.add_argument("--workers", type=int,
                    help="worker-thread count (default: $LMG_OTOC_WORKERS "
                         "or machine parallelism)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lmg-otoc",
        description="Out-of-time-order correlators for a collective-spin "
                    "model: exact spectra, time traces, long-time-average "
                    "order-parameter sweeps and scaling fits.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="eigenvalue table")
    sp.add_argument("--n", type=int, help="number of spins")
    sp.add_argument("--alpha", type=float, help="model parameter in [0, 1]")
    _add_common(sp)

    sp = sub.add_parser("otoc", help="time trace of F, A and C")
    sp.add_argument("--n", type=int, help="number of spins")
    sp.add_argument("--alpha", type=float, help="model parameter in [0, 1]")
    sp.add_argument("--lambda", dest="lambda_", type=float,
                    help="quench field strength (default 0)")
    sp.add_argument("--tmax", type=float, help="trace horizon (default 200)")
    sp.add_argument("--dt", type=float, help="sample spacing (default 0.05)")
    sp.add_argument("--state", choices=("ground", "level"),
                    help="initial state: bare ground state (default) or an "
                         "eigenstate picked by --level")
    sp.add_argument("--level", type=int, help="eigenstate index for --state level")
    sp.add_argument("--plot", action="store_const", const=True,
                    help="also write an SVG of Re F(t)")
    _add_common(sp)

    sp = sub.add_parser("micro", help="per-eigenstate long-time averages")
    sp.add_argument("--n", type=int, help="number of spins")
    sp.add_argument("--alpha", type=float, help="model parameter in [0, 1]")
    sp.add_argument("--tavg", type=float, help="averaging horizon (default 1e4)")
    sp.add_argument("--dt", type=float, help="averaging step (default 0.5)")
    sp.add_argument("--sizes", type=_parse_int_list,
                    help="comma-separated sizes for the near-critical "
                         "spread summary")
    sp.add_argument("--plot", action="store_const", const=True,
                    help="also write an SVG of the level profile")
    _add_common(sp)

    sp = sub.add_parser("sweep", help="normalized averages over an "
                                      "(alpha, lambda) grid")
    sp.add_argument("--alphas", type=_parse_float_list,
                    help="comma-separated alpha values")
    sp.add_argument("--lambdas", type=_parse_float_list,
                    help="comma-separated field strengths")
    sp.add_argument("--n", type=int, help="number of spins")
    sp.add_argument("--tavg", type=float, help="averaging horizon (default 1e4)")
    sp.add_argument("--dt", type=float, help="averaging step (default 0.5)")
    sp.add_argument("--resume", action="store_const", const=True,
                    help="reuse per-cell results already checkpointed in --out")
    _add_common(sp)

    sp = sub.add_parser("fit", help="power-law exponent fits")
    sp.add_argument("--kind", choices=("mu", "gamma-lambda", "gamma-epsilon"),
                    help="which exponent to fit")
    sp.add_argument("--alpha", type=float, help="model parameter in [0, 1]")
    sp.add_argument("--n", type=int, help="system size for the gamma fits")
    sp.add_argument("--sizes", type=_parse_int_list,
                    help="comma-separated sizes for the mu fit")
    sp.add_argument("--window", type=_parse_window,
                    help="fit window lo,hi on the fitting abscissa")
    sp.add_argument("--tavg", type=float, help="averaging horizon (default 1e4)")
    sp.add_argument("--dt", type=float, help="averaging step (default 0.5)")
    _add_common(sp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = _load_config(args.config) if args.config else {}
        # argparse cannot use "lambda" as an attribute name
        if hasattr(args, "lambda_"):
            setattr(args, "lambda", args.lambda_)
        opts = _resolve_options(args.command, args, config)
        run_dir = _make_run_dir(args.command, args.out)
        runner = _RUNNERS[args.command]
        with Stopwatch() as watch:
            outputs, time_grid, diagnostics = runner(opts, run_dir, args.workers)
        resolved = {k: _json_safe(v) for k, v in opts.items()}
        resolved["workers"] = args.workers
        resolved["config_file"] = args.config
        write_manifest(os.path.join(run_dir, "manifest.json"), args.command,
                       resolved, time_grid, diagnostics, watch.elapsed, outputs)
        print(run_dir)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
