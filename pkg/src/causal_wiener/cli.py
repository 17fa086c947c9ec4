"""Command line entry point: ``causal-wiener <subcommand> ...``.

Tabular subcommands print CSV to stdout, or write ``report.csv`` and
``summary.json`` into ``--out`` when it is given.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import CausalWienerError
from .experiments import (DEFAULT_TOLERANCES, REPORT_COLUMNS, ExperimentConfig, baxter_grid_check,
                          dumps, parse_grid, rows_to_csv, run_experiment, write_report)
from .filters import FilterSpec, hhat_finite, hhat_infinite, shift_filter
from .lm_expansion import estimate_constants, finite_predictor_series
from .mspe import sigma_tilde
from .predictor import finite_predictor_coeffs, infinite_predictor_coeffs
from .process import ProcessSpec, ar_inf_coeffs, autocovariance, ma_inf_coeffs

MSPE_COLUMNS = ("n", "l1_diff", "sigma_tilde", "sigma", "bound1", "bound2", "rho_n")


def _load_json(value: str) -> dict:
    """Inline JSON object or path to a JSON file."""
    text = value if value.lstrip().startswith("{") else Path(value).read_text(encoding="utf-8")
    return json.loads(text)


def _process(args) -> ProcessSpec:
    if not args.process:
        raise SystemExit("--process is required")
    return ProcessSpec.from_dict(_load_json(args.process))


def _filter(args) -> FilterSpec:
    if not args.filter:
        return shift_filter(1)
    return FilterSpec.from_dict(_load_json(args.filter))


def _tolerances(items: list[str] | None) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or name not in DEFAULT_TOLERANCES:
            raise SystemExit(f"bad --tol {item!r}; names: {', '.join(sorted(DEFAULT_TOLERANCES))}")
        out[name] = float(value)
    return out


def _config(args) -> ExperimentConfig:
    if getattr(args, "config", None):
        data = _load_json(args.config)
    else:
        data = {"process": _load_json(args.process) if args.process else None,
                "filter": _filter(args).to_dict()}
        if data["process"] is None:
            raise SystemExit("--process or --config is required")
    for key in ("n_grid", "m_grid"):
        value = getattr(args, key, None)
        if value:
            data[key] = parse_grid(value)
    for key in ("epsilon", "r", "n2"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    tols = _tolerances(getattr(args, "tol", None))
    if tols:
        data["tolerances"] = {**data.get("tolerances", {}), **tols}
    return ExperimentConfig.from_dict(data)


def _emit(args, rows: list[dict], columns, summary: dict | None = None) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows, columns))
        with open(out / "summary.json", "w", encoding="utf-8") as fh:
            fh.write(dumps(summary or {}))
    else:
        sys.stdout.write(rows_to_csv(rows, columns))


# ---------------------------------------------------------------------------
# subcommands

def cmd_coeffs(args) -> int:
    spec = _process(args)
    psi = ma_inf_coeffs(spec, args.len + 1)
    phi = ar_inf_coeffs(spec, args.len + 1)
    gamma = autocovariance(spec, args.len)
    rows = [{"k": k, "psi": psi.values[k], "phi": phi.values[k], "gamma": gamma.gamma[k]}
            for k in range(args.len + 1)]
    summary = {"process": spec.to_dict(), "psi_tail_bound": psi.tail_bound,
               "phi_tail_bound": phi.tail_bound, "gamma_method": gamma.method,
               "gamma_error_bound": gamma.error_bound}
    _emit(args, rows, ("k", "psi", "phi", "gamma"), summary)
    return 0


def cmd_predict(args) -> int:
    spec = _process(args)
    m, n = args.m, args.n
    gamma = autocovariance(spec, n + m + 1)
    psi = ma_inf_coeffs(spec, m)
    phi = ar_inf_coeffs(spec, n + m + 1)
    inf = infinite_predictor_coeffs(psi, phi, m, n).coeffs
    if args.method == "series":
        fin = finite_predictor_series(spec, n, m).values
    else:
        fin = finite_predictor_coeffs(gamma, m, n).coeffs
    rows = [{"k": k + 1, "phi_inf": inf[k], "phi_fin": fin[k], "abs_diff": abs(fin[k] - inf[k])}
            for k in range(n)]
    summary = {"process": spec.to_dict(), "m": m, "n": n, "method": args.method,
               "l1_diff": float(np.abs(fin - inf).sum())}
    _emit(args, rows, ("k", "phi_inf", "phi_fin", "abs_diff"), summary)
    return 0


def cmd_filter(args) -> int:
    spec, filt = _process(args), _filter(args)
    n = args.n
    window = max(-filt.lo, filt.hi, 0)
    gamma = autocovariance(spec, n + 2 * window + 2)
    hinf = hhat_infinite(filt, spec, n)
    hfin = hhat_finite(filt, spec, gamma, n)
    rows = [{"k": k + 1, "hhat_inf": hinf[k], "hhat_fin": hfin[k],
             "abs_diff": abs(hfin[k] - hinf[k])} for k in range(n)]
    summary = {"process": spec.to_dict(), "filter": filt.to_dict(), "n": n,
               "l1_diff": float(np.abs(hfin - hinf[:n]).sum()),
               "sigma_tilde": sigma_tilde(hinf, hfin, gamma, n)}
    _emit(args, rows, ("k", "hhat_inf", "hhat_fin", "abs_diff"), summary)
    return 0


def cmd_constants(args) -> int:
    spec = _process(args)
    consts = estimate_constants(spec, args.epsilon, args.r, args.probe_len)
    sys.stdout.write(dumps({"process": spec.to_dict(), "epsilon": args.epsilon, "r": args.r,
                            **consts.to_dict()}))
    return 0


def cmd_baxter(args) -> int:
    spec = _process(args)
    n_grid = parse_grid(args.n_grid or "1:512:+1")
    m_grid = parse_grid(args.m_grid or "1:20:+1")
    rep = baxter_grid_check(spec, n_grid, m_grid, args.epsilon, args.r, args.n2,
                            probe_len=args.probe_len)
    rows = [c.to_dict() for c in rep.cells]
    _emit(args, rows, ("n", "m", "kind", "lhs", "rhs", "margin", "status"), rep.to_dict())
    if not args.out:
        sys.stderr.write(dumps(rep.to_dict()))
    return 0 if rep.passed else 1


def cmd_rates(args) -> int:
    report = run_experiment(_config(args))
    summary = {"fits": {k: v.to_dict() for k, v in sorted(report.fits.items())},
               "criteria": report.criteria, "pass": report.passed}
    if args.out:
        write_report(report, Path(args.out))
    sys.stdout.write(dumps(summary))
    return 0 if report.passed else 1


def cmd_mspe(args) -> int:
    if not args.n_grid:
        args.n_grid = "64:4096:x2"
    report = run_experiment(_config(args))
    _emit(args, report.rows, MSPE_COLUMNS, report.summary())
    return 0


def cmd_run(args) -> int:
    report = run_experiment(_config(args), args.out)
    if not args.out:
        sys.stdout.write(rows_to_csv(report.rows, REPORT_COLUMNS))
    sys.stderr.write(dumps({"criteria": report.criteria, "errors": report.errors,
                            "pass": report.passed}))
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causal-wiener",
                                     description="Causal Wiener filters and Baxter inequalities.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, filt=False, grids=False, consts=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--process", help="process JSON (file path or inline object)")
        p.add_argument("--out", help="directory for report.csv and summary.json")
        if filt:
            p.add_argument("--filter", help="filter JSON (file path or inline); default shift-1")
        if grids:
            p.add_argument("--n-grid", dest="n_grid", help="A:B:xS, A:B:+S or a comma list")
            p.add_argument("--m-grid", dest="m_grid", help="comma list or range")
            p.add_argument("--n2", type=int, default=None, help="long-memory Baxter threshold")
            p.add_argument("--tol", action="append", metavar="NAME=V")
            p.add_argument("--config", help="experiment config JSON; flags override it")
        if consts:
            p.add_argument("--epsilon", type=float, default=None)
            p.add_argument("--r", type=float, default=None)
        p.set_defaults(func=func)
        return p

    p = add("coeffs", cmd_coeffs, "MA/AR coefficients and autocovariances")
    p.add_argument("--len", type=int, default=64)
    p = add("predict", cmd_predict, "infinite vs finite m-step predictor")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--method", choices=("levinson", "series"), default="levinson")
    p = add("filter", cmd_filter, "infinite vs finite causal filter coefficients", filt=True)
    p.add_argument("--n", type=int, default=64)
    p = add("constants", cmd_constants, "Baxter constants as JSON")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--r", type=float, default=1.05)
    p.add_argument("--probe-len", dest="probe_len", type=int, default=10_000)
    p = add("baxter", cmd_baxter, "uniform Baxter inequality over an (n, m) grid")
    p.add_argument("--n-grid", dest="n_grid")
    p.add_argument("--m-grid", dest="m_grid")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--r", type=float, default=1.05)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--probe-len", dest="probe_len", type=int, default=10_000)
    add("rates", cmd_rates, "fitted convergence slopes", filt=True, grids=True, consts=True)
    add("mspe", cmd_mspe, "prediction-error norms and their bounds", filt=True, grids=True,
        consts=True)
    add("run", cmd_run, "full experiment pipeline", filt=True, grids=True, consts=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except CausalWienerError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
