"""Command-line interface.

Every subcommand writes CSV (``#``-prefixed metadata lines, then a header
row) or, with ``--json``, the same content as one JSON document.  Output is
a pure function of the resolved configuration.

Exit codes: 0 ok, 2 usage, 3 numeric failure, 4 degenerate fit.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .budget import full_budget
from .errors import (DegenerateFitError, NumericFailureError, PulsePairError,
                     ResampleRequiredError, SteadyStateError,
                     UnsupportedRegimeError)
from .model import (DriveConfig, IntensityParams, decay_to_storage,
                    prepare_steady_state)
from .oracle import integrate_bloch
from .quadrature import DEFAULT_RTOL
from .readout import pq_state, pulse_signals
from .scan import (GAMMA22_CESIUM, asymptote_curve, detector_convolve,
                   energy_scan, find_minimum, fit_it, microseconds_to_units,
                   synthetic_fit_data, units_to_microseconds)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_DEGENERATE_FIT = 4

DEFAULT_RATIOS = (0.02, 0.57, 1.04, 1.76)
ORACLE_THRESHOLD = 1e-8


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``a:b:Nlog``, ``a:b:N`` or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad grid {text!r}")
        lo, hi = float(parts[0]), float(parts[1])
        spec = parts[2]
        if spec.endswith("log"):
            n = int(spec[:-3])
            if lo <= 0 or hi <= 0:
                raise UsageError("log grids need positive bounds")
            return [float(v) for v in np.logspace(math.log10(lo), math.log10(hi), n)]
        return [float(v) for v in np.linspace(lo, hi, int(spec))]
    return [float(v) for v in text.split(",") if v]


def _format(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def render(rows: list[dict], config: dict, as_json: bool,
           extra_meta: dict | None = None) -> str:
    meta = {"version": __version__, "config_hash": _config_hash(config),
            "units": config.get("units", "dimensionless"), "config": config}
    if extra_meta:
        meta.update(extra_meta)
    if as_json:
        clean = [{k: (v.item() if isinstance(v, np.generic) else v)
                  for k, v in r.items()} for r in rows]
        return json.dumps({"metadata": meta, "rows": clean}, sort_keys=True,
                          indent=1, default=str) + "\n"
    buf = io.StringIO()
    buf.write(f"# pulsepair {__version__}\n")
    buf.write(f"# config_hash: {meta['config_hash']}\n")
    buf.write(f"# units: {meta['units']}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True, default=str)}\n")
    for k in sorted(extra_meta or {}):
        buf.write(f"# {k}: {json.dumps(extra_meta[k], sort_keys=True, default=str)}\n")
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        cols = list(rows[0].keys())
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_format(r[c]) for c in cols])
    return buf.getvalue()


def _stored(args):
    prep = prepare_steady_state(args.omega_w, args.omega_wp)
    return decay_to_storage(prep, args.gamma_ground, args.t_storage)


def _check_nonneg(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise UsageError(f"{name} must be non-negative, got {value}")


def cmd_pulse_shape(args):
    ratios = args.ratio if args.ratio else list(DEFAULT_RATIOS)
    for r in ratios:
        _check_nonneg("--ratio", r)
    _check_nonneg("--it", args.it)
    stored = _stored(args)
    times = np.linspace(0.0, args.t_max / args.gamma22, args.points)
    tau = 0.0
    if args.tau_us is not None:
        _check_nonneg("--tau-us", args.tau_us)
        # detector time in units of 1/gamma22 for the cesium line
        tau = microseconds_to_units(args.tau_us, GAMMA22_CESIUM)
    rows = []
    for r in ratios:
        intens = IntensityParams.from_ratio(args.it, r, args.gamma22)
        trace = pulse_signals(intens, stored, times)
        if tau > 0:
            trace = detector_convolve(trace, tau)
        t_col = (units_to_microseconds(trace.times * args.gamma22)
                 if args.physical else trace.times)
        for t, a, b in zip(t_col, trace.s_d, trace.s_dp):
            rows.append({"ratio": r, "time_us" if args.physical else "time": t,
                         "s_d": a, "s_dp": b})
    return rows, {"detector_tau": tau}


def cmd_energy_scan(args):
    _check_nonneg("--it", args.it)
    if args.points < 3 or args.points % 2 == 0:
        raise UsageError("--points must be odd and at least 3")
    curve = energy_scan(args.it, args.points, _stored(args), args.tol)
    mn = find_minimum(curve)
    rows = []
    for i_r, u_norm, u_d, u_dp in curve.points:
        rows.append({"i_r": i_r, "i_rp": args.it - i_r, "i_r_over_it": i_r / args.it,
                     "u_t_norm": u_norm, "u_d": u_d, "u_dp": u_dp,
                     "u_t": u_d + u_dp})
    return rows, {"minimum": {"i_r_star": mn.i_r_star, "u_t_star": mn.u_t_star,
                              "has_interior_min": mn.has_interior_min},
                  "normalization": curve.normalization}


def cmd_min_curve(args):
    rows = []
    for i_t in parse_grid(args.it_grid):
        mn = find_minimum(energy_scan(i_t, args.points, _stored(args), args.tol))
        rows.append({"i_t": i_t, "i_r_star": mn.i_r_star, "u_t_star": mn.u_t_star,
                     "has_interior_min": mn.has_interior_min})
    return rows, {}


def cmd_asymptote(args):
    grid = parse_grid(args.it_grid)
    return [{"i_t": i_t, "ratio": r}
            for i_t, r in asymptote_curve(grid, _stored(args), args.tol)], {}


def _read_fit_csv(path):
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    need = {"i_r_over_it", "u_d", "u_dp"}
    if reader.fieldnames is None or not need <= set(reader.fieldnames):
        raise UsageError(f"fit data need columns {sorted(need)}")
    return [(float(r["i_r_over_it"]), float(r["u_d"]), float(r["u_dp"]))
            for r in reader]


def cmd_fit(args):
    if args.data:
        data = _read_fit_csv(args.data)
    elif args.synthetic_it is not None:
        data = synthetic_fit_data(args.synthetic_it, noise=args.noise,
                                  seed=args.seed)
    else:
        raise UsageError("fit needs --data or --synthetic-it")
    res = fit_it(data, (args.it_min, args.it_max), _stored(args), args.tol)
    row = {"i_t_hat": res.i_t_hat, "scale_d": res.scale_d,
           "scale_dp": res.scale_dp, "residual_norm": res.residual_norm,
           "iterations": res.iterations, "at_boundary": res.at_boundary}
    return [row], {"fit": res.metadata}


def cmd_oracle_check(args):
    _check_nonneg("--ratio", args.ratio)
    intens = IntensityParams.from_ratio(args.it, args.ratio, args.gamma22)
    stored = _stored(args)
    drive = DriveConfig(omega_w=args.omega_w, omega_wp=args.omega_wp,
                        omega_r=intens.omega_r, omega_rp=intens.omega_rp,
                        gamma22=args.gamma22, gamma_ground=args.gamma_ground,
                        t_storage=args.t_storage, grating_phase=args.phase)
    t_end = args.t_end / args.gamma22
    times = np.linspace(0.0, t_end, args.points)
    traj = integrate_bloch(drive, stored, t_end, args.tol, times)
    num = traj.symmetrized()
    ana = pq_state(intens, stored, times, drive.grating_phase)
    rows = []
    worst = 0.0
    for key in ("p_r", "p_i", "q_r", "q_i"):
        err = float(np.max(np.abs(num[key] - getattr(ana, key))))
        worst = max(worst, err)
        rows.append({"variable": key, "max_abs_error": err})
    trace_err = float(np.max(np.abs(traj.rho_aa + traj.rho_bb + traj.rho_22 - 1)))
    rows.append({"variable": "trace", "max_abs_error": trace_err})
    passed = worst < ORACLE_THRESHOLD
    return rows, {"threshold": ORACLE_THRESHOLD, "passed": passed,
                  "_exit": EXIT_OK if passed else EXIT_NUMERIC}


def cmd_emission_budget(args):
    _check_nonneg("--it", args.it)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    n = args.points - 1
    rows = []
    for j in range(args.points):
        intens = IntensityParams(args.it * j / n, args.it * (n - j) / n, args.gamma22)
        rows.append(full_budget(intens, args.tol).as_row())
    return rows, {}


def _add_common(p, tol_default):
    p.add_argument("--gamma22", type=float, default=1.0,
                   help="excited-state decay rate (time unit anchor)")
    p.add_argument("--gamma-ground", type=float, default=0.0)
    p.add_argument("--t-storage", type=float, default=0.0)
    p.add_argument("--omega-w", type=float, default=1.0)
    p.add_argument("--omega-wp", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=tol_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--physical", action="store_true",
                   help="report times in microseconds for the cesium D2 line")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pulsepair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pulse-shape", help="D and D' signals against time")
    p.add_argument("--it", type=float, default=1.3)
    p.add_argument("--ratio", type=float, action="append",
                   help="I_R'/I_R; repeatable (default: 0.02 0.57 1.04 1.76)")
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--tau-us", type=float, default=None,
                   help="detector response time in microseconds")
    _add_common(p, DEFAULT_RTOL)
    p.set_defaults(func=cmd_pulse_shape)

    p = sub.add_parser("energy-scan", help="U_T against I_R at fixed I_t")
    p.add_argument("--it", type=float, required=True)
    p.add_argument("--points", type=int, default=101)
    _add_common(p, DEFAULT_RTOL)
    p.set_defaults(func=cmd_energy_scan)

    p = sub.add_parser("min-curve", help="minimum location for several I_t")
    p.add_argument("--it-grid", default="0.01,0.1,1,10,100")
    p.add_argument("--points", type=int, default=101)
    _add_common(p, DEFAULT_RTOL)
    p.set_defaults(func=cmd_min_curve)

    p = sub.add_parser("asymptote", help="U_T(I_t/2)/U_T(0) against I_t")
    p.add_argument("--it-grid", default="1e-3:1e4:25log")
    _add_common(p, DEFAULT_RTOL)
    p.set_defaults(func=cmd_asymptote)

    p = sub.add_parser("fit", help="fit I_t to measured pulse energies")
    p.add_argument("--data", default=None,
                   help="CSV with columns i_r_over_it,u_d,u_dp")
    p.add_argument("--synthetic-it", type=float, default=None)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--it-min", type=float, default=0.05)
    p.add_argument("--it-max", type=float, default=20.0)
    _add_common(p, DEFAULT_RTOL)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("oracle-check", help="closed forms against direct integration")
    p.add_argument("--it", type=float, default=1.3)
    p.add_argument("--ratio", type=float, default=0.57)
    p.add_argument("--phase", type=float, default=0.0,
                   help="grating phase applied to the stored coherence")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--t-end", type=float, default=20.0)
    _add_common(p, 1e-10)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("emission-budget", help="spontaneous, stimulated and "
                       "non-phase-matched energies against I_R")
    p.add_argument("--it", type=float, default=10.0)
    p.add_argument("--points", type=int, default=11)
    _add_common(p, DEFAULT_RTOL)
    p.set_defaults(func=cmd_emission_budget)
    return parser


def _resolved_config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out", "json")}
    cfg["units"] = "physical" if cfg.get("physical") else "dimensionless"
    if cfg.get("physical"):
        cfg["gamma22_si"] = GAMMA22_CESIUM
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, meta = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DegenerateFitError as exc:
        print(f"error[degenerate-fit]: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE_FIT
    except NumericFailureError as exc:
        print(f"error[numeric]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UnsupportedRegimeError, SteadyStateError, ResampleRequiredError,
            PulsePairError, ValueError) as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    code = meta.pop("_exit", EXIT_OK)
    text = render(rows, _resolved_config(args), args.json, meta)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
