"""Batch command-line front-end.

Every subcommand emits CSV (default) or JSON with a fixed, versioned
column schema declared in a header comment line, so figures can be
reproduced by any external plotting tool.  Re-running a subcommand with
identical configuration yields byte-identical files apart from a
timestamp comment that ``--no-header`` suppresses.

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 failed residual/acceptance check in ``check``.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys

import numpy as np

from . import flow, moments, residuals, spectrum
from .flow import ConfigError, DomainError, SimConfig, SingularityError

SCHEMA_VERSION = "slelab-csv v1"


# ---------------------------------------------------------------------------
# output plumbing


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _emit(args, columns, rows, suffix=""):
    """Write a table as CSV or JSON to the output path (or stdout)."""
    out = args.output
    if out and suffix:
        root, ext = os.path.splitext(out)
        out = f"{root}.{suffix}{ext or '.csv'}"
    lines = []
    if args.format == "json":
        payload = {"schema": SCHEMA_VERSION, "columns": list(columns),
                   "rows": [[_fmt(v) for v in r] for r in rows]}
        if not args.no_header:
            payload["generated"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        text = json.dumps(payload, indent=2) + "\n"
    else:
        if not args.no_header:
            stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
            lines.append(f"# generated: {stamp}")
        lines.append(f"# {SCHEMA_VERSION}: {','.join(columns)}")
        lines.append(",".join(columns))
        for r in rows:
            lines.append(",".join(_fmt(v) for v in r))
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_complex(s):
    try:
        return complex(s.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex number {s!r}") from exc


def _workers(args):
    env = os.environ.get("SLE_LAB_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"SLE_LAB_THREADS={env!r} is not an integer") from exc
    return max(1, args.workers)


def _sim_config(args):
    return SimConfig(kappa=args.kappa, horizon_T=args.T, dt=args.dt, seed=args.seed)


def _ensemble(args, points):
    cfg = _sim_config(args)
    return flow.sample_ensemble(cfg, points, args.n_samples, workers=_workers(args))


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_simulate(args):
    zs = [_parse_complex(s) for s in args.z]
    if not zs:
        raise ConfigError("simulate requires at least one --z point")
    sample = _ensemble(args, zs)
    if args.output:
        with open(args.output, "w") as fh:
            flow.dump_samples_csv(sample, fh)
    else:
        flow.dump_samples_csv(sample, sys.stdout)
    return 0


_MOMENT_COLS = ("z_re", "z_im", "p", "q", "kappa", "estimate_re", "estimate_im",
                "stderr", "n", "closed_form_re", "closed_form_im")


def _closed_or_nan(kind, z, z2, kappa, p, q):
    try:
        g = moments.parabola_gamma_from_pq(kappa, p, q)
    except (DomainError, ConfigError):
        return complex(np.nan, np.nan)
    if kind == "complex":
        return complex(moments.closed_one_point(z, kappa, g))
    if kind == "moduli":
        return complex(moments.closed_moduli(z, kappa, g))
    return complex(moments.closed_two_point(z, np.conj(z2), kappa, g))


def _cmd_moments(args):
    zs = [_parse_complex(s) for s in args.z]
    if not zs:
        raise ConfigError("moments requires at least one --z point")
    sample = _ensemble(args, zs)
    rows = []
    for z in zs:
        if args.kind == "moduli":
            est = moments.estimate_moduli(sample, args.p, args.q, z)
        else:
            est = moments.estimate_one_point(sample, args.p, args.q, z)
        closed = _closed_or_nan(args.kind, z, None, args.kappa, args.p, args.q)
        rows.append((z.real, z.imag, args.p, args.q, args.kappa,
                     complex(est.value).real, complex(est.value).imag,
                     est.stderr, est.n_samples, closed.real, closed.imag))
    _emit(args, _MOMENT_COLS, rows)
    return 0


def _cmd_two_point(args):
    z1 = _parse_complex(args.z1)
    z2 = _parse_complex(args.z2)
    sample = _ensemble(args, [z1, z2] if z1 != z2 else [z1])
    est = moments.estimate_two_point(sample, args.p, args.q, z1, z2)
    closed = _closed_or_nan("two-point", z1, z2, args.kappa, args.p, args.q)
    rows = [(z1.real, z1.imag, args.p, args.q, args.kappa,
             complex(est.value).real, complex(est.value).imag,
             est.stderr, est.n_samples, closed.real, closed.imag)]
    _emit(args, _MOMENT_COLS, rows)
    return 0


def _cmd_log_coeffs(args):
    pts = moments.circle_points(args.radius, args.fft_size)
    sample = _ensemble(args, pts)
    stats = moments.extract_log_coeffs(sample, args.n_max, M=args.fft_size)
    rows = []
    for i in range(args.n_max):
        n = i + 1
        theory = 1.0 / (2 * n * n) if args.kappa == 2.0 else float("nan")
        rows.append((n, stats.mean_gamma[i].real, stats.mean_gamma[i].imag,
                     stats.mean_sq[i], theory))
    _emit(args, ("n", "mean_re", "mean_im", "mean_sq", "theory"), rows)
    return 0


def _cmd_means_scan(args):
    r_grid = np.linspace(args.r_min, args.r_max, args.n_r)
    scan = moments.integral_means_scan(args.integrand, args.p, args.q,
                                       args.kappa, r_grid,
                                       angular_M=args.angular_m)
    beta = scan.beta if scan.beta is not None else float("nan")
    rows = [(r, I, beta) for r, I in zip(scan.r_grid, scan.integrals)]
    _emit(args, ("r", "integral", "beta"), rows)
    return 0


_SPEC_COLS = ("p", "q", "kappa", "m", "region", "beta")


def _cmd_spectrum(args):
    ps = args.p if isinstance(args.p, list) else [args.p]
    qs = args.q if isinstance(args.q, list) else [args.q]
    if not ps or len(ps) != len(qs):
        raise ConfigError("spectrum needs matching --p/--q lists")
    rows = []
    for p, q in zip(ps, qs):
        res = spectrum.classify_mfold(p, q, args.kappa, args.m)
        rows.append((p, q, args.kappa, args.m, res.region, res.beta))
    _emit(args, _SPEC_COLS, rows)
    return 0


def _curve_params(kappa, n):
    """Parameter grids per curve, pinning the exact special-point values."""
    sp = spectrum.special_points(kappa)
    g_lo, g_hi = 0.25 + 1 / kappa, 1 + 2 / kappa
    green = np.unique(np.concatenate([np.linspace(g_lo - 0.5, g_hi + 0.5, n),
                                      [g_lo, g_hi, 1 / kappa]]))
    red = np.unique(np.concatenate([np.linspace(-0.5, 2 / kappa + 1.0, n),
                                    [1 / kappa, 2 / kappa + 0.5]]))
    quart = np.unique(np.concatenate([np.linspace(g_hi, g_hi + 4.0, n), [g_hi]]))
    line_q = np.linspace(sp.Q0[1] - 6, sp.P0[1] + 6, n)
    line_p = np.linspace(sp.p0prime - 6, sp.p0 + 6, n)
    return {"redParabola": red, "greenParabola": green, "blueQuartic": quart,
            "D0": line_q, "D0prime": line_q, "Delta0": line_q,
            "D1": line_p, "Delta1": line_p}


def _cmd_phase_diagram(args):
    sp = spectrum.special_points(args.kappa)
    p_lo = args.p_min if args.p_min is not None else sp.p0prime - 6
    p_hi = args.p_max if args.p_max is not None else sp.p0 + 6
    q_lo = args.q_min if args.q_min is not None else sp.Q0[1] - 6
    q_hi = args.q_max if args.q_max is not None else sp.P0[1] + 6
    n = args.resolution
    T = spectrum.mfold_map(args.m)
    rows = []
    for p in np.linspace(p_lo, p_hi, n):
        # one boundary solve per grid column; points strictly below it are
        # region IV without another bisection
        qb = spectrum.lower_boundary_q(p, args.kappa)
        for q in np.linspace(q_lo, q_hi, n):
            qm = T(p, q)[1]
            if qm < qb - spectrum.BOUNDARY_TOL:
                rows.append((p, q, args.kappa, args.m, "IV",
                             spectrum.beta_1(p, qm, args.kappa)))
            else:
                res = spectrum.classify_mfold(p, q, args.kappa, args.m)
                rows.append((p, q, args.kappa, args.m, res.region, res.beta))
    _emit(args, _SPEC_COLS, rows)

    curve_rows = []
    Tinv = spectrum.mfold_map_inv(args.m)
    for cid, params in _curve_params(args.kappa, args.curve_points).items():
        for t in params:
            cp, cq = spectrum.curve_eval(cid, args.kappa, t)
            cp, cq = Tinv(cp, cq)
            curve_rows.append((cid, t, cp, cq))
    _emit(args, ("curve", "param", "p", "q"), curve_rows, suffix="curves")
    return 0


def _cmd_xy_geometry(args):
    rows = []
    for x in np.linspace(0.01, 4 + args.kappa, args.resolution):
        for y in np.linspace(0.01, args.kappa / 2 + 2, args.resolution):
            p, q = spectrum.xy_inverse(x, y, args.kappa)
            b1, b0, btip, blin = spectrum.xy_spectra(x, y, args.kappa)
            rows.append((p, q, args.kappa, x, y, btip, b0, blin, b1,
                         spectrum.quartic_hyperbola_residual(x, y, args.kappa)))
    _emit(args, ("p", "q", "kappa", "x", "y", "beta_tip", "beta_0",
                 "beta_lin", "beta_1", "hyperbola_residual"), rows)
    return 0


def _cmd_universal(args):
    part = spectrum.universal_partition(p_dagger=args.p_dagger)
    rows = []
    for name, seg in part.items():
        lo = max(seg["p_range"][0], -6.0)
        hi = min(seg["p_range"][1], 6.0)
        for p in np.linspace(lo, hi, args.resolution):
            q = seg["q_of_p"](p)
            rows.append((name, p, q, spectrum.universal_B(p, q, p_dagger=args.p_dagger),
                         int(spectrum.feng_mcgregor_domain(p, q))))
    _emit(args, ("curve", "p", "q", "B", "feng_mcgregor"), rows)
    return 0


def _cmd_check(args):
    reports = []
    g = 1 / args.kappa + 0.25
    p, q = moments.parabola_point(args.kappa, g)
    if args.suite in ("algebra", "all"):
        rng = np.random.default_rng(args.seed)
        worst = 0.0
        for _ in range(200):
            kk, pp, qq, aa = rng.uniform(0.5, 20), *rng.uniform(-5, 5, 3)
            worst = max(worst, abs(residuals.abc_check(kk, pp, qq, aa)["sum"]))
        reports.append({"check": "abc_sum_random", "inputs": {"n": 200},
                        "residual": worst, "order_estimate": None,
                        "pass": bool(worst < 1e-12)})
        reports.append({"check": "beta_duality",
                        "inputs": {"kappa": args.kappa, "gamma": g},
                        "residual": residuals.duality_check(args.kappa, p, g)["residual"],
                        "order_estimate": None,
                        "pass": bool(residuals.duality_check(args.kappa, p, g)["residual"] < 1e-12)})
    if args.suite in ("residuals", "all"):
        reports.append(residuals.ode_residual(args.kappa, g, 0.3 + 0.2j))
        reports.append(residuals.pde_residual(args.kappa, g, 0.3 + 0.2j, 0.25 - 0.15j))
        reports.append(residuals.moduli_residual(args.kappa, g, 0.3 + 0.2j))
    if args.suite in ("seeds", "all"):
        reports.extend(residuals.seed_systems(args.kappa))
    text = json.dumps(reports, indent=2, default=float) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r["pass"] for r in reports) else 3


def _cmd_diagnose(args):
    cfg = _sim_config(args)
    z = _parse_complex(args.z[0]) if args.z else 0.5 + 0j
    T_list = sorted(args.T_list) if args.T_list else [2.0, 4.0, 6.0, 8.0]
    rows = flow.stationarity_diagnostic(cfg, z, T_list, args.n_samples,
                                        p=args.p, q=args.q, workers=_workers(args))
    _emit(args, ("T", "estimate", "stderr"), rows)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sp_parser, sim=False, pq=False):
    sp_parser.add_argument("--kappa", type=float, default=argparse.SUPPRESS)
    sp_parser.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sp_parser.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    sp_parser.add_argument("--output", default=argparse.SUPPRESS)
    sp_parser.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    sp_parser.add_argument("--no-header", action="store_true", default=argparse.SUPPRESS)
    sp_parser.add_argument("--config", default=argparse.SUPPRESS,
                           help="JSON file of defaults, overridden by flags")
    if sim:
        sp_parser.add_argument("--T", type=float, default=argparse.SUPPRESS)
        sp_parser.add_argument("--dt", type=float, default=argparse.SUPPRESS)
        sp_parser.add_argument("--n-samples", type=int, default=argparse.SUPPRESS)
    if pq:
        sp_parser.add_argument("--p", type=float, default=argparse.SUPPRESS)
        sp_parser.add_argument("--q", type=float, default=argparse.SUPPRESS)


_DEFAULTS = {
    "kappa": 2.0, "seed": 0, "workers": 1, "output": None, "format": "csv",
    "no_header": False, "config": None, "T": 8.0, "dt": 1e-3,
    "n_samples": 1000, "p": 2.0, "q": 2.0, "z": [], "m": 1,
    "kind": "complex", "z1": "0.3", "z2": "0.25",
    "radius": 0.7, "fft_size": 32, "n_max": 5,
    "integrand": "closed", "r_min": 0.5, "r_max": 0.99, "n_r": 40,
    "angular_m": 512, "resolution": 400, "curve_points": 200,
    "p_min": None, "p_max": None, "q_min": None, "q_max": None,
    "p_dagger": -2.0, "suite": "all", "T_list": None,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="slelab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="dump whole-plane samples as CSV")
    _add_common(s, sim=True)
    s.add_argument("--z", action="append", default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_simulate)

    s = sub.add_parser("moments", help="MC moment estimates vs closed forms")
    _add_common(s, sim=True, pq=True)
    s.add_argument("--z", action="append", default=argparse.SUPPRESS)
    s.add_argument("--kind", choices=("complex", "moduli"), default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_moments)

    s = sub.add_parser("two-point", help="two-point moment estimate")
    _add_common(s, sim=True, pq=True)
    s.add_argument("--z1", default=argparse.SUPPRESS)
    s.add_argument("--z2", default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_two_point)

    s = sub.add_parser("log-coeffs", help="logarithmic coefficient statistics")
    _add_common(s, sim=True)
    s.add_argument("--radius", type=float, default=argparse.SUPPRESS)
    s.add_argument("--fft-size", type=int, default=argparse.SUPPRESS)
    s.add_argument("--n-max", type=int, default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_log_coeffs)

    s = sub.add_parser("means-scan", help="integral means growth scan")
    _add_common(s, pq=True)
    s.add_argument("--integrand", default=argparse.SUPPRESS)
    s.add_argument("--r-min", type=float, default=argparse.SUPPRESS)
    s.add_argument("--r-max", type=float, default=argparse.SUPPRESS)
    s.add_argument("--n-r", type=int, default=argparse.SUPPRESS)
    s.add_argument("--angular-m", type=int, default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_means_scan)

    s = sub.add_parser("spectrum", help="spectrum value and region at points")
    _add_common(s)
    s.add_argument("--p", type=float, action="append", default=argparse.SUPPRESS)
    s.add_argument("--q", type=float, action="append", default=argparse.SUPPRESS)
    s.add_argument("--m", type=int, default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_spectrum)

    s = sub.add_parser("phase-diagram", help="region grid and separatrix curves")
    _add_common(s)
    s.add_argument("--m", type=int, default=argparse.SUPPRESS)
    s.add_argument("--resolution", type=int, default=argparse.SUPPRESS)
    s.add_argument("--curve-points", type=int, default=argparse.SUPPRESS)
    for f in ("p-min", "p-max", "q-min", "q-max"):
        s.add_argument(f"--{f}", type=float, default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_phase_diagram)

    s = sub.add_parser("xy-geometry", help="conic-coordinate spectra grid")
    _add_common(s)
    s.add_argument("--resolution", type=int, default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_xy_geometry)

    s = sub.add_parser("universal", help="universal spectrum partition data")
    _add_common(s)
    s.add_argument("--resolution", type=int, default=argparse.SUPPRESS)
    s.add_argument("--p-dagger", type=float, default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_universal)

    s = sub.add_parser("check", help="residual and algebra check suite")
    _add_common(s)
    s.add_argument("--suite", choices=("algebra", "residuals", "seeds", "all"),
                   default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_check)

    s = sub.add_parser("diagnose", help="stationarity diagnostic over horizons")
    _add_common(s, sim=True, pq=True)
    s.add_argument("--z", action="append", default=argparse.SUPPRESS)
    s.add_argument("--T-list", type=float, action="append", default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_diagnose)

    return parser


def _merge_config(args):
    merged = dict(_DEFAULTS)
    path = getattr(args, "config", None)
    if path:
        with open(path) as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"bad config file {path}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        for k, v in file_cfg.items():
            merged[k.replace("-", "_")] = v
    merged.update(vars(args))
    return argparse.Namespace(**merged)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        return args.func(args)
    except (ConfigError, DomainError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SingularityError, FloatingPointError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
