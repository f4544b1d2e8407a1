"""Command-line front end: figure reproductions and generic evaluations.

Examples::

    driftmimo fig3 --out results/
    driftmimo eval coherence --kappa 0 --rho 0.5
    driftmimo eval fcf --nu=-50MHz:50MHz:101 --antennas 50,100 --set array.m_r=100 \\
        --set array.delta_r=0.5lam
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import figures
from .config import ExperimentConfig, load_config, parse_list, parse_quantity
from .correlation import (CorrelationQuery, config_hash, fcf, scf_numeric, stcf_separable_gap, stfcf,
                          vm_characteristic)
from .delay_stats import (coherence_constant, composite_pdp, delay_spread, pdp_moments,
                          rx_delay_offset)
from .errors import ConfigurationError, DomainError, DriftMimoError
from .geometry import SPEED_OF_LIGHT, TWO_PI, EllipsePath
from .montecarlo import EstimatorConfig, delay_draws, estimate_stfcf, fcf_from_draws, moments_from_draws, pdp_from_draws
from .output import default_out_dir, write_csv
from .stochastic import ClusterGenerator, SeedSpec, VonMises, power_weights

FIGURES = {"fig2": figures.run_fig2, "fig3": figures.run_fig3,
           "fig4": figures.run_fig4, "fig5": figures.run_fig5}
EVALS = ("scf", "fcf", "stfcf", "pdp", "stats", "coherence")


class UsageError(Exception):
    pass


def parse_grid(text: str, wavelength: float | None = None) -> np.ndarray:
    """``"a:b:n"`` for ``n`` evenly spaced points, else a comma-separated list."""
    parts = text.split(":")
    if len(parts) == 3:
        lo, hi = parse_quantity(parts[0], wavelength), parse_quantity(parts[1], wavelength)
        n = int(parts[2])
        if n < 1:
            raise UsageError(f"grid {text!r} needs at least one point")
        return np.linspace(lo, hi, n)
    if len(parts) != 1:
        raise UsageError(f"cannot parse grid {text!r}; use a:b:n or a comma list")
    return np.array(parse_list(text, wavelength))


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="experiment config file (INI)")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--out", help="output directory (default: $DRIFTMIMO_OUT or .)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--realizations", type=int, help="Monte Carlo realizations")
    p.add_argument("--scatterers", type=int, help="scatterers per ellipse")
    p.add_argument("--antennas", type=_int_list, help="Rx elements, e.g. 50,100")
    p.add_argument("--workers", type=int, default=1, help="threads over realizations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftmimo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in FIGURES.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        _common(p)
        p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
        p.add_argument("--paper-scale", action="store_true",
                       help="10^3 delays x 10^2 scatterers instead of 10^2 x 10^2")
    p = sub.add_parser("eval", help="evaluate one statistic on a grid and write CSV")
    p.add_argument("what", choices=EVALS)
    _common(p)
    p.add_argument("--method", choices=("closed", "quadrature", "mc"),
                   help="evaluation route (default: closed, quadrature for stfcf)")
    p.add_argument("--kappa", help="comma list; one single-path channel per value")
    p.add_argument("--mu", help="mean AOA for --kappa channels (default: broadside to the Rx array)")
    p.add_argument("--rho", type=float, help="correlation threshold for coherence")
    p.add_argument("--orientation", help="beta_R - mu for coherence (default: worst case)")
    p.add_argument("--delta-q", help="extra element offsets for coherence, comma list")
    p.add_argument("--f", help="frequency offsets a:b:n or list")
    p.add_argument("--nu", help="frequency lags a:b:n or list (use --nu=-a:b:n for negative starts)")
    p.add_argument("--tau", help="delay axis a:b:n or list")
    p.add_argument("--delta-t", help="time lag")
    p.add_argument("--q", type=int)
    p.add_argument("--q-prime", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--p-prime", type=int)
    p.add_argument("--name", help="output file stem (default: the statistic)")
    return parser


def _load(args) -> ExperimentConfig:
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"seed.master={args.seed}")
    return load_config(args.config, overrides)


def _out_dir(args, exp: ExperimentConfig) -> Path:
    return Path(args.out or exp.output or default_out_dir())


# ----------------------------------------------------------------------------
# figures

def run_figure(args) -> list[Path]:
    opts = figures.RunOptions(
        seed=args.seed if args.seed is not None else 0,
        scatterers=args.scatterers, realizations=args.realizations, paper_scale=args.paper_scale,
        gnuplot=args.gnuplot, antennas=args.antennas, workers=args.workers,
        config=args.config, overrides=tuple(args.set))
    out = Path(args.out or default_out_dir())
    return FIGURES[args.command](out, opts)


# ----------------------------------------------------------------------------
# evaluations

def _path_sets(args, exp: ExperimentConfig):
    """``[(kappa or None, path source)]``."""
    if args.kappa is None:
        return [(None, exp.path_source())]
    mu = parse_quantity(args.mu) if args.mu else exp.array.beta_r - math.pi / 2
    n = args.scatterers or 100
    return [(k, [EllipsePath(0.0, 1.0, VonMises(mu, k), n)]) for k in parse_list(args.kappa)]


def _estimator(args, exp: ExperimentConfig) -> EstimatorConfig:
    n = args.realizations or exp.eval_int("realizations")
    override = args.scatterers or (exp.eval_int("scatterers") if exp.evaluation["scatterers"] else None)
    return EstimatorConfig(n, override, exp.seed, args.workers)


def _explicit(source, what: str) -> list[EllipsePath]:
    if isinstance(source, ClusterGenerator):
        raise UsageError(f"{what} with a [generator] needs --method mc")
    return source


def _pick(cli_value, exp: ExperimentConfig, key: str):
    return cli_value if cli_value is not None else exp.eval_int(key)


def _grid(text, exp: ExperimentConfig, prefix: str) -> np.ndarray:
    lam = exp.array.wavelength
    if text is not None:
        return parse_grid(text, lam)
    return np.linspace(exp.eval_quantity(f"{prefix}_min"), exp.eval_quantity(f"{prefix}_max"),
                       exp.eval_int(f"{prefix}_points"))


def _eval_scf(args, exp, method, est):
    cfg = exp.array
    f = _grid(args.f, exp, "f")
    q, q2 = _pick(args.q, exp, "q"), _pick(args.q_prime, exp, "q_prime")
    p, p2 = _pick(args.p, exp, "p"), _pick(args.p_prime, exp, "p_prime")
    lag_q, lag_p = (q - q2) * cfg.delta_r, (p - p2) * cfg.delta_t
    cols = ["f_hz", "re", "im", "abs", "stderr"]
    rows = []
    for kappa, source in _path_sets(args, exp):
        err = np.zeros(f.size)
        if method == "mc":
            queries = [CorrelationQuery(f=x, p=p, p_prime=p2, q=q, q_prime=q2) for x in f]
            res = estimate_stfcf(cfg, source, queries, est)
            vals, err = np.asarray(res.value), np.asarray(res.stderr)
        elif method == "quadrature":
            vals = np.atleast_1d(scf_numeric(cfg, _explicit(source, "scf"), f, lag_p, lag_q))
        else:
            paths = _explicit(source, "scf")
            if lag_p != 0.0:
                raise UsageError("closed-form SCF covers Rx lags only; use --method quadrature")
            if np.any(cfg.f0 + f <= 0):
                raise DomainError("absolute frequency f0 + f must be positive")
            x = TWO_PI * (cfg.f0 + f) * lag_q / SPEED_OF_LIGHT
            vals = sum(w * vm_characteristic(path.aoa_dist, x, cfg.beta_r)
                       for w, path in zip(power_weights(paths), paths))
            vals = np.atleast_1d(vals)
        for i, x in enumerate(f):
            rows.append(([] if kappa is None else [kappa]) + [x, vals[i].real, vals[i].imag, abs(vals[i]), err[i]])
    return cols, rows


def _eval_fcf(args, exp, method, est):
    cfg = exp.array
    nu = _grid(args.nu, exp, "nu")
    antennas = args.antennas or exp.antennas()
    p = _pick(args.p, exp, "p")
    cols = ["antenna", "nu_hz", "re", "im", "abs", "stderr"]
    rows = []
    for kappa, source in _path_sets(args, exp):
        draws = delay_draws(cfg, source, antennas, est, p) if method == "mc" else None
        for q in antennas:
            err = np.zeros(nu.size)
            if method == "mc":
                res = fcf_from_draws(draws[q], nu)
                vals, err = np.asarray(res.value), np.asarray(res.stderr)
            else:
                vals = np.atleast_1d(fcf(cfg, _explicit(source, "fcf"), q, p, nu,
                                         method="closed" if method == "closed" else "quadrature"))
            for i, x in enumerate(nu):
                rows.append(([] if kappa is None else [kappa])
                            + [q, x, vals[i].real, vals[i].imag, abs(vals[i]), err[i]])
    return cols, rows


def _eval_stfcf(args, exp, method, est):
    if method == "closed":
        raise UsageError("the STFCF has no general closed form; use --method quadrature or mc")
    cfg = exp.array
    nu = _grid(args.nu, exp, "nu")
    f = parse_quantity(args.f) if args.f else exp.eval_quantity("f_min")
    dt = parse_quantity(args.delta_t) if args.delta_t else exp.eval_quantity("delta_t")
    idx = dict(p=_pick(args.p, exp, "p"), p_prime=_pick(args.p_prime, exp, "p_prime"),
               q=_pick(args.q, exp, "q"), q_prime=_pick(args.q_prime, exp, "q_prime"))
    cols = ["delta_t_s", "f_hz", "nu_hz", "re", "im", "abs", "stderr", "separable_gap"]
    rows = []
    for kappa, source in _path_sets(args, exp):
        queries = [CorrelationQuery(dt, f, x, **idx) for x in nu]
        if method == "mc":
            res = estimate_stfcf(cfg, source, queries, est)
            vals, err = np.asarray(res.value), np.asarray(res.stderr)
            gaps = np.full(nu.size, math.nan)
        else:
            paths = _explicit(source, "stfcf")
            vals = np.array([stfcf(cfg, paths, qy) for qy in queries])
            err = np.zeros(nu.size)
            gaps = np.array([stcf_separable_gap(cfg, paths, qy) for qy in queries])
        for i, x in enumerate(nu):
            rows.append(([] if kappa is None else [kappa])
                        + [dt, f, x, vals[i].real, vals[i].imag, abs(vals[i]), err[i], gaps[i]])
    return cols, rows


def _draw_lists(source, est: EstimatorConfig):
    """Explicit paths once, or one cluster draw per realization."""
    if isinstance(source, ClusterGenerator):
        return [source.draw(est.seed, r) for r in range(est.n_realizations)]
    return [source]


def _auto_tau(exp, source, antennas, est) -> np.ndarray:
    reach = max(abs(rx_delay_offset(exp.array, q)) for q in antennas)
    taus = [p.tau0 for paths in _draw_lists(source, est) for p in paths]
    lo, hi = min(taus) - reach, max(taus) + reach
    pad = 0.05 * max(hi - lo, 1e-9)
    return np.linspace(lo - pad, hi + pad, exp.eval_int("tau_points"))


def _eval_pdp(args, exp, method, est):
    if method == "quadrature":
        raise UsageError("pdp supports --method closed or mc")
    cfg = exp.array
    antennas = args.antennas or exp.antennas()
    cols = ["antenna", "tau_s", "density", "stderr"]
    rows = []
    for kappa, source in _path_sets(args, exp):
        tau = parse_grid(args.tau) if args.tau else _auto_tau(exp, source, antennas, est)
        draws = delay_draws(cfg, source, antennas, est) if method == "mc" else None
        for q in antennas:
            if method == "mc":
                if np.ptp(np.diff(tau)) > 1e-9 * abs(tau[1] - tau[0]):
                    raise UsageError("Monte Carlo PDP needs a uniform --tau axis")
                width = tau[1] - tau[0]
                edges = np.concatenate([tau - 0.5 * width, [tau[-1] + 0.5 * width]])
                curve = pdp_from_draws(draws[q], edges, q)
                dens, err = curve.density, curve.stderr
            else:
                lists = _draw_lists(source, est)
                dens = sum(composite_pdp(cfg, paths, q, tau).density for paths in lists) / len(lists)
                err = np.zeros(tau.size)
            for i, x in enumerate(tau):
                rows.append(([] if kappa is None else [kappa]) + [q, x, dens[i], err[i]])
    return cols, rows


def _eval_stats(args, exp, method, est):
    cfg = exp.array
    antennas = args.antennas or exp.antennas()
    cols = ["antenna", "tau_q_s", "mean_s", "rms_s", "rms_literal_s", "literal_negative"]
    rows = []
    for kappa, source in _path_sets(args, exp):
        draws = delay_draws(cfg, source, antennas, est) if method == "mc" else None
        for q in antennas:
            literal, negative = math.nan, False
            if method == "mc":
                mean, rms = moments_from_draws(draws[q])
            else:
                lists = _draw_lists(source, est)
                means, seconds, lits = [], [], []
                for paths in lists:
                    if method == "closed":
                        m = delay_spread(cfg, paths, q)
                        mu, sd = m.mean, m.rms
                        lits.append(m.rms_literal)
                        negative = negative or m.literal_negative
                    else:
                        mu, sd = pdp_moments(cfg, paths, q)
                    means.append(mu)
                    seconds.append(sd * sd + mu * mu)
                mean = float(np.mean(means))
                rms = math.sqrt(max(float(np.mean(seconds)) - mean * mean, 0.0))
                if method == "closed" and len(lists) == 1:
                    literal = lits[0]
            rows.append(([] if kappa is None else [kappa])
                        + [q, rx_delay_offset(cfg, q), mean, rms, literal, int(negative)])
    return cols, rows


def coherence_rows(kappas, rho: float, wavelength: float, orientation=None, extra=()):
    """Coherence constant and bandwidth at the reference element offsets.

    References: the outer element of a two-element half-wavelength array
    (offset ``lambda0/4``), half the aperture of a 100-element array
    (``25 lambda0``) and the outer element of that array (``24.75 lambda0``).
    """
    refs = [("two-element-outer", wavelength / 4), ("100-element-half-aperture", 25.0 * wavelength),
            ("100-element-outer", 24.75 * wavelength)]
    refs += [("custom", d) for d in extra]
    rows = []
    for kappa in kappas:
        c = coherence_constant(VonMises(0.0, kappa), rho, orientation)
        for label, dq in refs:
            rows.append([kappa, rho, label, dq, c, c / abs(dq)])
    return rows


def _eval_coherence(args, exp, method, est):
    kappas = parse_list(args.kappa) if args.kappa else [0.0]
    rho = args.rho if args.rho is not None else exp.eval_quantity("rho")
    orientation = parse_quantity(args.orientation) if args.orientation else None
    extra = parse_list(args.delta_q, exp.array.wavelength) if args.delta_q else ()
    rows = coherence_rows(kappas, rho, exp.array.wavelength, orientation, extra)
    return ["kappa", "rho", "reference", "delta_q_m", "constant_hz_m", "bandwidth_hz"], rows


def run_eval(args) -> list[Path]:
    exp = _load(args)
    method = args.method or ("quadrature" if args.what == "stfcf" else
                             "mc" if exp.evaluation["method"] == "mc" else exp.evaluation["method"])
    if method not in ("closed", "quadrature", "mc"):
        raise UsageError(f"unknown method {method!r}")
    est = _estimator(args, exp)
    handler = {"scf": _eval_scf, "fcf": _eval_fcf, "stfcf": _eval_stfcf, "pdp": _eval_pdp,
               "stats": _eval_stats, "coherence": _eval_coherence}[args.what]
    cols, rows = handler(args, exp, method, est)
    if args.what == "coherence":
        method = "closed"
    elif args.kappa is not None:
        cols = ["kappa"] + cols
    flags = {k: v for k, v in vars(args).items() if k not in ("out", "workers", "name")}
    h = config_hash(exp.array, exp.path_source(), exp.evaluation, exp.seed, est, flags)
    out = _out_dir(args, exp) / f"{args.name or args.what}.csv"
    return [write_csv(out, cols, rows, h, exp.seed.master_seed, method)]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        files = run_figure(args) if args.command in FIGURES else run_eval(args)
    except (UsageError, ConfigurationError, DomainError, ValueError) as exc:
        print(f"driftmimo: error: {exc}", file=sys.stderr)
        return 2
    except (DriftMimoError, OSError) as exc:
        print(f"driftmimo: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
