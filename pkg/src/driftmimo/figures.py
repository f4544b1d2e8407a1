"""Reproduction runs for the four result figures.

Each ``run_fig*`` writes CSV files (and optionally a gnuplot script) into
``out_dir`` and returns their paths. Defaults encode the figure captions;
``overrides`` are ``section.key=value`` strings applied on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config
from .correlation import config_hash, fcf, scf_closed, CorrelationQuery
from .delay_stats import coherence_bandwidth, composite_pdp, delay_spread
from .geometry import SPEED_OF_LIGHT, ArrayConfig, EllipsePath
from .montecarlo import (EstimatorConfig, auto_bins, delay_draws, estimate_stfcf, fcf_from_draws,
                         moments_from_draws, pdp_from_draws)
from .output import write_csv
from .stochastic import ClusterGenerator, SeedSpec, VonMises

LAMBDA0 = SPEED_OF_LIGHT / 2e9
KAPPAS = (0.0, 5.0, 10.0)
MEAN_RANGES = {"full": (0.0, 2.0 * math.pi), "narrow": (0.0, math.pi / 6.0)}


@dataclass
class RunOptions:
    seed: int = 0
    scatterers: int | None = None
    realizations: int | None = None
    paper_scale: bool = False
    gnuplot: bool = False
    antennas: list[int] | None = None
    workers: int = 1
    config: str | None = None
    overrides: tuple[str, ...] = ()


def _experiment(base: dict, opts: RunOptions) -> ExperimentConfig:
    return load_config(opts.config, opts.overrides, base=base)


def _estimator(exp: ExperimentConfig, opts: RunOptions, realizations: int) -> EstimatorConfig:
    n = opts.realizations or realizations
    return EstimatorConfig(n, opts.scatterers, SeedSpec(opts.seed, exp.seed.stream_id), opts.workers)


def _single_path(kappa: float, n: int) -> list[EllipsePath]:
    # broadside: beta_R - mu = pi/2 with beta_R = pi/2
    return [EllipsePath(0.0, 1.0, VonMises(0.0, kappa), n)]


def _gnuplot(out: Path, name: str, body: str) -> Path:
    path = out / f"{name}.gp"
    path.write_text("set datafile separator ','\nset key autotitle columnhead\n" + body)
    return path


# ----------------------------------------------------------------------------
# frequency-variant spatial correlation

FIG2_BASE = {
    "array": {"m_t": "1", "m_r": "2", "delta_r": "0.5lam", "beta_r": "0.5pi", "f0": "2GHz"},
    "evaluation": {"f_min": "-0.5GHz", "f_max": "0.5GHz", "f_points": "101", "q": "1", "q_prime": "2"},
}


def run_fig2(out_dir, opts: RunOptions | None = None, kappas=KAPPAS) -> list[Path]:
    """|SCF| against frequency offset for several concentrations, closed form and Monte Carlo."""
    opts = opts or RunOptions()
    exp = _experiment(FIG2_BASE, opts)
    cfg = exp.array
    est = _estimator(exp, opts, 100)
    f = np.linspace(exp.eval_quantity("f_min"), exp.eval_quantity("f_max"), exp.eval_int("f_points"))
    q, q2 = exp.eval_int("q"), exp.eval_int("q_prime")
    lag = (q - q2) * cfg.delta_r
    markers = {f.min(), f.max()}
    rows = []
    for kappa in kappas:
        paths = _single_path(kappa, 100)
        closed = scf_closed(paths[0].aoa_dist, f, lag, cfg.beta_r, cfg)
        mc = estimate_stfcf(cfg, paths, [CorrelationQuery(f=x, q=q, q_prime=q2) for x in f], est)
        for i, x in enumerate(f):
            rows.append((kappa, x, cfg.f0 + x, closed[i].real, closed[i].imag, abs(closed[i]),
                         abs(mc.value[i]), mc.stderr[i], int(x in markers)))
    out = Path(out_dir)
    h = config_hash(cfg, est, list(kappas), f.tolist())
    files = [write_csv(out / "fig2.csv",
                       ["kappa", "f_hz", "abs_freq_hz", "closed_re", "closed_im", "closed_abs",
                        "mc_abs", "mc_stderr", "marker"],
                       rows, h, est.seed.master_seed, "closed+monte-carlo")]
    if opts.gnuplot:
        files.append(_gnuplot(out, "fig2",
                              "set xlabel 'f (GHz)'\nset ylabel '|SCF|'\n"
                              "plot for [k in '0 5 10'] 'fig2.csv' every ::1 using "
                              "($1==k ? $2/1e9 : 1/0):6 with lines title 'kappa='.k\n"))
    return files


# ----------------------------------------------------------------------------
# array-variant frequency correlation of one path

FIG3_BASE = {
    "array": {"m_t": "1", "m_r": "100", "delta_r": "0.5lam", "beta_r": "0.5pi", "f0": "2GHz"},
    "evaluation": {"nu_min": "-100MHz", "nu_max": "100MHz", "nu_points": "201",
                   "antennas": "50,75,100", "rho": "0.5"},
}


def run_fig3(out_dir, opts: RunOptions | None = None, kappas=KAPPAS) -> list[Path]:
    """|FCF| of a single path at several Rx elements: closed form, quadrature, Monte Carlo."""
    opts = opts or RunOptions()
    exp = _experiment(FIG3_BASE, opts)
    cfg = exp.array
    est = _estimator(exp, opts, 100)
    nu = np.linspace(exp.eval_quantity("nu_min"), exp.eval_quantity("nu_max"), exp.eval_int("nu_points"))
    antennas = opts.antennas or exp.antennas()
    rho = exp.eval_quantity("rho")
    rows, bw_rows = [], []
    for kappa in kappas:
        paths = _single_path(kappa, 100)
        draws = delay_draws(cfg, paths, antennas, est)
        for q in antennas:
            closed = fcf(cfg, paths, q, 1, nu, method="closed")
            quad = fcf(cfg, paths, q, 1, nu, method="quadrature")
            mc = fcf_from_draws(draws[q], nu)
            dq = cfg.rx_offset(q)
            for i, x in enumerate(nu):
                rows.append((kappa, q, dq, x, abs(closed[i]), abs(quad[i]), abs(mc.value[i]), mc.stderr[i]))
            orient = cfg.beta_r - paths[0].aoa_dist.mu
            bw_rows.append((kappa, q, dq, rho, coherence_bandwidth(paths[0].aoa_dist, rho, dq, orient)))
    out = Path(out_dir)
    h = config_hash(cfg, est, list(kappas), nu.tolist(), antennas)
    files = [
        write_csv(out / "fig3.csv", ["kappa", "antenna", "delta_q_m", "nu_hz", "closed_abs", "quad_abs",
                                     "mc_abs", "mc_stderr"],
                  rows, h, est.seed.master_seed, "closed+quadrature+monte-carlo"),
        write_csv(out / "fig3_bandwidth.csv", ["kappa", "antenna", "delta_q_m", "rho", "coherence_bandwidth_hz"],
                  bw_rows, h, est.seed.master_seed, "closed"),
    ]
    if opts.gnuplot:
        files.append(_gnuplot(out, "fig3",
                              "set xlabel 'nu (MHz)'\nset ylabel '|FCF|'\n"
                              "plot for [q in '50 75 100'] 'fig3.csv' every ::1 using "
                              "(($1==0 && $2==q) ? $4/1e6 : 1/0):5 with lines title 'A'.q\n"))
    return files


# ----------------------------------------------------------------------------
# multi-ellipse PDP and FCF

FIG45_BASE = {
    "array": {"m_t": "1", "m_r": "100", "delta_r": "0.5lam", "beta_r": "0", "f0": "2GHz"},
    "generator": {"n_paths": "100", "n_scatterers": "100", "tau_rms": "30ns",
                  "kappa_min": "0", "kappa_max": "10", "mean_min": "0", "mean_max": "2pi"},
    "evaluation": {"antennas": "50,100", "nu_min": "-100MHz", "nu_max": "100MHz", "nu_points": "201",
                   "tau_points": "128"},
}


def _cluster_setup(opts: RunOptions):
    exp = _experiment(FIG45_BASE, opts)
    gen = exp.generator
    if gen is None:
        raise ValueError("figure 4/5 runs need a [generator] section")
    if opts.paper_scale:
        gen = replace(gen, n_paths=1000)
    if opts.scatterers:
        gen = replace(gen, n_scatterers=opts.scatterers)
    est = _estimator(exp, replace(opts, scatterers=None), 100)
    return exp, gen, est, opts.antennas or exp.antennas()


def _labelled_generators(gen: ClusterGenerator):
    return {label: replace(gen, mean_range=rng) for label, rng in MEAN_RANGES.items()}


def _semi_pdp(cfg: ArrayConfig, gen: ClusterGenerator, est: EstimatorConfig, q: int, centres):
    """Closed-form composite PDP averaged over the same cluster draws."""
    acc = np.zeros(centres.size)
    mean = second = 0.0
    for r in range(est.n_realizations):
        paths = gen.draw(est.seed, r)
        acc += composite_pdp(cfg, paths, q, centres).density
        m = delay_spread(cfg, paths, q)
        mean += m.mean
        second += m.rms ** 2 + m.mean ** 2
    n = est.n_realizations
    mean /= n
    return acc / n, mean, math.sqrt(max(second / n - mean * mean, 0.0))


def run_fig4(out_dir, opts: RunOptions | None = None) -> list[Path]:
    """Array-variant PDP at selected Rx elements for wide and narrow mean-AOA ranges."""
    opts = opts or RunOptions()
    exp, gen0, est, antennas = _cluster_setup(opts)
    cfg = exp.array
    nbins = exp.eval_int("tau_points")
    out = Path(out_dir)
    files, stats = [], []
    for label, gen in _labelled_generators(gen0).items():
        draws = delay_draws(cfg, gen, antennas, est)
        edges = auto_bins(np.concatenate([d for q in antennas for d, _ in draws[q]]), nbins)
        centres = 0.5 * (edges[1:] + edges[:-1])
        cols, columns = [centres], ["tau_s"]
        for q in antennas:
            mc = pdp_from_draws(draws[q], edges, q)
            semi, s_mean, s_rms = _semi_pdp(cfg, gen, est, q, centres)
            mc_mean, mc_rms = moments_from_draws(draws[q])
            cols += [mc.density, mc.stderr, semi]
            columns += [f"mc_density_a{q}", f"mc_stderr_a{q}", f"semi_density_a{q}"]
            stats.append((label, q, cfg.rx_offset(q) / SPEED_OF_LIGHT, mc_mean, mc_rms, s_mean, s_rms))
        h = config_hash(cfg, gen, est, antennas, nbins)
        files.append(write_csv(out / f"fig4_{label}.csv", columns, list(zip(*cols)), h,
                               est.seed.master_seed, "monte-carlo+semi-analytic"))
    files.append(write_csv(out / "fig4_stats.csv",
                           ["mean_range", "antenna", "tau_q_s", "mc_mean_s", "mc_rms_s", "semi_mean_s",
                            "semi_rms_s"],
                           stats, config_hash(cfg, gen0, est, antennas), est.seed.master_seed,
                           "monte-carlo+semi-analytic"))
    if opts.gnuplot:
        files.append(_gnuplot(out, "fig4",
                              "set xlabel 'tau (ns)'\nset ylabel 'PDP (1/s)'\nset logscale y\n"
                              "plot 'fig4_full.csv' every ::1 using ($1*1e9):2 with lines, "
                              "'' every ::1 using ($1*1e9):5 with lines\n"))
    return files


def run_fig5(out_dir, opts: RunOptions | None = None) -> list[Path]:
    """Array-variant FCF at selected Rx elements for wide and narrow mean-AOA ranges."""
    opts = opts or RunOptions()
    exp, gen0, est, antennas = _cluster_setup(opts)
    cfg = exp.array
    nu = np.linspace(exp.eval_quantity("nu_min"), exp.eval_quantity("nu_max"), exp.eval_int("nu_points"))
    out = Path(out_dir)
    files = []
    for label, gen in _labelled_generators(gen0).items():
        draws = delay_draws(cfg, gen, antennas, est)
        cols, columns = [nu], ["nu_hz"]
        for q in antennas:
            mc = fcf_from_draws(draws[q], nu)
            semi = np.zeros(nu.size, dtype=complex)
            for r in range(est.n_realizations):
                semi += fcf(cfg, gen.draw(est.seed, r), q, 1, nu, method="closed")
            semi /= est.n_realizations
            cols += [mc.value.real, mc.value.imag, np.abs(mc.value), mc.stderr,
                     semi.real, semi.imag, np.abs(semi)]
            columns += [f"{k}_a{q}" for k in ("mc_re", "mc_im", "mc_abs", "mc_stderr",
                                              "semi_re", "semi_im", "semi_abs")]
        h = config_hash(cfg, gen, est, antennas, nu.tolist())
        files.append(write_csv(out / f"fig5_{label}.csv", columns, list(zip(*cols)), h,
                               est.seed.master_seed, "monte-carlo+semi-analytic"))
    if opts.gnuplot:
        files.append(_gnuplot(out, "fig5",
                              "set xlabel 'nu (MHz)'\nset ylabel '|FCF|'\n"
                              "plot 'fig5_full.csv' every ::1 using ($1/1e6):4 with lines, "
                              "'' every ::1 using ($1/1e6):11 with lines\n"))
    return files
