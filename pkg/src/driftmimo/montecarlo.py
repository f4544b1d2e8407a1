"""Monte Carlo engine: finite-scatterer channels and empirical statistics.

Each realization redraws AOAs and phases (and, for a
:class:`~driftmimo.stochastic.ClusterGenerator`, the ellipses themselves)
from its own seed stream. Per-realization results are stacked in
realization order and reduced with numpy, so the outcome does not depend
on ``workers``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import kernels
from .correlation import CorrelationGrid, CorrelationQuery, config_hash
from .delay_stats import PdpCurve
from .errors import ConfigurationError, CoverageError
from .geometry import SPEED_OF_LIGHT, TWO_PI, ArrayConfig, EllipsePath
from .stochastic import ClusterGenerator, ScattererRealization, SeedSpec, generate_realization

Paths = Union[Sequence[EllipsePath], ClusterGenerator]


@dataclass(frozen=True)
class EstimatorConfig:
    n_realizations: int = 100
    n_scatterers_override: int | None = None
    seed: SeedSpec = field(default_factory=SeedSpec)
    workers: int = 1

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ConfigurationError("need at least one realization")


@dataclass
class Estimate:
    """Sample mean over realizations with its standard error."""

    value: np.ndarray | complex
    stderr: np.ndarray | float
    n: int


@dataclass
class TransferFunctionSample:
    t: float
    f: np.ndarray
    values: np.ndarray  # indexed [q - 1, p - 1, f]


def _paths_for(paths: Paths, seed: SeedSpec, r: int) -> list[EllipsePath]:
    if isinstance(paths, ClusterGenerator):
        return paths.draw(seed, r)
    return list(paths)


def _realization(cfg: ArrayConfig, paths: Paths, est: EstimatorConfig, r: int):
    drawn = _paths_for(paths, est.seed, r)
    return drawn, generate_realization(cfg, drawn, est.seed, r, est.n_scatterers_override)


def _map(fn, est: EstimatorConfig):
    if est.workers > 1:
        with ThreadPoolExecutor(est.workers) as pool:
            return list(pool.map(fn, range(est.n_realizations)))
    return [fn(r) for r in range(est.n_realizations)]


def _summarize(samples: np.ndarray) -> Estimate:
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    if n < 2:
        return Estimate(mean, np.full(np.shape(mean), np.inf), n)
    var = samples.real.var(axis=0, ddof=1)
    if np.iscomplexobj(samples):
        var = var + samples.imag.var(axis=0, ddof=1)
    return Estimate(mean, np.sqrt(var / n), n)


def _flatten(cfg: ArrayConfig, real: ScattererRealization, p: int, q: int, t: float):
    """Per-scatterer weight, phase at f = 0 and drifted delay, concatenated over paths."""
    k = cfg.wavenumber
    dp, dq = cfg.tx_offset(p), cfg.rx_offset(q)
    w, ph, dl = [], [], []
    for path in real.paths:
        n = path.aoa.shape[0]
        c_r = np.cos(path.aoa - cfg.beta_r)
        if dp != 0.0:
            if path.aod is None:
                raise ConfigurationError("Tx element off centre needs AODs (k_ell)")
            c_t = np.cos(path.aod - cfg.beta_t)
        else:
            c_t = np.zeros(n)
        geo = dp * c_t + dq * c_r  # metres
        w.append(np.full(n, path.gain / math.sqrt(n), dtype=complex))
        ph.append(path.phase + TWO_PI * path.doppler * t + k * geo)
        dl.append(path.tau0 - geo / SPEED_OF_LIGHT)
    return np.concatenate(w), np.concatenate(ph), np.concatenate(dl)


def transfer_function(cfg: ArrayConfig, realization: ScattererRealization, p: int, q: int, t: float,
                      f, form: str = "delay"):
    """Finite-scatterer transfer function ``H_qp(t, f)``.

    ``form="delay"`` sums ``a b exp(-j 2 pi f tau_qp)`` with the drifted delays;
    ``form="exponent"`` uses ``(a b)^(1 + f/f0) exp(-j 2 pi f tau0)``, the same
    quantity written through the carrier-scaled phase.
    """
    f = np.atleast_1d(np.asarray(f, dtype=float))
    w, ph, dl = _flatten(cfg, realization, p, q, t)
    if form == "delay":
        return kernels.sinusoid_sum(w, ph, dl, f)
    if form != "exponent":
        raise ValueError(f"unknown form {form!r}")
    k = cfg.wavenumber
    dp, dq = cfg.tx_offset(p), cfg.rx_offset(q)
    out = np.zeros(f.shape, dtype=complex)
    for path in realization.paths:
        n = path.aoa.shape[0]
        c_t = np.cos(path.aod - cfg.beta_t) if dp != 0.0 else 0.0
        log_ab = k * (dp * c_t + dq * np.cos(path.aoa - cfg.beta_r))
        base = path.phase + TWO_PI * path.doppler * t
        arg = (1.0 + f[:, None] / cfg.f0) * log_ab[None, :] + base[None, :]
        out += path.gain / math.sqrt(n) * np.exp(1j * arg).sum(axis=1) * np.exp(-1j * TWO_PI * f * path.tau0)
    return out


def sample_transfer_functions(cfg: ArrayConfig, realization: ScattererRealization, t: float,
                              f) -> TransferFunctionSample:
    """``H_qp(t, f)`` for every antenna pair, shaped ``(m_r, m_t, len(f))``."""
    f = np.atleast_1d(np.asarray(f, dtype=float))
    values = np.empty((cfg.m_r, cfg.m_t, f.size), dtype=complex)
    for q in range(1, cfg.m_r + 1):
        for p in range(1, cfg.m_t + 1):
            values[q - 1, p - 1] = transfer_function(cfg, realization, p, q, t, f)
    return TransferFunctionSample(t, f, values)


def estimate_stfcf(cfg: ArrayConfig, paths: Paths, queries, est: EstimatorConfig,
                   estimator: str = "scatterer") -> Estimate:
    """Monte Carlo estimate of the space-time-frequency correlation.

    ``estimator="channel"`` averages ``H_qp(0, f)^* H_q'p'(dt, f + nu)`` over
    realizations, the definition itself. ``estimator="scatterer"`` averages
    the per-scatterer correlation phasor instead; same expectation, far
    smaller variance because the random phases cancel exactly.
    """
    single = isinstance(queries, CorrelationQuery)
    qs = [queries] if single else list(queries)
    if estimator not in ("channel", "scatterer"):
        raise ValueError(f"unknown estimator {estimator!r}")

    def one(r):
        drawn, real = _realization(cfg, paths, est, r)
        out = np.empty(len(qs), dtype=complex)
        for i, qy in enumerate(qs):
            if estimator == "channel":
                h1 = transfer_function(cfg, real, qy.p, qy.q, 0.0, [qy.f])[0]
                h2 = transfer_function(cfg, real, qy.p_prime, qy.q_prime, qy.delta_t, [qy.f + qy.nu])[0]
                out[i] = np.conj(h1) * h2
            else:
                out[i] = _scatterer_correlation(cfg, real, qy)
        return out

    samples = np.array(_map(one, est))
    res = _summarize(samples)
    if single:
        return Estimate(complex(res.value[0]), float(res.stderr[0]), res.n)
    return res


def _scatterer_correlation(cfg: ArrayConfig, real: ScattererRealization, qy: CorrelationQuery) -> complex:
    k_f = TWO_PI * (cfg.f0 + qy.f) / SPEED_OF_LIGHT
    k_nu = TWO_PI * qy.nu / SPEED_OF_LIGHT
    lag_p = (qy.p - qy.p_prime) * cfg.delta_t
    lag_q = (qy.q - qy.q_prime) * cfg.delta_r
    off_p, off_q = cfg.tx_offset(qy.p_prime), cfg.rx_offset(qy.q_prime)
    power = sum(p.gain ** 2 for p in real.paths)
    total = 0j
    for path in real.paths:
        phase = (k_f * lag_q + k_nu * off_q) * np.cos(path.aoa - cfg.beta_r)
        tx = k_f * lag_p + k_nu * off_p
        if tx != 0.0:
            if path.aod is None:
                raise ConfigurationError("Tx-side lag needs AODs (k_ell)")
            phase = phase + tx * np.cos(path.aod - cfg.beta_t)
        phase = phase + TWO_PI * path.doppler * qy.delta_t
        total += path.gain ** 2 * np.exp(-1j * TWO_PI * qy.nu * path.tau0) * np.exp(1j * phase).mean()
    return total / power


def _delays(cfg: ArrayConfig, real: ScattererRealization, p: int, q: int):
    w, _, dl = _flatten(cfg, real, p, q, 0.0)
    power = np.abs(w) ** 2
    return dl, power / power.sum()


def delay_draws(cfg: ArrayConfig, paths: Paths, antennas, est: EstimatorConfig, p: int = 1):
    """Power-weighted drifted delays per realization for several Rx elements.

    Returns ``{q: [(delays, weights), ...]}`` with one entry per realization;
    the same scatterers are used for every ``q``.
    """
    antennas = list(antennas)

    def one(r):
        real = _realization(cfg, paths, est, r)[1]
        return [_delays(cfg, real, p, q) for q in antennas]

    rows = _map(one, est)
    return {q: [row[i] for row in rows] for i, q in enumerate(antennas)}


def auto_bins(delays: np.ndarray, nbins: int = 512, margin: float = 0.05) -> np.ndarray:
    lo, hi = float(np.min(delays)), float(np.max(delays))
    pad = margin * max(hi - lo, 1e-12)
    return np.linspace(lo - pad, hi + pad, nbins + 1)


def pdp_from_draws(draws, bins=512, antenna: int = 0) -> PdpCurve:
    """Histogram PDP (unit area) averaged over realizations of ``(delays, weights)`` pairs."""
    if np.ndim(bins) == 0:
        edges = auto_bins(np.concatenate([d for d, _ in draws]), int(bins))
    else:
        edges = np.asarray(bins, dtype=float)
        widths = np.diff(edges)
        if edges.size < 2 or np.any(widths <= 0) or np.ptp(widths) > 1e-9 * widths.mean():
            raise ConfigurationError("bin edges must be uniform and increasing")
    width = edges[1] - edges[0]
    nb = edges.size - 1
    hists = []
    for delays, weights in draws:
        mass, outside = kernels.histogram_uniform(delays, weights, edges[0], width, nb)
        # the top edge is inclusive for the last bin
        top = delays == edges[-1]
        if np.any(top):
            mass[-1] += weights[top].sum()
            outside -= weights[top].sum()
        if outside > 1e-12:
            raise CoverageError(
                f"{outside:.3g} of the power lies outside [{edges[0]:.4g}, {edges[-1]:.4g}] s")
        hists.append(mass / width)
    res = _summarize(np.array(hists))
    centres = 0.5 * (edges[1:] + edges[:-1])
    return PdpCurve(centres, np.asarray(res.value), antenna, "monte-carlo", edges,
                    stderr=np.asarray(res.stderr))


def fcf_from_draws(draws, nu) -> Estimate:
    """Fourier transform of each realization's delay samples, averaged."""
    nu = np.asarray(nu, dtype=float)
    rows = [kernels.sinusoid_sum(w.astype(complex), np.zeros_like(d), d, nu) for d, w in draws]
    return _summarize(np.array(rows))


def moments_from_draws(draws) -> tuple[float, float]:
    """Mean and RMS delay of the pooled power-weighted samples (no binning)."""
    d = np.concatenate([x for x, _ in draws])
    w = np.concatenate([x for _, x in draws])
    w = w / w.sum()
    mean = float(w @ d)
    return mean, math.sqrt(float(w @ (d - mean) ** 2))


def empirical_pdp(cfg: ArrayConfig, paths: Paths, q: int, bins, est: EstimatorConfig, p: int = 1) -> PdpCurve:
    """Power-weighted histogram of drifted delays, averaged over realizations.

    ``bins`` is a bin count (support found from the draws, 5% margins) or an
    array of uniform edges. Explicit edges that miss any realized delay raise
    :class:`CoverageError`.
    """
    return pdp_from_draws(delay_draws(cfg, paths, [q], est, p)[q], bins, q)


def empirical_delay_moments(cfg: ArrayConfig, paths: Paths, q: int, est: EstimatorConfig, p: int = 1):
    return moments_from_draws(delay_draws(cfg, paths, [q], est, p)[q])


def empirical_fcf(cfg: ArrayConfig, paths: Paths, q: int, nu_grid, est: EstimatorConfig,
                  p: int = 1) -> CorrelationGrid:
    """Fourier transform of the empirical PDP, averaged over realizations.

    The transform is taken of the power-weighted delay samples themselves
    rather than of binned counts, so there is no bin-width smoothing and the
    value at ``nu = 0`` is exactly 1.
    """
    nu = np.asarray(nu_grid, dtype=float)
    res = fcf_from_draws(delay_draws(cfg, paths, [q], est, p)[q], nu)
    meta = {"config_hash": config_hash(cfg, est.seed), "seed": est.seed.master_seed,
            "realizations": est.n_realizations, "antenna": q}
    return CorrelationGrid({"nu": ("Hz", nu)}, np.asarray(res.value), "monte-carlo", meta,
                           stderr=np.asarray(res.stderr))
