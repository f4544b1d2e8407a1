"""Random ingredients: von Mises AOAs, phases, exponential delays, realizations.

Random numbers come from numpy's PCG64 bit generator seeded through
``SeedSequence(entropy=master_seed, spawn_key=(stream_id, *purpose))``.
Every (realization, path, purpose) triple gets its own stream, so draws do
not depend on evaluation order or on how work is split across threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bessel import bessel_i
from .errors import ConfigurationError, DomainError
from .geometry import TWO_PI, ArrayConfig, EllipsePath, aoa_to_aod, wrap_angle

RNG_ALGORITHM = "PCG64 via numpy.random.SeedSequence"

# stream purposes
AOA, PHASE, DELAY, KAPPA, MEAN_AOA, SAMPLE = range(6)


@dataclass(frozen=True)
class VonMises:
    """Von Mises law on the circle with mean ``mu`` and concentration ``kappa``."""

    mu: float = math.pi
    kappa: float = 0.0

    def __post_init__(self):
        if not self.kappa >= 0 or not math.isfinite(self.kappa):
            raise DomainError(f"kappa must be finite and >= 0, got {self.kappa}")
        object.__setattr__(self, "mu", wrap_angle(self.mu))


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int = 0
    stream_id: int = 0

    def generator(self, *purpose: int) -> np.random.Generator:
        """Independent generator for a purpose path below this seed."""
        ss = np.random.SeedSequence(entropy=self.master_seed,
                                    spawn_key=(self.stream_id, *purpose))
        return np.random.Generator(np.random.PCG64(ss))


def von_mises_pdf(d: VonMises, x):
    """Density in 1/rad at angle(s) ``x``."""
    x = np.asarray(x, dtype=float)
    scaled_i0 = bessel_i(0, d.kappa, scaled=True).real
    out = np.exp(d.kappa * (np.cos(x - d.mu) - 1.0)) / (TWO_PI * scaled_i0)
    return float(out) if out.ndim == 0 else out


def _draw_vonmises(kappa: float, n: int, rng: np.random.Generator) -> np.ndarray:
    if kappa < 1e-8:
        return (1.0 - rng.random(n)) * TWO_PI - math.pi
    chunks, have = [], 0
    while have < n:
        # acceptance rate is at least ~0.65, so 1.6 n attempts usually suffice
        attempts = int(1.6 * (n - have)) + 16
        got = kernels.vonmises_accept(kappa, rng.random((attempts, 3)))
        chunks.append(got)
        have += got.shape[0]
    return np.concatenate(chunks)[:n]


def sample_von_mises(d: VonMises, n: int, seed: SeedSpec, *purpose: int) -> np.ndarray:
    """``n`` i.i.d. von Mises angles in ``(0, 2 pi]`` (Best-Fisher rejection)."""
    if n < 1:
        raise DomainError("need n >= 1")
    rng = seed.generator(*(purpose or (SAMPLE,)))
    return wrap_angle(d.mu + _draw_vonmises(d.kappa, n, rng))


def sample_exponential_delays(tau_rms: float, n: int, seed: SeedSpec, *purpose: int) -> np.ndarray:
    """``n`` exponential delays with mean ``tau_rms`` seconds."""
    if not tau_rms > 0:
        raise DomainError("tau_rms must be positive")
    if n < 1:
        raise DomainError("need n >= 1")
    rng = seed.generator(*(purpose or (DELAY,)))
    return rng.exponential(tau_rms, n)


@dataclass
class PathScatterers:
    """Scatterers of one ellipse in one realization."""

    tau0: float
    gain: float
    aoa: np.ndarray
    aod: np.ndarray | None
    phase: np.ndarray
    doppler: np.ndarray


@dataclass
class ScattererRealization:
    paths: list[PathScatterers] = field(default_factory=list)

    @property
    def n_scatterers(self) -> int:
        return sum(p.aoa.shape[0] for p in self.paths)


def normalize_gains(paths: list[EllipsePath], tol: float = 1e-9) -> list[EllipsePath]:
    """Rescale gains so that ``sum c^2 = 1``, warning when a change was needed."""
    power = sum(p.gain ** 2 for p in paths)
    if not power > 0:
        raise ConfigurationError("total path power must be positive")
    if abs(power - 1.0) <= tol:
        return list(paths)
    warnings.warn(f"path powers sum to {power:.6g}; normalizing to 1", stacklevel=3)
    scale = 1.0 / math.sqrt(power)
    return [EllipsePath(p.tau0, p.gain * scale, p.aoa_dist, p.n_scatterers, p.k_ell) for p in paths]


def power_weights(paths: list[EllipsePath]) -> np.ndarray:
    """``c_l^2`` normalized to unit sum (silently)."""
    w = np.array([p.gain ** 2 for p in paths], dtype=float)
    total = w.sum()
    if not total > 0:
        raise ConfigurationError("total path power must be positive")
    return w / total


def generate_realization(cfg: ArrayConfig, paths: list[EllipsePath], seed: SeedSpec,
                         realization: int = 0, n_scatterers: int | None = None) -> ScattererRealization:
    """Draw AOAs, AODs, phases and Doppler shifts for every ellipse.

    AODs are produced whenever ``k_ell`` is known; when it is missing they are
    left as ``None``, which is only allowed for a single Tx antenna.
    """
    paths = normalize_gains(paths)
    out = ScattererRealization()
    for ell, path in enumerate(paths):
        if path.k_ell is None and cfg.m_t > 1:
            raise ConfigurationError(f"path {ell} needs k_ell for a {cfg.m_t}-element Tx array")
        n = n_scatterers or path.n_scatterers
        aoa = sample_von_mises(path.aoa_dist, n, seed, realization, ell, AOA)
        phase = TWO_PI * (1.0 - seed.generator(realization, ell, PHASE).random(n))
        aod = aoa_to_aod(path, aoa) if path.k_ell is not None else None
        doppler = cfg.f_max * np.cos(aoa - cfg.alpha_v)
        out.paths.append(PathScatterers(path.tau0, path.gain, aoa, aod, phase, doppler))
    return out


@dataclass(frozen=True)
class ClusterGenerator:
    """Random multi-ellipse channel: exponential delays and random AOA laws.

    Gains are equal, ``1/sqrt(n_paths)``. ``kappa_range`` and ``mean_range``
    are uniform ranges for the concentration and the mean AOA.
    """

    n_paths: int = 100
    n_scatterers: int = 100
    tau_rms: float = 30e-9
    kappa_range: tuple[float, float] = (0.0, 10.0)
    mean_range: tuple[float, float] = (0.0, TWO_PI)
    k_ell: float | None = None

    def __post_init__(self):
        if self.n_paths < 1 or self.n_scatterers < 1:
            raise ConfigurationError("generator needs at least one path and one scatterer")
        if not self.tau_rms > 0:
            raise ConfigurationError("tau_rms must be positive")

    def draw(self, seed: SeedSpec, realization: int = 0) -> list[EllipsePath]:
        big = 1 << 20  # keeps generator streams apart from realization streams
        tau = sample_exponential_delays(self.tau_rms, self.n_paths, seed, big + realization, DELAY)
        kappa = seed.generator(big + realization, KAPPA).uniform(*self.kappa_range, self.n_paths)
        mu = seed.generator(big + realization, MEAN_AOA).uniform(*self.mean_range, self.n_paths)
        gain = 1.0 / math.sqrt(self.n_paths)
        return [EllipsePath(float(t), gain, VonMises(float(m), float(k)), self.n_scatterers, self.k_ell)
                for t, k, m in zip(tau, kappa, mu)]
