"""Space-time-frequency correlation of the delay-drift elliptical model.

Every expectation over the AOA law is a one-period integral evaluated by
:func:`~driftmimo.bessel.angular_expectation`. Closed forms for von Mises
AOAs reduce to ``I0`` of a complex argument (see :func:`vm_characteristic`).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bessel import angular_expectation, bessel_i
from .errors import ConfigurationError, DomainError
from .geometry import SPEED_OF_LIGHT, TWO_PI, ArrayConfig, EllipsePath, aoa_to_aod
from .stochastic import VonMises, power_weights, von_mises_pdf

DEFAULT_NODES = 1 << 14


@dataclass(frozen=True)
class CorrelationQuery:
    """Lags of ``E[H_qp(t, f)^* H_q'p'(t + delta_t, f + nu)]``.

    Antenna indices are 1-based; ``f`` is the offset from the carrier.
    """

    delta_t: float = 0.0
    f: float = 0.0
    nu: float = 0.0
    p: int = 1
    p_prime: int = 1
    q: int = 1
    q_prime: int = 1


@dataclass
class CorrelationGrid:
    """Sampled correlation values with their axes.

    ``axes`` maps axis name to ``(unit, samples)`` in the order of the value
    dimensions.
    """

    axes: dict[str, tuple[str, np.ndarray]]
    values: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)
    stderr: np.ndarray | None = None

    def __post_init__(self):
        shape = tuple(len(samples) for _, samples in self.axes.values())
        if self.values.shape != shape:
            raise ConfigurationError(f"values shape {self.values.shape} does not match axes {shape}")


def config_hash(*objs) -> str:
    """Short stable hash of dataclass/JSON-able objects."""
    def enc(o):
        if hasattr(o, "__dataclass_fields__"):
            return {type(o).__name__: asdict(o)}
        if isinstance(o, (list, tuple)):
            return [enc(v) for v in o]
        return o
    blob = json.dumps([enc(o) for o in objs], sort_keys=True, default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def vm_characteristic(d: VonMises, x, beta: float):
    """``E[exp(j x cos(alpha - beta))]`` for ``alpha ~ d``.

    Equals ``I0(sqrt(kappa^2 - x^2 + 2 j kappa x cos(beta - mu))) / I0(kappa)``
    with the principal square root; evaluated with scaled Bessel functions so
    large ``kappa`` does not overflow.
    """
    x = np.asarray(x, dtype=float)
    kappa = d.kappa
    arg = np.sqrt(kappa * kappa - x * x + 2j * kappa * x * math.cos(beta - d.mu) + 0j)
    num = bessel_i(0, arg, scaled=True)
    den = bessel_i(0, kappa, scaled=True).real
    out = num / den * np.exp(np.abs(np.real(arg)) - kappa)
    return complex(out) if np.ndim(out) == 0 else out


def _needs_aod(path: EllipsePath, tx_term) -> bool:
    if np.any(np.asarray(tx_term) != 0.0):
        if path.k_ell is None:
            raise ConfigurationError("a Tx-side lag needs k_ell on every path")
        return True
    return False


def _path_expectation(cfg: ArrayConfig, path: EllipsePath, tx_scale, rx_scale,
                      doppler_lag: float = 0.0, nodes: int = DEFAULT_NODES):
    """``E[exp(j (tx_scale cos(aT - bT) + rx_scale cos(aR - bR) + 2pi fD dt))]``.

    ``tx_scale``/``rx_scale`` may be arrays (broadcast together); the result
    has their broadcast shape.
    """
    tx_scale, rx_scale = np.broadcast_arrays(np.asarray(tx_scale, float), np.asarray(rx_scale, float))
    use_tx = _needs_aod(path, tx_scale)
    doppler = TWO_PI * cfg.f_max * doppler_lag

    def integrand(theta):
        pdf = von_mises_pdf(path.aoa_dist, theta)
        phase = rx_scale[..., None] * np.cos(theta - cfg.beta_r)
        if use_tx:
            phase = phase + tx_scale[..., None] * np.cos(aoa_to_aod(path, theta) - cfg.beta_t)
        if doppler:
            phase = phase + doppler * np.cos(theta - cfg.alpha_v)
        return pdf * np.exp(1j * phase)

    out = angular_expectation(integrand, nodes)
    return complex(out) if np.ndim(out) == 0 else out


def stfcf(cfg: ArrayConfig, paths: list[EllipsePath], query: CorrelationQuery,
          nodes: int = DEFAULT_NODES) -> complex:
    """Space-time-frequency correlation by quadrature over the AOA law.

    Drift terms use the offsets of the primed antennas, which is what the
    expectation of ``H^* H'`` produces; for ``q = q'`` and ``p = p'`` this is
    the same as using the unprimed ones.
    """
    weights = power_weights(paths)
    k_f = TWO_PI * (cfg.f0 + query.f) / SPEED_OF_LIGHT
    k_nu = TWO_PI * query.nu / SPEED_OF_LIGHT
    lag_p = (query.p - query.p_prime) * cfg.delta_t
    lag_q = (query.q - query.q_prime) * cfg.delta_r
    off_p = cfg.tx_offset(query.p_prime)
    off_q = cfg.rx_offset(query.q_prime)
    total = 0j
    for w, path in zip(weights, paths):
        inner = _path_expectation(cfg, path, k_f * lag_p + k_nu * off_p,
                                  k_f * lag_q + k_nu * off_q, query.delta_t, nodes)
        total += w * np.exp(-1j * TWO_PI * query.nu * path.tau0) * inner
    return complex(total)


def scf_numeric(cfg: ArrayConfig, paths: list[EllipsePath], f, delta_pp: float, delta_qq: float,
                nodes: int = DEFAULT_NODES):
    """Frequency-variant spatial correlation by quadrature.

    ``delta_pp``/``delta_qq`` are element separations in metres; ``f`` (Hz
    offset from the carrier, scalar or array) must keep ``f0 + f > 0``.
    """
    f = np.asarray(f, dtype=float)
    if np.any(cfg.f0 + f <= 0):
        raise DomainError("absolute frequency f0 + f must be positive")
    k = TWO_PI * (cfg.f0 + f) / SPEED_OF_LIGHT
    weights = power_weights(paths)
    total = sum(w * _path_expectation(cfg, path, k * delta_pp, k * delta_qq, 0.0, nodes)
                for w, path in zip(weights, paths))
    return complex(total) if np.ndim(total) == 0 else total


def scf_closed(d: VonMises, f, delta_qq: float, beta_r: float, cfg: ArrayConfig):
    """Receive-side spatial correlation in closed form at frequency ``f0 + f``."""
    f = np.asarray(f, dtype=float)
    x = TWO_PI * (cfg.f0 + f) * delta_qq / SPEED_OF_LIGHT
    return vm_characteristic(d, x, beta_r)


def scf_narrowband(d: VonMises, delta_qq: float, beta_r: float, cfg: ArrayConfig):
    """Conventional receive-side spatial correlation at the carrier."""
    return scf_closed(d, 0.0, delta_qq, beta_r, cfg)


def fcf_taps(paths: list[EllipsePath], nu):
    """Tapped-delay-line frequency correlation ``sum c^2 exp(-j 2 pi nu tau0)``."""
    nu = np.asarray(nu, dtype=float)
    weights = power_weights(paths)
    tau = np.array([p.tau0 for p in paths])
    out = np.exp(-1j * TWO_PI * nu[..., None] * tau) @ weights
    return complex(out) if np.ndim(out) == 0 else out


def path_fcf_numeric(cfg: ArrayConfig, path: EllipsePath, delta_p: float, delta_q: float, nu,
                     nodes: int = DEFAULT_NODES):
    """Path-level frequency correlation at element offsets ``delta_p``/``delta_q`` (quadrature)."""
    k = TWO_PI * np.asarray(nu, dtype=float) / SPEED_OF_LIGHT
    return _path_expectation(cfg, path, k * delta_p, k * delta_q, 0.0, nodes)


def path_fcf_closed(d: VonMises, delta_q: float, beta_r: float, nu):
    """Path-level frequency correlation of a receive-side element, closed form.

    Depends on ``delta_q`` and ``nu`` only through their product.
    """
    x = TWO_PI * delta_q * np.asarray(nu, dtype=float) / SPEED_OF_LIGHT
    return vm_characteristic(d, x, beta_r)


def fcf(cfg: ArrayConfig, paths: list[EllipsePath], q: int, p: int, nu, method: str = "auto",
        nodes: int = DEFAULT_NODES):
    """Array-variant frequency correlation at Rx element ``q`` and Tx element ``p``.

    Per-path products ``c^2 exp(-j 2 pi nu tau0) r_l(nu)`` are summed over the
    paths. ``method`` is ``"closed"``, ``"quadrature"`` or ``"auto"`` (closed
    form whenever the Tx element sits at its array centre).
    """
    delta_p = cfg.tx_offset(p)
    delta_q = cfg.rx_offset(q)
    if method not in ("auto", "closed", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    if method == "closed" and delta_p != 0.0:
        raise DomainError("closed form covers receive-side elements only (delta_p = 0)")
    closed = method == "closed" or (method == "auto" and delta_p == 0.0)
    nu = np.asarray(nu, dtype=float)
    weights = power_weights(paths)
    total = 0j
    for w, path in zip(weights, paths):
        if closed:
            inner = path_fcf_closed(path.aoa_dist, delta_q, cfg.beta_r, nu)
        else:
            inner = path_fcf_numeric(cfg, path, delta_p, delta_q, nu, nodes)
        total = total + w * np.exp(-1j * TWO_PI * nu * path.tau0) * inner
    return complex(total) if np.ndim(total) == 0 else total


def stcf_separable_gap(cfg: ArrayConfig, paths: list[EllipsePath], query: CorrelationQuery,
                       nodes: int = DEFAULT_NODES) -> float:
    """Relative error of approximating the STFCF by ``STCF(dt) * r(nu)``."""
    full = stfcf(cfg, paths, query, nodes)
    stcf = stfcf(cfg, paths, CorrelationQuery(query.delta_t, query.f, 0.0, query.p, query.p_prime,
                                              query.q, query.q_prime), nodes)
    return abs(full - stcf * fcf_taps(paths, query.nu)) / abs(full)
