"""Elliptical scattering geometry with two uniform linear arrays.

Coordinates: the Tx array centre sits at ``(-f, 0)`` and the Rx array
centre at ``(+f, 0)``, the two foci of every ellipse. Angles are measured
counter-clockwise from the positive x-axis, AOAs from the Rx centre and
AODs from the Tx centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConfigurationError, DomainError

SPEED_OF_LIGHT = 299_792_458.0
TWO_PI = 2.0 * math.pi


def wrap_angle(x):
    """Reduce angles to the half-open interval ``(0, 2 pi]``."""
    y = np.mod(x, TWO_PI)
    y = np.where(y == 0.0, TWO_PI, y)
    return float(y) if np.ndim(y) == 0 else y


@dataclass(frozen=True)
class ArrayConfig:
    """Both arrays, the carrier and the receiver motion.

    Spacings are in metres, angles in radians, ``f0`` in Hz and ``v`` in m/s.
    """

    m_t: int = 1
    m_r: int = 2
    delta_t: float = 0.0
    delta_r: float = 0.0
    beta_t: float = 0.0
    beta_r: float = 0.0
    f0: float = 2e9
    v: float = 0.0
    alpha_v: float = 0.0

    def __post_init__(self):
        if self.m_t < 1 or self.m_r < 1:
            raise ConfigurationError("antenna counts must be >= 1")
        if self.delta_t < 0 or self.delta_r < 0:
            raise ConfigurationError("element spacings must be >= 0")
        if not self.f0 > 0:
            raise ConfigurationError("carrier frequency must be positive")
        if self.v < 0:
            raise ConfigurationError("speed must be >= 0")
        for name in ("delta_t", "delta_r", "beta_t", "beta_r", "f0", "v", "alpha_v"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f0

    @property
    def wavenumber(self) -> float:
        return TWO_PI / self.wavelength

    @property
    def f_max(self) -> float:
        """Maximum Doppler frequency in Hz."""
        return self.v / self.wavelength

    def rx_offset(self, q: int) -> float:
        return element_offset(self, AntennaIndex("Rx", q))

    def tx_offset(self, p: int) -> float:
        return element_offset(self, AntennaIndex("Tx", p))


@dataclass(frozen=True)
class EllipsePath:
    """One confocal ellipse of scatterers.

    ``aoa_dist`` is a :class:`~driftmimo.stochastic.VonMises` law. ``k_ell``
    is the semi-major axis over the focal distance and is only needed when
    AODs matter (Tx arrays or exact path lengths).
    """

    tau0: float
    gain: float
    aoa_dist: "VonMises"  # noqa: F821
    n_scatterers: int = 100
    k_ell: float | None = None

    def __post_init__(self):
        if self.tau0 < 0:
            raise ConfigurationError("reference delay must be >= 0")
        if self.gain < 0:
            raise ConfigurationError("gain must be >= 0")
        if self.n_scatterers < 1:
            raise ConfigurationError("an ellipse needs at least one scatterer")
        if self.k_ell is not None and not self.k_ell > 1.0:
            raise ConfigurationError("k_ell must exceed 1 (k_ell = 1 collapses the ellipse)")


@dataclass(frozen=True)
class AntennaIndex:
    side: Literal["Tx", "Rx"]
    index: int


def element_offset(cfg: ArrayConfig, ant: AntennaIndex) -> float:
    """Signed distance of an element from its array centre, in metres.

    Element 1 has the most positive offset, ``(M - 2i + 1) delta / 2``.
    """
    if ant.side == "Tx":
        m, spacing = cfg.m_t, cfg.delta_t
    elif ant.side == "Rx":
        m, spacing = cfg.m_r, cfg.delta_r
    else:
        raise DomainError(f"unknown array side {ant.side!r}")
    if not 1 <= ant.index <= m:
        raise DomainError(f"{ant.side} antenna index {ant.index} outside 1..{m}")
    return (m - 2 * ant.index + 1) * spacing / 2.0


def branch_angle(k_ell: float) -> float:
    """AOA at which the scatterer sits straight above the Tx focus."""
    return math.pi - math.atan((k_ell * k_ell - 1.0) / (2.0 * k_ell))


def aoa_to_aod(path: EllipsePath, alpha_r):
    """Map AOAs to AODs on the ellipse of ``path``.

    Three-branch rule with the ratio evaluated as a two-argument arctangent
    whose denominator is pinned to its branch sign, so each branch is
    continuous up to and including its closed end.
    """
    if path.k_ell is None:
        raise ConfigurationError("AOD mapping needs k_ell on the path")
    k = path.k_ell
    a = wrap_angle(np.asarray(alpha_r, dtype=float))
    num = (k * k - 1.0) * np.sin(a)
    den = 2.0 * k + (k * k + 1.0) * np.cos(a)
    a0 = branch_angle(k)
    first = a <= a0
    middle = (a > a0) & (a <= TWO_PI - a0)
    g = np.where(
        middle,
        np.arctan2(-num, np.maximum(-den, 0.0)) + math.pi,
        np.arctan2(num, np.maximum(den, 0.0)),
    )
    g = np.where(first | middle, g, g + TWO_PI)
    return wrap_angle(g)


def drift_delay(cfg: ArrayConfig, path: EllipsePath, p: int, q: int, alpha_t, alpha_r):
    """First-order array-variant delay in seconds.

    ``tau0 - tau_p cos(alpha_t - beta_t) - tau_q cos(alpha_r - beta_r)`` with
    ``tau_i`` the element offset over the speed of light. Can be below
    ``tau0``: elements ahead of the centre see the wave early.
    """
    tau_p = cfg.tx_offset(p) / SPEED_OF_LIGHT
    tau_q = cfg.rx_offset(q) / SPEED_OF_LIGHT
    out = (path.tau0
           - tau_p * np.cos(np.asarray(alpha_t) - cfg.beta_t)
           - tau_q * np.cos(np.asarray(alpha_r) - cfg.beta_r))
    return float(out) if np.ndim(out) == 0 else out


def ellipse_axes(path: EllipsePath) -> tuple[float, float]:
    """Semi-major axis and focal distance in metres (``2a = c0 tau0``)."""
    if path.k_ell is None:
        raise ConfigurationError("ellipse size needs k_ell on the path")
    a = 0.5 * SPEED_OF_LIGHT * path.tau0
    return a, a / path.k_ell


def scatterer_position(path: EllipsePath, alpha_r):
    """Cartesian scatterer coordinates for the given AOAs."""
    a, f = ellipse_axes(path)
    alpha_r = np.asarray(alpha_r, dtype=float)
    r = (a * a - f * f) / (a + f * np.cos(alpha_r))
    return f + r * np.cos(alpha_r), r * np.sin(alpha_r)


def exact_delay(cfg: ArrayConfig, path: EllipsePath, p: int, q: int, alpha_r):
    """Exact two-segment path delay in seconds, Tx element -> scatterer -> Rx element."""
    _, f = ellipse_axes(path)
    sx, sy = scatterer_position(path, alpha_r)
    dp = cfg.tx_offset(p)
    dq = cfg.rx_offset(q)
    tx = (-f + dp * math.cos(cfg.beta_t), dp * math.sin(cfg.beta_t))
    rx = (f + dq * math.cos(cfg.beta_r), dq * math.sin(cfg.beta_r))
    d_t = np.hypot(sx - tx[0], sy - tx[1])
    d_r = np.hypot(sx - rx[0], sy - rx[1])
    out = (d_t + d_r) / SPEED_OF_LIGHT
    return float(out) if np.ndim(out) == 0 else out
