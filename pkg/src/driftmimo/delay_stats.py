"""Array-variant power delay profile, delay moments and coherence bandwidth.

Only the Rx array drifts here (the Tx offset enters through ``p`` but the
analytic PDP assumes a single Tx antenna, as the closed forms do). The
excess delay of one ellipse at Rx element ``q`` is ``-tau_q cos(alpha - beta_R)``
with ``alpha`` von Mises; its density has integrable arcsine-type spikes at
``+-|tau_q|``. Masses and moments are therefore computed in the angle
variable, never by integrating the sampled density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import angular_expectation, bessel_i, bessel_ratio, inverse_i0
from .correlation import CorrelationGrid, path_fcf_closed, vm_characteristic
from .errors import ConfigurationError, DomainError, ResolutionError, SearchError
from .geometry import SPEED_OF_LIGHT, TWO_PI, ArrayConfig, EllipsePath
from .stochastic import VonMises, power_weights, von_mises_pdf

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass
class PdpCurve:
    """PDP sampled as cell averages.

    ``density[i]`` is the probability mass of the cell ``edges[i]..edges[i+1]``
    divided by its width; ``tau_axis`` holds the cell centres. Point masses
    (elements at an array centre) are listed in ``impulses`` as
    ``(delay, mass)`` and also folded into their cell.
    """

    tau_axis: np.ndarray
    density: np.ndarray
    antenna: int
    method: str
    edges: np.ndarray
    impulses: list[tuple[float, float]] = field(default_factory=list)
    stderr: np.ndarray | None = None

    @property
    def mass(self) -> np.ndarray:
        return self.density * np.diff(self.edges)


@dataclass
class DelayMoments:
    mean: float
    rms: float | None = None
    per_path_mean_drift: np.ndarray | None = None
    rms_literal: float | None = None
    literal_negative: bool = False


def rx_delay_offset(cfg: ArrayConfig, q: int) -> float:
    return cfg.rx_offset(q) / SPEED_OF_LIGHT


# ----------------------------------------------------------------------------
# path level

def path_pdp(d: VonMises, tau_q: float, beta_r: float, tau):
    """Density of the excess delay ``-tau_q cos(alpha - beta_r)`` in 1/s.

    ``tau_q = 0`` is a unit impulse at zero: the returned value is ``inf`` at
    ``tau == 0`` and 0 elsewhere. At ``|tau| = |tau_q|`` the density diverges
    and ``inf`` (the limit) is returned.
    """
    tau = np.asarray(tau, dtype=float)
    if tau_q == 0.0:
        out = np.where(tau == 0.0, np.inf, 0.0)
        return float(out) if out.ndim == 0 else out
    u = tau / tau_q
    inside = np.abs(u) < 1.0
    edge = np.abs(u) == 1.0
    us = np.where(inside, u, 0.0)
    spread = np.arccos(-us)
    p = von_mises_pdf(d, beta_r + spread) + von_mises_pdf(d, beta_r - spread)
    with np.errstate(divide="ignore"):
        out = np.where(inside, p / (abs(tau_q) * np.sqrt(1.0 - us * us)), 0.0)
    out = np.where(edge, np.inf, out)
    return float(out) if out.ndim == 0 else out


def arc_mass(d: VonMises, centre: float, half_width):
    """Von Mises probability of the arc ``centre +- half_width`` (composite Gauss-Legendre)."""
    half_width = np.clip(np.asarray(half_width, dtype=float), 0.0, math.pi)
    panels = 8 + int(math.ceil(4.0 * math.sqrt(d.kappa)))
    # panel nodes on [-1, 1]
    edges = np.linspace(-1.0, 1.0, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    wts = (half[:, None] * _GL_W[None, :]).ravel()
    theta = centre + half_width[..., None] * nodes
    vals = von_mises_pdf(d, theta) @ wts
    return vals * half_width


def path_delay_cdf(d: VonMises, tau_q: float, beta_r: float, x):
    """``P(-tau_q cos(alpha - beta_r) <= x)``."""
    x = np.asarray(x, dtype=float)
    if tau_q == 0.0:
        return np.where(x >= 0.0, 1.0, 0.0)
    t = abs(tau_q)
    u = np.clip(x / t, -1.0, 1.0)
    inside = np.abs(x) < t
    out = np.where(x >= t, 1.0, 0.0)
    if np.any(inside):
        ui = u[inside]
        if tau_q > 0:
            val = arc_mass(d, beta_r, np.arccos(-ui))
        else:
            val = 1.0 - arc_mass(d, beta_r, np.arccos(ui))
        out = out.astype(float)
        out[inside] = val
    return out


def cell_edges(tau_axis) -> np.ndarray:
    """Cell boundaries midway between axis points."""
    tau_axis = np.asarray(tau_axis, dtype=float)
    if tau_axis.ndim != 1 or tau_axis.size < 2 or np.any(np.diff(tau_axis) <= 0):
        raise DomainError("tau axis must be strictly increasing with at least two points")
    mids = 0.5 * (tau_axis[1:] + tau_axis[:-1])
    return np.concatenate([[2 * tau_axis[0] - mids[0]], mids, [2 * tau_axis[-1] - mids[-1]]])


def composite_pdp(cfg: ArrayConfig, paths: list[EllipsePath], q: int, tau_axis) -> PdpCurve:
    """Power-weighted sum of shifted path PDPs as cell averages on ``tau_axis``."""
    tau_axis = np.asarray(tau_axis, dtype=float)
    edges = cell_edges(tau_axis)
    mass = np.zeros(tau_axis.size)
    impulses = []
    tau_q = rx_delay_offset(cfg, q)
    for w, path in zip(power_weights(paths), paths):
        if tau_q == 0.0:
            impulses.append((path.tau0, float(w)))
            j = np.searchsorted(edges, path.tau0, side="right") - 1
            if 0 <= j < mass.size:
                mass[j] += w
            continue
        lo = np.searchsorted(edges, path.tau0 - abs(tau_q), side="right") - 1
        hi = np.searchsorted(edges, path.tau0 + abs(tau_q), side="left")
        lo, hi = max(lo, 0), min(hi, edges.size - 1)
        if hi <= lo:
            continue
        cdf = path_delay_cdf(path.aoa_dist, tau_q, cfg.beta_r, edges[lo:hi + 1] - path.tau0)
        mass[lo:hi] += w * np.diff(cdf)
    return PdpCurve(tau_axis, mass / np.diff(edges), q, "closed-form", edges, impulses)


def pdp_from_fcf(fcf_grid: CorrelationGrid, tau_max: float | None = None,
                 feature: float | None = None, n_tau: int | None = None) -> PdpCurve:
    """PDP as the inverse Fourier transform of a sampled frequency correlation.

    The grid must be uniform in ``nu``; a one-sided grid starting at 0 is
    extended by Hermitian symmetry. The delay window is ``1/dnu`` wide and
    centred on zero; ``tau_max`` (largest |delay| present) and ``feature``
    (finest delay structure to resolve) are checked against the grid.
    """
    (name, (unit, nu)), = fcf_grid.axes.items()
    nu = np.asarray(nu, dtype=float)
    vals = np.asarray(fcf_grid.values, dtype=complex)
    if nu.size < 16:
        raise ResolutionError(f"need at least 16 frequency samples, got {nu.size}")
    step = np.diff(nu)
    dnu = step[0]
    if not dnu > 0 or np.max(np.abs(step - dnu)) > 1e-9 * abs(dnu) * nu.size:
        raise ResolutionError("frequency grid must be uniform and increasing")
    if abs(nu[0]) < 0.5 * dnu:
        nu = np.concatenate([-nu[:0:-1], nu])
        vals = np.concatenate([np.conj(vals[:0:-1]), vals])
    span = nu[-1] - nu[0]
    if tau_max is not None and dnu > 1.0 / (2.0 * tau_max):
        raise ResolutionError(
            f"spacing {dnu:.4g} Hz aliases delays up to {tau_max:.4g} s; need dnu <= {1 / (2 * tau_max):.4g} Hz")
    if feature is not None and span < 20.0 / feature:
        raise ResolutionError(
            f"span {span:.4g} Hz cannot resolve {feature:.4g} s features; need span >= {20 / feature:.4g} Hz")
    window = 1.0 / dnu
    n_tau = n_tau or int(2 ** math.ceil(math.log2(4 * nu.size)))
    tau = (np.arange(n_tau) - n_tau // 2) * (window / n_tau)
    dens = np.real(np.exp(2j * np.pi * np.outer(tau, nu)) @ vals) * dnu
    dens = np.clip(dens, 0.0, None)
    width = window / n_tau
    dens = dens / (dens.sum() * width)
    edges = np.concatenate([tau - 0.5 * width, [tau[-1] + 0.5 * width]])
    return PdpCurve(tau, dens, -1, "inverse-fourier", edges)


# ----------------------------------------------------------------------------
# moments

def _path_terms(paths: list[EllipsePath], beta_r: float):
    kappa = np.array([p.aoa_dist.kappa for p in paths])
    phi = beta_r - np.array([p.aoa_dist.mu for p in paths])
    r1 = np.asarray(bessel_ratio(1, kappa), dtype=float)
    r2 = np.asarray(bessel_ratio(2, kappa), dtype=float)
    cos2 = 0.5 * (1.0 + r2)  # E[cos^2(alpha - mu)]
    sin2 = 0.5 * (1.0 - r2)
    return phi, r1, cos2 * np.cos(phi) ** 2 + sin2 * np.sin(phi) ** 2


def mean_delay(cfg: ArrayConfig, paths: list[EllipsePath], q: int) -> DelayMoments:
    """Mean delay at Rx element ``q`` and the per-path mean drifts.

    The drift of path ``l`` is ``tau_q cos(beta_R - mu_l) I1(kappa_l)/I0(kappa_l)``
    and the mean delay is ``sum c_l^2 (tau0_l - drift_l)``.
    """
    w = power_weights(paths)
    tau_q = rx_delay_offset(cfg, q)
    phi, r1, _ = _path_terms(paths, cfg.beta_r)
    drift = tau_q * np.cos(phi) * r1
    tau0 = np.array([p.tau0 for p in paths])
    return DelayMoments(float(w @ (tau0 - drift)), per_path_mean_drift=drift)


def delay_spread(cfg: ArrayConfig, paths: list[EllipsePath], q: int) -> DelayMoments:
    """Mean delay and RMS delay spread at Rx element ``q``.

    ``rms`` is the square root of the second central moment of the PDP.
    ``rms_literal`` evaluates the published sum-of-square-roots expression
    (square root inside the path sum, minus sign on the drift term); it is
    NaN with ``literal_negative`` set when one of its radicands is negative.
    """
    moments = mean_delay(cfg, paths, q)
    w = power_weights(paths)
    tau_q = rx_delay_offset(cfg, q)
    _, _, ecos2 = _path_terms(paths, cfg.beta_r)
    tau0 = np.array([p.tau0 for p in paths])
    centred = tau0 - moments.mean
    drift = moments.per_path_mean_drift
    second = tau_q ** 2 * ecos2
    var = w @ (centred ** 2 - 2.0 * centred * drift + second)
    moments.rms = math.sqrt(max(float(var), 0.0))
    radicand = centred ** 2 - 2.0 * centred * drift - second
    if np.any(radicand < 0):
        moments.literal_negative = True
        moments.rms_literal = math.nan
    else:
        moments.rms_literal = float(w @ np.sqrt(radicand))
    return moments


def pdp_moments(cfg: ArrayConfig, paths: list[EllipsePath], q: int, nodes: int = 1 << 14):
    """Mean and RMS delay by quadrature over each path's AOA law.

    Independent of the closed forms: uses the angle substitution
    ``tau = tau0 - tau_q cos(alpha - beta_R)`` and integrates the von Mises
    density directly.
    """
    w = power_weights(paths)
    tau_q = rx_delay_offset(cfg, q)

    def moment(fn):
        return sum(wi * angular_expectation(
            lambda th, p=path: von_mises_pdf(p.aoa_dist, th) * fn(p.tau0 - tau_q * np.cos(th - cfg.beta_r)),
            nodes).real for wi, path in zip(w, paths))

    mean = moment(lambda t: t)
    var = moment(lambda t: (t - mean) ** 2)
    return mean, math.sqrt(max(var, 0.0))


# ----------------------------------------------------------------------------
# coherence

def _fcf_magnitude(kappa: float, cos_orient: float, x):
    d = VonMises(0.0, kappa)
    return np.abs(vm_characteristic(d, x, math.acos(np.clip(cos_orient, -1.0, 1.0))))


def _first_crossing(kappa: float, cos_orient: float, rho: float, x_max: float) -> float:
    """Smallest ``x = 2 pi delta nu / c0`` with ``|FCF| = rho``."""
    step = 0.05 / (1.0 + math.sqrt(kappa))
    block = 256 * step
    start = 0.0
    while start < x_max:
        xs = start + step * np.arange(257)
        mags = _fcf_magnitude(kappa, cos_orient, xs)
        below = np.nonzero(mags < rho)[0]
        if below.size:
            lo, hi = xs[below[0] - 1], xs[below[0]]
            break
        start += block
    else:
        raise SearchError(f"|FCF| stays above {rho} for x <= {x_max}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _fcf_magnitude(kappa, cos_orient, mid) < rho:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def coherence_constant(d: VonMises, rho: float = 0.5, orientation: float | None = None,
                       x_max: float = 200.0) -> float:
    """Iso-correlation constant ``delta_q * nu`` (Hz m) where ``|FCF| = rho``.

    ``orientation`` is ``beta_R - mu``. Without it the orientation giving the
    smallest constant (fastest decorrelation) is used. At broadside
    (``cos = 0``) with ``rho I0(kappa) >= 1`` the closed form via the inverse of
    ``I0`` applies; otherwise the first crossing is found by scan and bisection.
    """
    if not 0.0 < rho < 1.0:
        raise DomainError("rho must lie in (0, 1)")
    scale = SPEED_OF_LIGHT / TWO_PI
    if orientation is None and d.kappa == 0.0:
        cos_orient = 0.0
    elif orientation is None:
        grid = np.linspace(0.0, 1.0, 21)  # |cos(beta - mu)|; sign does not matter
        xs = np.array([_first_crossing(d.kappa, c, rho, x_max) for c in grid])
        best = int(np.argmin(xs))
        cos_orient = grid[best]
        if best not in (0, grid.size - 1):
            lo, hi = grid[best - 1], grid[best + 1]
            for _ in range(40):  # golden-section refinement
                a = hi - 0.618 * (hi - lo)
                b = lo + 0.618 * (hi - lo)
                if _first_crossing(d.kappa, a, rho, x_max) < _first_crossing(d.kappa, b, rho, x_max):
                    hi = b
                else:
                    lo = a
            cos_orient = 0.5 * (lo + hi)
    else:
        cos_orient = abs(math.cos(orientation))
    if cos_orient == 0.0 and 0.0 < d.kappa < 700.0 and rho * bessel_i(0, d.kappa).real >= 1.0:
        inner = inverse_i0(rho * bessel_i(0, d.kappa).real)
        return scale * math.sqrt(max(d.kappa ** 2 - inner ** 2, 0.0))
    return scale * _first_crossing(d.kappa, cos_orient, rho, x_max)


def coherence_bandwidth(d: VonMises, rho: float, delta_q: float, orientation: float | None = None) -> float:
    """Single-path coherence bandwidth in Hz at element offset ``delta_q``.

    ``math.inf`` for an element at the array centre.
    """
    if delta_q == 0.0:
        return math.inf
    return coherence_constant(d, rho, orientation) / abs(delta_q)
