"""Pure numpy implementations of the hot kernels.

These are the reference semantics. ``_kernels.pyx`` mirrors them, except
that its sinusoid sum advances phasors by rotation on uniform frequency
grids; both backends consume identical inputs and agree to rounding.
"""

import numpy as np

_CHUNK = 1 << 22  # max elements in a temporary phase matrix


def sinusoid_sum(weights, phases, delays, freqs):
    """Sum of complex sinusoids ``sum_n w_n exp(j(phi_n - 2 pi f tau_n))``.

    Parameters
    ----------
    weights : complex ndarray, shape (n,)
    phases : float ndarray, shape (n,)
    delays : float ndarray, shape (n,)
        Seconds.
    freqs : float ndarray, shape (k,)
        Hz.

    Returns
    -------
    complex ndarray, shape (k,)
    """
    weights = np.asarray(weights, dtype=np.complex128)
    phases = np.asarray(phases, dtype=np.float64)
    delays = np.asarray(delays, dtype=np.float64)
    freqs = np.asarray(freqs, dtype=np.float64)
    out = np.empty(freqs.shape[0], dtype=np.complex128)
    step = max(1, _CHUNK // max(1, weights.shape[0]))
    for start in range(0, freqs.shape[0], step):
        f = freqs[start:start + step]
        arg = phases[None, :] - 2.0 * np.pi * f[:, None] * delays[None, :]
        out[start:start + step] = (np.cos(arg) + 1j * np.sin(arg)) @ weights
    return out


def vonmises_accept(kappa, uniforms):
    """Best-Fisher rejection on triples of uniforms.

    Every attempt consumes exactly one row ``(u1, u2, u3)``; accepted
    attempts are returned in order as angles centred on zero.
    """
    u = np.asarray(uniforms, dtype=np.float64).reshape(-1, 3)
    tau = 1.0 + np.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - np.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)
    z = np.cos(np.pi * u[:, 0])
    f = (1.0 + r * z) / (r + z)
    c = kappa * (r - f)
    u2 = u[:, 1]
    quick = c * (2.0 - c) - u2 > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        slow = np.log(c / u2) + 1.0 - c >= 0.0
    accept = quick | slow
    theta = np.arccos(np.clip(f[accept], -1.0, 1.0))
    return np.where(u[accept, 2] < 0.5, -theta, theta)


def bessel_series(order, z):
    """Ascending power series of ``I_order(z)`` for complex ``z``."""
    z = np.asarray(z, dtype=np.complex128)
    half = 0.5 * z
    q = half * half
    term = np.ones_like(z)
    for k in range(1, order + 1):
        term = term * half / k
    total = term.copy()
    for k in range(1, 400):
        term = term * q / (k * (k + order))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def bessel_trapezoid(order, z, intervals, scaled):
    """Trapezoid rule for ``(1/pi) int_0^pi exp(z cos t) cos(n t) dt``.

    With ``scaled`` the integrand carries ``exp(-|Re z|)``.
    """
    z = np.asarray(z, dtype=np.complex128)
    theta = np.linspace(0.0, np.pi, intervals + 1)
    w = np.full(intervals + 1, 1.0 / intervals)
    w[0] *= 0.5
    w[-1] *= 0.5
    w = w * np.cos(order * theta)
    ct = np.cos(theta)
    shift = np.abs(z.real) if scaled else np.zeros(z.shape)
    out = np.empty(z.shape, dtype=np.complex128)
    step = max(1, _CHUNK // (intervals + 1))
    for start in range(0, z.shape[0], step):
        zz = z[start:start + step]
        ss = shift[start:start + step]
        out[start:start + step] = np.exp(zz[:, None] * ct[None, :] - ss[:, None]) @ w
    return out


def histogram_uniform(values, weights, lo, width, nbins):
    """Weighted histogram on uniform bins ``[lo + i w, lo + (i+1) w)``.

    Returns the per-bin mass and the total weight falling outside.
    """
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    idx = np.floor((values - lo) / width).astype(np.int64)
    inside = (idx >= 0) & (idx < nbins)
    mass = np.bincount(idx[inside], weights=weights[inside], minlength=nbins)
    return mass.astype(np.float64), float(weights[~inside].sum())
