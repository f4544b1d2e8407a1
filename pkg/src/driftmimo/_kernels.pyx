# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same semantics as ``_kernels_py``; results agree to rounding."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, log, sqrt, acos, floor, fabs, M_PI

cnp.import_array()

cdef enum:
    _RESEED = 64


cdef bint _is_uniform(const double[::1] f):
    cdef Py_ssize_t k = f.shape[0], m
    cdef double df, scale = 0.0
    if k < 3:
        return False
    df = (f[k - 1] - f[0]) / (k - 1)
    for m in range(k):
        scale = max(scale, fabs(f[m]))
    for m in range(k):
        if fabs(f[m] - (f[0] + m * df)) > 1e-12 * scale:
            return False
    return True


def sinusoid_sum(weights, phases, delays, freqs):
    cdef const double complex[::1] w = np.ascontiguousarray(weights, dtype=np.complex128)
    cdef const double[::1] ph = np.ascontiguousarray(phases, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(delays, dtype=np.float64)
    cdef const double[::1] f = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0], k = f.shape[0], i, m
    out = np.empty(k, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double acc_re, acc_im, arg, c, s, wr, wi, omega, df, rc, rs, t
    cdef double[::1] are, aim
    if _is_uniform(f):
        # uniform grid: advance each phasor by a fixed rotation, re-seeding
        # from sin/cos every _RESEED steps to keep the drift at rounding level
        df = (f[k - 1] - f[0]) / (k - 1)
        are = np.zeros(k)
        aim = np.zeros(k)
        with nogil:
            for i in range(n):
                wr = w[i].real
                wi = w[i].imag
                rc = cos(2.0 * M_PI * df * d[i])
                rs = -sin(2.0 * M_PI * df * d[i])
                for m in range(k):
                    if m % _RESEED == 0:
                        arg = ph[i] - 2.0 * M_PI * (f[0] + m * df) * d[i]
                        c = cos(arg)
                        s = sin(arg)
                    else:
                        t = c * rc - s * rs
                        s = s * rc + c * rs
                        c = t
                    are[m] += c * wr - s * wi
                    aim[m] += c * wi + s * wr
            for m in range(k):
                o[m] = are[m] + 1j * aim[m]
        return out
    with nogil:
        for m in range(k):
            acc_re = 0.0
            acc_im = 0.0
            omega = 2.0 * M_PI * f[m]
            for i in range(n):
                arg = ph[i] - omega * d[i]
                c = cos(arg)
                s = sin(arg)
                wr = w[i].real
                wi = w[i].imag
                acc_re = acc_re + (c * wr - s * wi)
                acc_im = acc_im + (c * wi + s * wr)
            o[m] = acc_re + 1j * acc_im
    return out


def vonmises_accept(double kappa, uniforms):
    cdef const double[:, ::1] u = np.ascontiguousarray(
        np.asarray(uniforms, dtype=np.float64).reshape(-1, 3))
    cdef Py_ssize_t m = u.shape[0], i, count = 0
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef double tau = 1.0 + sqrt(1.0 + 4.0 * kappa * kappa)
    cdef double rho = (tau - sqrt(2.0 * tau)) / (2.0 * kappa)
    cdef double r = (1.0 + rho * rho) / (2.0 * rho)
    cdef double z, f, c, u2, theta
    cdef bint accept
    with nogil:
        for i in range(m):
            z = cos(M_PI * u[i, 0])
            f = (1.0 + r * z) / (r + z)
            c = kappa * (r - f)
            u2 = u[i, 1]
            accept = c * (2.0 - c) - u2 > 0.0
            if not accept:
                accept = log(c / u2) + 1.0 - c >= 0.0
            if accept:
                if f > 1.0:
                    f = 1.0
                elif f < -1.0:
                    f = -1.0
                theta = acos(f)
                if u[i, 2] < 0.5:
                    theta = -theta
                o[count] = theta
                count += 1
    return out[:count]


def bessel_series(int order, z):
    cdef const double complex[::1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t n = zz.shape[0], i
    cdef int k
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double complex half, q, term, total
    with nogil:
        for i in range(n):
            half = 0.5 * zz[i]
            q = half * half
            term = 1.0
            for k in range(1, order + 1):
                term = term * half / k
            total = term
            for k in range(1, 400):
                term = term * q / (k * (k + order))
                total = total + term
                if _cabs(term) <= 1e-17 * _cabs(total):
                    break
            o[i] = total
    return out


cdef inline double _cabs(double complex v) noexcept nogil:
    return sqrt(v.real * v.real + v.imag * v.imag)


def bessel_trapezoid(int order, z, int intervals, bint scaled):
    cdef const double complex[::1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t n = zz.shape[0], i, j
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    wts = np.full(intervals + 1, 1.0 / intervals)
    wts[0] *= 0.5
    wts[intervals] *= 0.5
    theta = np.linspace(0.0, np.pi, intervals + 1)
    wts = wts * np.cos(order * theta)
    cdef const double[::1] w = wts
    cdef const double[::1] ct = np.cos(theta)
    cdef double zr, zi, shift, mag, ang, acc_re, acc_im
    with nogil:
        for i in range(n):
            zr = zz[i].real
            zi = zz[i].imag
            shift = fabs(zr) if scaled else 0.0
            acc_re = 0.0
            acc_im = 0.0
            for j in range(intervals + 1):
                mag = exp(zr * ct[j] - shift) * w[j]
                ang = zi * ct[j]
                acc_re = acc_re + mag * cos(ang)
                acc_im = acc_im + mag * sin(ang)
            o[i] = acc_re + 1j * acc_im
    return out


def histogram_uniform(values, weights, double lo, double width, Py_ssize_t nbins):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], i, idx
    mass = np.zeros(nbins, dtype=np.float64)
    cdef double[::1] mm = mass
    cdef double outside = 0.0, pos
    with nogil:
        for i in range(n):
            pos = floor((v[i] - lo) / width)
            if pos >= 0 and pos < nbins:
                idx = <Py_ssize_t> pos
                mm[idx] += wt[i]
            else:
                outside += wt[i]
    return mass, outside
