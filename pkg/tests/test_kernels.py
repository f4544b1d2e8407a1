import numpy as np
import pytest

from driftmimo import kernels

compiled = kernels.compiled_backend
py = kernels.python_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def brute_sinusoid_sum(w, ph, dl, f):
    return np.array([np.sum(w * np.exp(1j * (ph - 2 * np.pi * fk * dl))) for fk in f])


def inputs(n=300, seed=0):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    return w, rng.uniform(0, 2 * np.pi, n), rng.exponential(30e-9, n)


@pytest.mark.parametrize("freqs", [
    np.linspace(-1e8, 1e8, 201),                   # uniform: rotation path
    np.linspace(-1e8, 1e8, 3),
    np.array([0.0]),
    np.sort(np.random.default_rng(1).uniform(-1e8, 1e8, 50)),  # non-uniform
    np.linspace(0, 5e8, 1000),                     # long uniform run, several re-seeds
])
def test_python_sinusoid_sum_against_brute_force(freqs):
    w, ph, dl = inputs()
    assert np.allclose(py.sinusoid_sum(w, ph, dl, freqs), brute_sinusoid_sum(w, ph, dl, freqs),
                       rtol=1e-12, atol=1e-10)


@needs_compiled
@pytest.mark.parametrize("freqs", [
    np.linspace(-1e8, 1e8, 201),
    np.linspace(0, 5e8, 1000),
    np.sort(np.random.default_rng(1).uniform(-1e8, 1e8, 50)),
    np.array([2e6]),
    np.array([]),
])
def test_backends_agree_sinusoid_sum(freqs):
    w, ph, dl = inputs(n=500)
    a = compiled.sinusoid_sum(w, ph, dl, freqs)
    b = py.sinusoid_sum(w, ph, dl, freqs)
    scale = np.abs(w).sum()
    assert a.shape == b.shape
    assert np.all(np.abs(a - b) <= 1e-12 * scale)


@needs_compiled
@pytest.mark.parametrize("kappa", [1e-3, 0.5, 5.0, 80.0])
def test_backends_agree_vonmises(kappa):
    u = np.random.default_rng(2).random((5000, 3))
    a, b = compiled.vonmises_accept(kappa, u), py.vonmises_accept(kappa, u)
    assert a.shape == b.shape
    assert np.allclose(a, b, rtol=0, atol=1e-13)


@needs_compiled
def test_backends_agree_bessel():
    z = np.array([0.1 + 0.2j, 3.0 - 1.0j, -7.0 + 4.0j, 25.0j, 40.0])
    for order in (0, 1, 2):
        assert np.allclose(compiled.bessel_series(order, z[:3]), py.bessel_series(order, z[:3]), rtol=1e-13)
        for scaled in (False, True):
            assert np.allclose(compiled.bessel_trapezoid(order, z, 256, scaled),
                               py.bessel_trapezoid(order, z, 256, scaled), rtol=1e-13)


@needs_compiled
def test_backends_agree_histogram():
    rng = np.random.default_rng(3)
    v = rng.normal(size=10000)
    w = rng.random(10000)
    a = compiled.histogram_uniform(v, w, -2.0, 0.1, 40)
    b = py.histogram_uniform(v, w, -2.0, 0.1, 40)
    assert np.allclose(a[0], b[0], rtol=1e-13) and a[1] == pytest.approx(b[1], rel=1e-12)


def test_histogram_matches_numpy():
    rng = np.random.default_rng(4)
    v, w = rng.normal(size=2000), rng.random(2000)
    edges = np.linspace(-1, 1, 21)
    mass, outside = kernels.histogram_uniform(v, w, -1.0, 0.1, 20)
    ref, _ = np.histogram(v, edges, weights=w)
    inside = (v >= -1) & (v < 1)
    assert np.allclose(mass, ref, rtol=1e-12)
    assert outside == pytest.approx(w[~inside].sum())


def test_backend_label():
    assert kernels.BACKEND == ("cython" if compiled is not None else "python")


def test_pure_python_switch():
    import os
    import subprocess
    import sys
    env = dict(os.environ, DRIFTMIMO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import driftmimo; print(driftmimo.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
