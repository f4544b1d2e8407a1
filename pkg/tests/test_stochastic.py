import math
import warnings

import numpy as np
import pytest
from scipy import integrate as sint
from scipy import special, stats

from driftmimo.errors import ConfigurationError, DomainError
from driftmimo.geometry import TWO_PI, ArrayConfig, EllipsePath
from driftmimo.stochastic import (ClusterGenerator, SeedSpec, VonMises, generate_realization,
                                  normalize_gains, power_weights, sample_exponential_delays,
                                  sample_von_mises, von_mises_pdf)


def test_pdf_uniform():
    assert von_mises_pdf(VonMises(1.0, 0.0), 0.3) == pytest.approx(1 / TWO_PI, rel=1e-14)


def test_pdf_at_mean_kappa_two():
    # exp(2) / (2 pi I0(2)) from scipy
    expected = math.exp(2.0) / (TWO_PI * special.i0(2.0))
    assert von_mises_pdf(VonMises(0.7, 2.0), 0.7) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.515885412019, rel=1e-10)


def test_pdf_antipodal():
    expected = math.exp(-2.0) / (TWO_PI * special.i0(2.0))
    assert von_mises_pdf(VonMises(0.7, 2.0), 0.7 + math.pi) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 5.0, 50.0, 700.0])
def test_pdf_normalized_and_symmetric(kappa):
    d = VonMises(1.2, kappa)
    total, _ = sint.quad(lambda x: von_mises_pdf(d, x), d.mu - math.pi, d.mu + math.pi,
                         points=[d.mu], limit=200)
    assert total == pytest.approx(1.0, abs=1e-9)
    x = np.linspace(0.01, 3.0, 17)
    assert np.allclose(von_mises_pdf(d, d.mu + x), von_mises_pdf(d, d.mu - x), rtol=1e-12)


def test_pdf_matches_scipy():
    d = VonMises(2.0, 3.5)
    x = np.linspace(0, TWO_PI, 50)
    assert np.allclose(von_mises_pdf(d, x), stats.vonmises.pdf(x, 3.5, loc=2.0), rtol=1e-12)


def test_negative_kappa_rejected():
    with pytest.raises(DomainError):
        VonMises(0.0, -1.0)


def test_uniform_samples_ks():
    x = sample_von_mises(VonMises(0.0, 0.0), 10 ** 6, SeedSpec(3))
    assert x.min() > 0 and x.max() <= TWO_PI
    stat = stats.kstest(x, stats.uniform(0, TWO_PI).cdf).statistic
    assert stat < 0.002


def test_concentrated_samples_moments():
    kappa, mu = 10.0, 2.0
    x = sample_von_mises(VonMises(mu, kappa), 10 ** 6, SeedSpec(5))
    z = np.exp(1j * x).mean()
    assert abs(((np.angle(z) - mu + math.pi) % TWO_PI) - math.pi) < 0.01
    assert abs(abs(z) - special.i1(kappa) / special.i0(kappa)) < 0.005


@pytest.mark.parametrize("kappa", [0.0, 1.0, 10.0])
def test_samples_chi_square(kappa):
    d = VonMises(0.5, kappa)
    n, bins = 200_000, 72
    x = sample_von_mises(d, n, SeedSpec(11))
    edges = np.linspace(0, TWO_PI, bins + 1)
    counts, _ = np.histogram(x, edges)
    # probability per bin via quadrature of the density
    probs = np.array([sint.quad(lambda t: von_mises_pdf(d, t), a, b)[0] for a, b in zip(edges[:-1], edges[1:])])
    assert probs.sum() == pytest.approx(1.0, abs=1e-9)
    expected = n * probs
    keep = expected >= 5
    chi2 = ((counts[keep] - expected[keep]) ** 2 / expected[keep]).sum()
    p = stats.chi2.sf(chi2, keep.sum() - 1)
    assert p > 0.001


def test_exponential_delays():
    tau = sample_exponential_delays(30e-9, 10 ** 6, SeedSpec(2))
    assert abs(tau.mean() - 30e-9) < 0.3e-9
    assert tau.std() == pytest.approx(30e-9, rel=0.01)
    assert tau.min() >= 0


@pytest.mark.parametrize("bad", [dict(tau_rms=0.0, n=5), dict(tau_rms=1e-9, n=0)])
def test_exponential_delays_domain(bad):
    with pytest.raises(DomainError):
        sample_exponential_delays(bad["tau_rms"], bad["n"], SeedSpec())


def test_sampling_deterministic_and_stream_separated():
    d = VonMises(1.0, 3.0)
    a = sample_von_mises(d, 1000, SeedSpec(42, 1))
    assert np.array_equal(a, sample_von_mises(d, 1000, SeedSpec(42, 1)))
    assert not np.array_equal(a, sample_von_mises(d, 1000, SeedSpec(42, 2)))
    assert not np.array_equal(a, sample_von_mises(d, 1000, SeedSpec(43, 1)))


def _paths(n=3, k_ell=None):
    g = 1 / math.sqrt(n)
    return [EllipsePath(10e-9 * i, g, VonMises(0.3 * i, float(i)), 50, k_ell) for i in range(n)]


def test_realization_shapes_and_determinism():
    cfg = ArrayConfig(m_t=1, m_r=4)
    r1 = generate_realization(cfg, _paths(), SeedSpec(9), realization=2)
    r2 = generate_realization(cfg, _paths(), SeedSpec(9), realization=2)
    assert r1.n_scatterers == 150
    for a, b in zip(r1.paths, r2.paths):
        assert np.array_equal(a.aoa, b.aoa) and np.array_equal(a.phase, b.phase)
        assert a.aod is None
        assert np.all((a.phase > 0) & (a.phase <= TWO_PI))
    r3 = generate_realization(cfg, _paths(), SeedSpec(9), realization=3)
    assert not np.array_equal(r1.paths[0].aoa, r3.paths[0].aoa)


def test_zero_speed_gives_zero_doppler():
    r = generate_realization(ArrayConfig(v=0.0), _paths(), SeedSpec(1))
    assert all(np.all(p.doppler == 0) for p in r.paths)


def test_doppler_follows_aoa():
    cfg = ArrayConfig(v=30.0, alpha_v=0.4)
    r = generate_realization(cfg, _paths(), SeedSpec(1))
    for p in r.paths:
        assert np.allclose(p.doppler, cfg.f_max * np.cos(p.aoa - 0.4))


def test_gain_normalization_warns():
    paths = [EllipsePath(0.0, 1.0, VonMises()), EllipsePath(1e-9, 1.0, VonMises())]
    with pytest.warns(UserWarning):
        fixed = normalize_gains(paths)
    assert sum(p.gain ** 2 for p in fixed) == pytest.approx(1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        normalize_gains(fixed)
    assert np.allclose(power_weights(paths), [0.5, 0.5])


def test_scatterer_override_counts():
    gen = ClusterGenerator(n_paths=1000, n_scatterers=100)
    paths = gen.draw(SeedSpec(0))
    r = generate_realization(ArrayConfig(), paths, SeedSpec(0))
    assert r.n_scatterers == 10 ** 5
    with pytest.warns(UserWarning):
        r = generate_realization(ArrayConfig(), paths[:10], SeedSpec(0), n_scatterers=7)
    assert r.n_scatterers == 70


def test_tx_array_needs_k_ell():
    with pytest.raises(ConfigurationError):
        generate_realization(ArrayConfig(m_t=2), _paths(), SeedSpec())
    r = generate_realization(ArrayConfig(m_t=2), _paths(k_ell=2.0), SeedSpec())
    assert all(p.aod is not None for p in r.paths)


def test_cluster_generator_ranges_and_determinism():
    gen = ClusterGenerator(n_paths=500, tau_rms=30e-9, kappa_range=(0, 10), mean_range=(0, math.pi / 6))
    a = gen.draw(SeedSpec(4), 0)
    assert a == gen.draw(SeedSpec(4), 0)
    assert a != gen.draw(SeedSpec(4), 1)
    assert sum(p.gain ** 2 for p in a) == pytest.approx(1.0)
    assert all(0 <= p.aoa_dist.kappa <= 10 for p in a)
    assert all(0 <= p.aoa_dist.mu <= math.pi / 6 + 1e-12 for p in a)
    assert np.mean([p.tau0 for p in a]) == pytest.approx(30e-9, rel=0.15)


@pytest.mark.parametrize("kwargs", [dict(n_paths=0), dict(n_scatterers=0), dict(tau_rms=0.0)])
def test_cluster_generator_validation(kwargs):
    with pytest.raises(ConfigurationError):
        ClusterGenerator(**kwargs)
