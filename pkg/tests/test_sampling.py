import numpy as np
import pytest

from entropy_bounds.extremal import bound_curve
from entropy_bounds.sampling import (
    CHUNK,
    GENERATOR,
    Ensemble,
    SampleConfig,
    ViolationReport,
    resolve_threads,
    sample_array,
    sample_bipartite,
    sample_density,
    sample_simplex,
    scan_samples,
    scan_violations,
)
from entropy_bounds.simplex import make_probvec


def test_simplex_mean_d2():
    X = sample_array(SampleConfig(d=2, n=100_000, seed=1))
    assert abs(X[:, 0].mean() - 0.5) <= 0.005


def test_simplex_corner_fraction():
    # P(max > t) = d (1 - t)^(d - 1) for t > 1/2 on the uniform simplex.
    X = sample_array(SampleConfig(d=3, n=100_000, seed=2))
    frac = np.mean(X.max(axis=1) > 0.9)
    expected = 3 * 0.1**2
    sd = np.sqrt(expected * (1 - expected) / X.shape[0])
    assert 0 < frac < 0.05
    assert abs(frac - expected) <= 5 * sd


def test_same_seed_same_stream():
    cfg = SampleConfig(d=4, n=CHUNK + 17, seed=99)
    a = [p.values for p in sample_simplex(cfg)]
    b = [p.values for p in sample_simplex(cfg)]
    np.testing.assert_array_equal(np.array(a), np.array(b))


def test_different_seed_differs():
    a = sample_array(SampleConfig(d=4, n=100, seed=1))
    b = sample_array(SampleConfig(d=4, n=100, seed=2))
    assert not np.array_equal(a, b)


@pytest.mark.parametrize("ensemble", ["simplex", "hs"])
def test_thread_count_does_not_change_output(ensemble):
    cfg = SampleConfig(d=5, n=3 * CHUNK + 5, seed=7, ensemble=ensemble)
    np.testing.assert_array_equal(sample_array(cfg, threads=1), sample_array(cfg, threads=4))


def test_prefix_stability():
    short = sample_array(SampleConfig(d=3, n=100, seed=5))
    long = sample_array(SampleConfig(d=3, n=5000, seed=5))
    np.testing.assert_array_equal(short, long[:100])


def test_density_d2():
    cfg = SampleConfig(d=2, n=2000, seed=3, ensemble=Ensemble.HILBERT_SCHMIDT)
    for p in sample_density(cfg):
        assert abs(sum(p) - 1) <= 1e-9
        assert all(0 <= x <= 1 for x in p)


@pytest.mark.parametrize("d", [2, 3, 6])
def test_density_purity(d):
    X = sample_array(SampleConfig(d=d, n=20_000, seed=4, ensemble="hs"))
    purity = np.sum(X**2, axis=1)
    assert np.all(purity >= 1 / d - 1e-12)
    # Hilbert-Schmidt mean purity 2d / (d^2 + 1)
    assert purity.mean() == pytest.approx(2 * d / (d * d + 1), abs=5e-3)


def test_bipartite_purity():
    da, db = 2, 3
    cfg = SampleConfig(d=2, n=20_000, seed=8, ensemble="pure", d_a=da, d_b=db)
    X = np.array([p.values for p in sample_bipartite(cfg)])
    assert X.shape == (20_000, 2)
    # Haar pure states: E Tr rho_A^2 = (da + db) / (da db + 1)
    assert np.mean(np.sum(X**2, axis=1)) == pytest.approx((da + db) / (da * db + 1), abs=5e-3)


def test_stream_kind_mismatch():
    with pytest.raises(ValueError):
        list(sample_density(SampleConfig(d=3, n=5, seed=0)))


@pytest.mark.parametrize("kwargs", [
    dict(d=1, n=5, seed=0),
    dict(d=3, n=0, seed=0),
    dict(d=3, n=5, seed=-1),
    dict(d=3, n=5, seed=0, ensemble="pure"),
    dict(d=3, n=5, seed=0, ensemble="pure", d_a=2, d_b=4),
    dict(d=3, n=5, seed=0, ensemble="bures"),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SampleConfig(**kwargs)


def test_threads_env(monkeypatch):
    monkeypatch.setenv("ENTROPY_BOUNDS_THREADS", "3")
    assert resolve_threads() == 3
    monkeypatch.setenv("ENTROPY_BOUNDS_THREADS", "0")
    assert resolve_threads() >= 1
    monkeypatch.setenv("ENTROPY_BOUNDS_THREADS", "x")
    with pytest.raises(ValueError):
        resolve_threads()


# --- scanning ---------------------------------------------------------------------


def test_verified_pair_has_no_violations():
    rep = scan_violations("shannon", "power:2", None, SampleConfig(d=10, n=20_000, seed=11))
    assert rep.n_total == 20_000
    assert rep.n_below == rep.n_above == 0
    assert rep.generator == GENERATOR and rep.seed == 11


def test_report_is_deterministic():
    cfg = SampleConfig(d=6, n=CHUNK + 100, seed=12, ensemble="hs")
    a = scan_violations("shannon", "peculiar:10", None, cfg, threads=1)
    b = scan_violations("shannon", "peculiar:10", None, cfg, threads=3)
    assert a == b


def test_counterexample_found_small():
    cfg = SampleConfig(d=10, n=20_000, seed=13, ensemble="hs")
    rep = scan_violations("shannon", "peculiar:10:1.99", None, cfg)
    assert rep.n_violations >= 1 and rep.max_excursion > 1e-6
    assert rep.worst_sample is not None and rep.worst_sample.d == 10


def test_curve_must_cover_range():
    cfg = SampleConfig(d=5, n=10, seed=0)
    scan_violations("shannon", "power:2", bound_curve("shannon", "power:2", 5, 5), cfg)
    with pytest.raises(Exception):
        scan_violations("shannon", "power:2", bound_curve("shannon", "power:2", 4, 5), cfg)


def test_scatter_permutation_invariant():
    P = sample_array(SampleConfig(d=5, n=2000, seed=14))
    rep1, s1 = scan_samples("shannon", "power:2", P, with_scatter=True)
    rep2, s2 = scan_samples("shannon", "power:2", -np.sort(-P, axis=1), with_scatter=True)
    np.testing.assert_allclose(s1.hg, s2.hg, rtol=0, atol=1e-15)
    np.testing.assert_allclose(s1.hf, s2.hf, rtol=0, atol=1e-14)
    assert set(s1.violation) == {"none"}


def test_scatter_labels_counts_match():
    cfg = SampleConfig(d=10, n=5000, seed=15, ensemble="hs")
    rep, sc = scan_violations("shannon", "peculiar:10", None, cfg, with_scatter=True)
    assert np.sum(sc.violation == "below") == rep.n_below
    assert np.sum(sc.violation == "above") == rep.n_above
    assert sc.hg.shape == (5000,)


def test_merge():
    p = make_probvec([0.5, 0.5])
    a = ViolationReport(10, 1, 0, 0.1, p, seed=1)
    b = ViolationReport(5, 0, 2, 0.3, None, seed=1)
    c = ViolationReport(7, 0, 0, 0.0, None, seed=1)
    ab_c, a_bc = a.merge(b).merge(c), a.merge(b.merge(c))
    assert ab_c == a_bc
    assert (ab_c.n_total, ab_c.n_below, ab_c.n_above, ab_c.max_excursion) == (22, 1, 2, 0.3)
    d = a.to_dict()
    assert set(d) == {"n_total", "n_below", "n_above", "max_excursion", "worst_sample",
                      "generator", "seed"}
