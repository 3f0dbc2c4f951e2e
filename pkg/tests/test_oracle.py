import numpy as np
import pytest

from entropy_bounds.exceptions import DimensionTooLargeError, EmptySlabError
from entropy_bounds.oracle import (
    Structure,
    _compositions,
    bracket_centers,
    default_slab,
    family_grid_points,
    grid_extrema,
    structural_flags,
    structural_match,
)
from entropy_bounds.measures import make_measure


def test_compositions_count():
    # C(n + k - 1, k - 1)
    assert _compositions(10, 3).shape == (66, 3)
    assert np.all(_compositions(7, 4).sum(axis=1) == 7)


def test_anchor_slab():
    r = grid_extrema("shannon", "power:2", 3, 1e-3, 0.375, 1e-4)
    assert r.hf_max == pytest.approx(1.5, abs=1e-12)
    np.testing.assert_allclose(sorted(r.max_p, reverse=True), [0.5, 0.25, 0.25])
    assert r.hf_min == pytest.approx(1.4833557549816874, abs=2e-3)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_uniform_center(d):
    f, g = make_measure("shannon"), make_measure("power:2")
    step = 1e-2 if d == 4 else 1 / 600
    r = grid_extrema(f, g, d, step, 1 / d, 1e-6)
    expect = d * f.f(1 / d)
    assert r.hf_min == pytest.approx(expect, abs=1e-12)
    assert r.hf_max == pytest.approx(expect, abs=1e-12)
    np.testing.assert_allclose(list(r.max_p), [1 / d] * d)


def test_pure_center():
    r = grid_extrema("shannon", "power:2", 3, 1e-2, 1.0, 1e-9)
    assert r.hf_min == r.hf_max == 0.0
    assert sorted(r.min_p) == [0.0, 0.0, 1.0]
    assert r.n_in_slab == 3


def test_errors():
    with pytest.raises(DimensionTooLargeError):
        grid_extrema("shannon", "power:2", 5, 1e-2, 0.5, 1e-3)
    with pytest.raises(ValueError):
        grid_extrema("shannon", "power:2", 3, 0.5, 0.5, 1e-3)
    with pytest.raises(EmptySlabError):
        grid_extrema("shannon", "power:2", 3, 1e-2, 0.2, 1e-3)


def test_default_slab_never_empty():
    g = make_measure("power:2")
    slab = default_slab(g, 1e-2)
    for c in np.linspace(1 / 3, 1, 15):
        assert grid_extrema("shannon", g, 3, 1e-2, c, slab).n_in_slab > 0


@pytest.mark.parametrize("p, expected", [
    ((0.5, 0.25, 0.25), Structure.MAXER_LIKE),
    ((0.4, 0.4, 0.2), Structure.MINER_LIKE),
    ((0.5, 0.3, 0.2), Structure.NEITHER),
    ((0.2, 0.4, 0.4), Structure.MINER_LIKE),
    ((0.6, 0.4, 0.0), Structure.MINER_LIKE),
])
def test_structural_match(p, expected):
    assert structural_match(p, 1e-6) is expected


def test_structural_both_at_uniform():
    flags = structural_flags((1 / 3, 1 / 3, 1 / 3), 1e-9)
    assert flags == {Structure.MAXER_LIKE, Structure.MINER_LIKE}
    assert structural_match((1 / 3, 1 / 3, 1 / 3), 1e-9) is Structure.MAXER_LIKE


def test_family_grid_points():
    maxer, miner = family_grid_points(3, 1e-2)
    assert np.all(maxer.sum(axis=1) == 100) and np.all(miner.sum(axis=1) == 100)
    assert all(structural_match(r / 100, 1e-12) is Structure.MAXER_LIKE for r in maxer)
    assert all(Structure.MINER_LIKE in structural_flags(r / 100, 1e-12) for r in miner)


def test_bracket_centers_agree_with_bounds_step_1e2():
    from entropy_bounds.extremal import bounds_at

    for c, w in bracket_centers("shannon", "power:2", 3, 1e-2, 6):
        r = grid_extrema("shannon", "power:2", 3, 1e-2, c, w)
        b = bounds_at("shannon", "power:2", 3, c)
        assert abs(r.hf_max - b.hf_max) <= 2e-2
        assert abs(r.hf_min - b.hf_min) <= 2e-2
        assert Structure.MAXER_LIKE in structural_flags(r.max_p, 2e-2)
        assert Structure.MINER_LIKE in structural_flags(r.min_p, 2e-2)


def test_refinement_monotone():
    """Halving the step does not pull the slab extremes inward by more than one cell's g-variation."""
    f, g = make_measure("shannon"), make_measure("power:2")
    center, slab = 0.55, 5e-3
    coarse = grid_extrema(f, g, 3, 2e-3, center, slab)
    fine = grid_extrema(f, g, 3, 1e-3, center, slab)
    lip = 2e-3 * float(np.max(np.abs(f.df(np.linspace(1e-3, 1 - 1e-3, 999)))))
    assert fine.hf_max >= coarse.hf_max - lip
    assert fine.hf_min <= coarse.hf_min + lip
