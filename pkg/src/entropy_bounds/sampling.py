"""Seeded random states and Monte Carlo checks of the family bounds.

Samples are produced in fixed-size chunks.  Chunk ``i`` draws from its own
PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(i,))``, so output
depends only on the configuration and never on how many worker threads
process the chunks.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .exceptions import EntropyBoundsError
from .extremal import BoundCurve, ConditionReport, classify_condition, hg_range, raw_bounds
from .measures import eval_sum_rows, make_measure
from .simplex import MAX_DIM, ProbVec, make_probvec
from .spectra import eigenvalues_batch

GENERATOR = "PCG64"
CHUNK = 4096
VIOLATION_THRESHOLD = 1e-9
THREADS_ENV = "ENTROPY_BOUNDS_THREADS"


class Ensemble(enum.Enum):
    SIMPLEX = "simplex"
    HILBERT_SCHMIDT = "hs"
    PURE_BIPARTITE = "pure"


@dataclass(frozen=True)
class SampleConfig:
    """What to sample and how many.

    For ``Ensemble.PURE_BIPARTITE`` give ``d_a`` and ``d_b``; ``d`` must then
    equal ``min(d_a, d_b)``, the number of Schmidt coefficients.
    """

    d: int
    n: int
    seed: int
    ensemble: Ensemble = Ensemble.SIMPLEX
    d_a: Optional[int] = None
    d_b: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "ensemble", Ensemble(self.ensemble))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 2 <= self.d <= MAX_DIM:
            raise ValueError(f"d must be in [2, {MAX_DIM}], got {self.d}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.ensemble is Ensemble.PURE_BIPARTITE:
            if self.d_a is None or self.d_b is None:
                raise ValueError("pure bipartite sampling needs d_a and d_b")
            if min(self.d_a, self.d_b) != self.d:
                raise ValueError("d must equal min(d_a, d_b) for pure bipartite states")

    @property
    def n_chunks(self) -> int:
        return -(-self.n // CHUNK)


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else ``$ENTROPY_BOUNDS_THREADS``, 0 = auto."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "0")
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


def _chunk_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))


def _simplex_chunk(rng, m, d):
    e = rng.exponential(size=(m, d))
    return e / e.sum(axis=1, keepdims=True)


def _ginibre(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _spectrum_rows(R):
    lam = eigenvalues_batch(R, check=False)
    lam = np.where(lam < 0, 0.0, lam)
    return lam / lam.sum(axis=1, keepdims=True)


def _hs_chunk(rng, m, d):
    G = _ginibre(rng, (m, d, d))
    R = G @ np.conj(np.swapaxes(G, 1, 2))
    return _spectrum_rows(R)


def _pure_chunk(rng, m, d_a, d_b):
    C = _ginibre(rng, (m, d_a, d_b))
    C /= np.sqrt(np.sum(np.abs(C) ** 2, axis=(1, 2)))[:, None, None]
    lam = _spectrum_rows(C @ np.conj(np.swapaxes(C, 1, 2)))
    return lam[:, : min(d_a, d_b)]


def _make_chunk(cfg: SampleConfig, i: int) -> np.ndarray:
    m = min(CHUNK, cfg.n - i * CHUNK)
    rng = _chunk_rng(cfg.seed, i)
    if cfg.ensemble is Ensemble.SIMPLEX:
        return _simplex_chunk(rng, m, cfg.d)
    if cfg.ensemble is Ensemble.HILBERT_SCHMIDT:
        return _hs_chunk(rng, m, cfg.d)
    return _pure_chunk(rng, m, cfg.d_a, cfg.d_b)


def _map_chunks(fn, cfg, threads):
    idx = range(cfg.n_chunks)
    workers = resolve_threads(threads)
    if workers == 1 or cfg.n_chunks == 1:
        yield from map(fn, idx)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, idx)


def sample_batches(cfg: SampleConfig, threads: Optional[int] = None) -> Iterator[np.ndarray]:
    """Yield the samples as ``(m, d)`` arrays in deterministic order."""
    yield from _map_chunks(lambda i: _make_chunk(cfg, i), cfg, threads)


def sample_array(cfg: SampleConfig, threads: Optional[int] = None) -> np.ndarray:
    return np.concatenate(list(sample_batches(cfg, threads)), axis=0)


def _stream(cfg, kind):
    if cfg.ensemble is not kind:
        raise ValueError(f"config ensemble is {cfg.ensemble.value}, expected {kind.value}")
    for batch in sample_batches(cfg):
        for row in batch:
            yield make_probvec(row)


def sample_simplex(cfg: SampleConfig) -> Iterator[ProbVec]:
    """Uniform (flat Dirichlet) probability vectors, one at a time."""
    return _stream(cfg, Ensemble.SIMPLEX)


def sample_density(cfg: SampleConfig) -> Iterator[ProbVec]:
    """Spectra of Hilbert-Schmidt random density matrices ``G G^H / Tr``."""
    return _stream(cfg, Ensemble.HILBERT_SCHMIDT)


def sample_bipartite(cfg: SampleConfig) -> Iterator[ProbVec]:
    """Schmidt probabilities of Haar-random pure states on ``d_a x d_b``."""
    return _stream(cfg, Ensemble.PURE_BIPARTITE)


# --- violation scanning -----------------------------------------------------------


@dataclass(frozen=True)
class ViolationReport:
    """Counts of samples whose ``H_f`` falls outside the family envelope.

    Excursions are measured in raw trace-sum units of ``f``.
    """

    n_total: int
    n_below: int
    n_above: int
    max_excursion: float
    worst_sample: Optional[ProbVec] = None
    generator: str = GENERATOR
    seed: Optional[int] = None

    @property
    def n_violations(self) -> int:
        return self.n_below + self.n_above

    def merge(self, other: "ViolationReport") -> "ViolationReport":
        """Combine two disjoint scans; the earlier report wins excursion ties."""
        worst, exc = self.worst_sample, self.max_excursion
        if other.max_excursion > exc:
            worst, exc = other.worst_sample, other.max_excursion
        return ViolationReport(
            n_total=self.n_total + other.n_total,
            n_below=self.n_below + other.n_below,
            n_above=self.n_above + other.n_above,
            max_excursion=exc,
            worst_sample=worst,
            generator=self.generator,
            seed=self.seed,
        )

    def to_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "n_below": self.n_below,
            "n_above": self.n_above,
            "max_excursion": self.max_excursion,
            "worst_sample": None if self.worst_sample is None else list(self.worst_sample),
            "generator": self.generator,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Scatter:
    """Per-sample ``(H_g, H_f)`` pairs in display coordinates with labels."""

    hg: np.ndarray
    hf: np.ndarray
    violation: np.ndarray  # "below" / "none" / "above"


def scan_samples(f, g, P, *, report: Optional[ConditionReport] = None,
                 threshold: float = VIOLATION_THRESHOLD, seed: Optional[int] = None,
                 with_scatter: bool = False):
    """Check every row of ``P`` against the bounds at its own ``H_g``.

    Bounds come from exact per-sample inversion of ``H_g`` on both families.
    Returns a :class:`ViolationReport`, or ``(report, Scatter)`` when
    ``with_scatter`` is set.
    """
    f, g = make_measure(f), make_measure(g)
    P = np.asarray(P, dtype=float)
    d = P.shape[1]
    cond = report or classify_condition(f, g)
    hg = eval_sum_rows(g, P)
    hf = eval_sum_rows(f, P)
    lo, hi = raw_bounds(f, g, d, hg, cond.verdict)
    exc = np.maximum(np.maximum(lo - hf, hf - hi), 0.0)
    below = hf < lo - threshold
    above = hf > hi + threshold
    worst = None
    max_exc = 0.0
    if exc.size:
        i = int(np.argmax(exc))
        max_exc = float(exc[i])
        if max_exc > 0:
            worst = make_probvec(P[i])
    out = ViolationReport(
        n_total=int(P.shape[0]), n_below=int(below.sum()), n_above=int(above.sum()),
        max_excursion=max_exc, worst_sample=worst, seed=seed,
    )
    if not with_scatter:
        return out
    if f.reverses_order:
        below, above = above, below
    labels = np.where(below, "below", np.where(above, "above", "none"))
    hg_s = np.asarray(g.display.forward(hg) if g.display else hg, dtype=float)
    hf_s = np.asarray(f.display.forward(hf) if f.display else hf, dtype=float)
    return out, Scatter(hg_s, hf_s, labels)


def scan_violations(f, g, curve: Optional[BoundCurve], cfg: SampleConfig, *,
                    threads: Optional[int] = None, threshold: float = VIOLATION_THRESHOLD,
                    with_scatter: bool = False):
    """Sample ``cfg`` and count samples outside the family envelope.

    ``curve``, when given, must span the attainable ``H_g`` range of
    ``cfg.d``; it is not interpolated (bounds are inverted per sample).
    """
    f, g = make_measure(f), make_measure(g)
    cond = classify_condition(f, g)
    if curve is not None:
        low, high = hg_range(g, cfg.d)
        if curve.d != cfg.d or not (
            np.isclose(curve.hg_raw.min(), low, rtol=0, atol=1e-12)
            and np.isclose(curve.hg_raw.max(), high, rtol=0, atol=1e-12)
        ):
            raise EntropyBoundsError("curve does not cover the attainable H_g range")

    def work(i):
        return scan_samples(f, g, _make_chunk(cfg, i), report=cond, threshold=threshold,
                            seed=cfg.seed, with_scatter=with_scatter)

    total = None
    parts = []
    for res in _map_chunks(work, cfg, threads):
        rep = res[0] if with_scatter else res
        if with_scatter:
            parts.append(res[1])
        total = rep if total is None else total.merge(rep)
    if not with_scatter:
        return total
    scatter = Scatter(
        np.concatenate([s.hg for s in parts]),
        np.concatenate([s.hf for s in parts]),
        np.concatenate([s.violation for s in parts]),
    )
    return total, scatter
