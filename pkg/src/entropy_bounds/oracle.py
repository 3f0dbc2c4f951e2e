"""Brute-force ground truth for the family bounds on small simplices.

The oracle enumerates every point of the simplex whose coordinates are
multiples of ``1/N`` and keeps those inside a thin slab ``|H_g - c| <= w``.
No calculus is involved, so it can check the extremal machinery from outside.
"""

from __future__ import annotations

import enum
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import DimensionTooLargeError, EmptySlabError
from .measures import EntropyMeasure, make_measure
from .simplex import ProbVec, make_probvec

MAX_ORACLE_DIM = 4


class Structure(enum.Enum):
    MAXER_LIKE = "MaxerLike"
    MINER_LIKE = "MinerLike"
    NEITHER = "Neither"


class OracleResult(NamedTuple):
    min_p: ProbVec
    max_p: ProbVec
    hf_min: float
    hf_max: float
    n_in_slab: int


def _compositions(n: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``n``."""
    if parts == 1:
        return np.array([[n]])
    if parts == 2:
        a = np.arange(n + 1)
        return np.column_stack([a, n - a])
    blocks = []
    for a in range(n + 1):
        rest = _compositions(n - a, parts - 1)
        blocks.append(np.column_stack([np.full(rest.shape[0], a), rest]))
    return np.concatenate(blocks)


def grid_size(step: float) -> int:
    return int(round(1.0 / step))


def default_slab(g: EntropyMeasure, step: float) -> float:
    """``4 * step * max|g'|`` over the interior grid points."""
    n = grid_size(step)
    lam = np.arange(1, n) / n
    return 4.0 * step * float(np.max(np.abs(g.df(lam))))


def grid_extrema(f, g, d: int, step: float, hg_center: float,
                 slab: Optional[float] = None) -> OracleResult:
    """Extreme ``H_f`` over simplex grid points with ``H_g`` in the slab.

    ``step`` is rounded to ``1/N`` for an integer ``N``.  Enumeration is
    sharded on the leading coordinate and reduced in order, so ties resolve to
    the first point in lexicographic order.
    """
    f, g = make_measure(f), make_measure(g)
    if d > MAX_ORACLE_DIM:
        raise DimensionTooLargeError(f"oracle supports d <= {MAX_ORACLE_DIM}, got {d}")
    if d < 2:
        raise ValueError("d must be >= 2")
    if not 1e-4 <= step <= 1e-2:
        raise ValueError(f"step must lie in [1e-4, 1e-2], got {step}")
    if slab is None:
        slab = default_slab(g, step)
    n = grid_size(step)
    # Grid coordinates are j/n, so f and g are tabulated once.
    x = np.arange(n + 1) / n
    ftab, gtab = f.f(x), g.f(x)

    best_lo = best_hi = None
    count = 0
    for lead in range(n + 1):
        rest = _compositions(n - lead, d - 1)
        hg = gtab[lead] + gtab[rest].sum(axis=1)
        keep = np.abs(hg - hg_center) <= slab
        if not np.any(keep):
            continue
        rest = rest[keep]
        hf = ftab[lead] + ftab[rest].sum(axis=1)
        count += rest.shape[0]
        i, j = int(np.argmin(hf)), int(np.argmax(hf))
        if best_lo is None or hf[i] < best_lo[0]:
            best_lo = (float(hf[i]), lead, rest[i])
        if best_hi is None or hf[j] > best_hi[0]:
            best_hi = (float(hf[j]), lead, rest[j])
    if count == 0:
        raise EmptySlabError(
            f"no grid point with |H_g - {hg_center}| <= {slab} at step 1/{n}"
        )

    def point(best):
        return make_probvec(np.concatenate([[best[1]], best[2]]) / n)

    return OracleResult(point(best_lo), point(best_hi), best_lo[0], best_hi[0], count)


def structural_flags(p, tol: float) -> frozenset:
    """Every family shape ``p`` matches within ``tol``.

    Maxer-like: after sorting descending, the trailing ``d - 1`` entries agree.
    Miner-like: a leading block of equal entries, one smaller remainder, and
    zeros (within ``tol``) after it.
    """
    v = np.sort(np.asarray(getattr(p, "values", p), dtype=float))[::-1]
    flags = set()
    if v[1] - v[-1] <= tol:
        flags.add(Structure.MAXER_LIKE)
    for k in range(1, v.size + 1):
        if v[0] - v[k - 1] > tol:
            break
        if k == v.size or np.all(v[k + 1:] <= tol):
            flags.add(Structure.MINER_LIKE)
            break
    return frozenset(flags)


def structural_match(p, tol: float) -> Structure:
    """Classify ``p``; vectors matching both shapes report ``MAXER_LIKE``."""
    flags = structural_flags(p, tol)
    if Structure.MAXER_LIKE in flags:
        return Structure.MAXER_LIKE
    if Structure.MINER_LIKE in flags:
        return Structure.MINER_LIKE
    return Structure.NEITHER


def family_grid_points(d: int, step: float):
    """Integer compositions of ``N = 1/step`` that are exact family members.

    Returns ``(maxer, miner)`` arrays of shape ``(m, d)`` holding counts of
    ``1/N``.  Maxer rows are ``(N - (d-1) j, j, ..., j)`` with the first entry
    largest; miner rows are ``k`` copies of ``i`` followed by ``N - k i`` and
    zeros.
    """
    n = grid_size(step)
    maxer = [[n - (d - 1) * j] + [j] * (d - 1)
             for j in range(n // d + 1) if n - (d - 1) * j >= j]
    miner = []
    for i in range(1, n + 1):
        k = min(n // i, d)
        r = n - k * i
        if k + (1 if r > 0 else 0) > d:
            continue
        miner.append([i] * k + ([r] if r > 0 else []) + [0] * (d - k - (1 if r > 0 else 0)))
    return np.array(maxer), np.array(miner)


def bracket_centers(f, g, d: int, step: float, count: int, *,
                    max_on_low: bool = True) -> list:
    """Slab centers whose two edges are family points of the grid.

    Each slab spans ``[H_g(a), H_g(b)]`` with ``a`` a maxer grid point and
    ``b`` a miner grid point (``max_on_low=True``), or the reverse.  When both
    bound curves fall with ``H_g`` and ``max_on_low`` holds, every slab point
    has ``H_f`` between the two edge values, so the grid contains the true
    extremizers and a brute-force search can confirm them exactly.  Targets
    are spread evenly over the attainable range; each takes the narrowest
    bracket whose midpoint lies in its bin.

    Returns a list of ``(center, half_width)`` pairs.
    """
    g = make_measure(g)
    n = grid_size(step)
    gtab = g.f(np.arange(n + 1) / n)
    maxer, miner = family_grid_points(d, step)
    low, high = gtab[maxer].sum(axis=1), gtab[miner].sum(axis=1)
    if not max_on_low:
        low, high = high, low
    high = np.sort(high)
    # Narrowest partner above each low-edge candidate.
    j = np.searchsorted(high, low, side="left")
    ok = j < high.size
    a, b = low[ok], high[j[ok]]
    lo, hi = sorted((d * float(g.f(1.0 / d)), float(g.f(1.0))))
    mids, gaps = 0.5 * (a + b), b - a
    inside = (mids > lo) & (mids < hi)
    mids, gaps = mids[inside], gaps[inside]
    width = (hi - lo) / count
    out = []
    for t in lo + width * (np.arange(count) + 0.5):
        dist = np.abs(mids - t)
        near = dist <= width / 2
        if not np.any(near):
            near = dist == dist.min()
        i = np.flatnonzero(near)[np.argmin(gaps[near])]
        # Pad for summation-order round-off in the oracle's own H_g sums.
        pad = 1e-12 * max(1.0, abs(mids[i]))
        out.append((float(mids[i]), float(0.5 * gaps[i] + pad)))
    return out
