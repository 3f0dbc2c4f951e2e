"""Extremal distribution families, H_g inversion, and entropy bounds.

Two one-parameter families of probability vectors, both indexed by the
largest entry ``lambda0 in [1/d, 1]``:

* maxer form ``(lambda0, l1, ..., l1)`` with ``l1 = (1 - lambda0)/(d - 1)``;
* miner form ``(lambda0 x k, l1, 0, ..., 0)`` with ``k = floor(1/lambda0)``
  and ``l1 = 1 - k lambda0``.

When ``f'`` viewed as a function of ``g'`` is strictly convex, the maxer form
maximises ``H_f`` at fixed ``H_g`` and the miner form minimises it; strictly
concave swaps the roles.  :func:`classify_condition` decides which case a
pair of measures falls in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import (
    ConditionIndeterminateError,
    DegenerateMeasureError,
    Lambda0OutOfRangeError,
    MinerOverflowError,
    NoConvergenceError,
    TargetOutOfRangeError,
)
from .measures import EntropyMeasure, Sense, eval_display, make_measure, undo_display
from .simplex import ProbVec, _check_d, make_probvec

INVERT_TOL = 1e-12
MAX_BISECT = 200
CLASSIFY_EPS = 1e-6
CLASSIFY_TOL = 1e-12
DEFAULT_GRIDSIZE = 4096


class Form(enum.Enum):
    MAXER = "maxer"
    MINER = "miner"


class Verdict(enum.Enum):
    STRICTLY_CONVEX = "StrictlyConvex"
    STRICTLY_CONCAVE = "StrictlyConcave"
    INDETERMINATE = "Indeterminate"


def _form(form) -> Form:
    return form if isinstance(form, Form) else Form(str(form).lower())


# --- families ---------------------------------------------------------------


def _miner_k(lam0: float, d: int) -> int:
    """``floor(1/lam0)`` made robust to round-off in ``1/lam0``."""
    k = min(int(math.floor(1.0 / lam0)), d)
    while k > 1 and k * lam0 > 1.0 + 1e-15:
        k -= 1
    while k < d and 1.0 - k * lam0 >= lam0:
        k += 1
    return k


@dataclass(frozen=True)
class ExtremalFamily:
    """One member of the maxer or miner family in dimension ``d``."""

    form: Form
    d: int
    lambda0: float
    k: int = field(init=False, repr=False)
    lambda1: float = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "form", _form(self.form))
        _check_d(self.d)
        lo = 1.0 / self.d
        lam0 = float(self.lambda0)
        if not (lo * (1 - 1e-12) <= lam0 <= 1.0):
            raise Lambda0OutOfRangeError(
                f"lambda0={lam0!r} outside [1/d, 1] = [{lo!r}, 1] for d={self.d}"
            )
        lam0 = max(lam0, lo)
        object.__setattr__(self, "lambda0", lam0)
        if self.form is Form.MAXER:
            k, lam1 = 1, (1.0 - lam0) / (self.d - 1)
        else:
            k = _miner_k(lam0, self.d)
            lam1 = 1.0 - k * lam0
            if lam1 < 1e-15:
                lam1 = 0.0
            if k + (1 if lam1 > 0 else 0) > self.d:
                raise MinerOverflowError(
                    f"miner form needs {k} + 1 entries but d={self.d}"
                )
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "lambda1", lam1)


def realize(fam: ExtremalFamily) -> ProbVec:
    """Materialise a family member as a probability vector of length ``d``."""
    d, lam0 = fam.d, fam.lambda0
    out = np.zeros(d)
    if fam.form is Form.MAXER:
        out[0] = lam0
        out[1:] = fam.lambda1
    else:
        out[: fam.k] = lam0
        if fam.k < d:
            out[fam.k] = fam.lambda1
    return make_probvec(out)


class _Terms(NamedTuple):
    """A family point as ``n0`` copies of ``x0`` plus ``n1`` copies of ``x1``."""

    n0: np.ndarray
    x0: np.ndarray
    n1: np.ndarray
    x1: np.ndarray

    def total(self, m: EntropyMeasure) -> np.ndarray:
        return self.n0 * m._f(self.x0) + self.n1 * m._f(self.x1)


def _maxer_terms(d, lam0):
    lam0 = np.asarray(lam0, dtype=float)
    return _Terms(np.ones_like(lam0), lam0, np.full_like(lam0, d - 1),
                  (1.0 - lam0) / (d - 1))


def _miner_terms_k(k, lam0):
    lam0 = np.asarray(lam0, dtype=float)
    k = np.broadcast_to(np.asarray(k, dtype=float), lam0.shape)
    return _Terms(k, lam0, np.ones_like(lam0), np.maximum(1.0 - k * lam0, 0.0))


def _miner_terms(d, lam0):
    lam0 = np.atleast_1d(np.asarray(lam0, dtype=float))
    k = np.array([_miner_k(v, d) for v in lam0], dtype=float)
    return _miner_terms_k(k, lam0)


def family_Hg(g: EntropyMeasure, fam: ExtremalFamily) -> float:
    """Raw ``H_g`` of a family member, ``n0 g(lambda0) + n1 g(lambda1)``."""
    if fam.form is Form.MAXER:
        t = _maxer_terms(fam.d, fam.lambda0)
    else:
        t = _miner_terms_k(fam.k, fam.lambda0)
    return float(t.total(g))


def hg_range(g: EntropyMeasure, d: int):
    """Attainable raw ``H_g`` interval in dimension ``d`` as ``(low, high)``."""
    u = float(d * g._f(np.array(1.0 / d)))
    p = float(g._f(np.array(1.0)))
    return (u, p) if u <= p else (p, u)


# --- inversion ----------------------------------------------------------------


def _bisect(fn, lo, hi, target, increasing):
    """Vectorised bisection for a monotone ``fn`` on brackets ``[lo, hi]``.

    Runs until every bracket has collapsed to adjacent floats, then returns
    whichever endpoint has the smaller residual.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        live = (mid > lo) & (mid < hi)
        if not np.any(live):
            break
        val = fn(mid)
        right = (val < target) == increasing
        right &= live
        left = ~right & live
        lo = np.where(right, mid, lo)
        hi = np.where(left, mid, hi)
    else:
        raise NoConvergenceError(f"bisection did not converge in {MAX_BISECT} steps")
    r_lo = np.abs(fn(lo) - target)
    r_hi = np.abs(fn(hi) - target)
    return np.where(r_lo <= r_hi, lo, hi)


def _check_targets(g, d, targets):
    low, high = hg_range(g, d)
    slack = INVERT_TOL * np.maximum(1.0, np.abs(targets))
    bad = (targets < low - slack) | (targets > high + slack)
    if np.any(bad):
        raise TargetOutOfRangeError(float(targets[np.argmax(bad)]), low, high)
    return np.clip(targets, low, high)


def _invert(g: EntropyMeasure, form: Form, d: int, targets) -> _Terms:
    """Vectorised inversion returning the family terms at each target."""
    targets = _check_targets(g, d, np.atleast_1d(np.asarray(targets, dtype=float)))
    increasing = g.sense is Sense.CONVEX
    if form is Form.MAXER:
        lam0 = _bisect(lambda x: _maxer_terms(d, x).total(g),
                       np.full_like(targets, 1.0 / d), np.ones_like(targets),
                       targets, increasing)
        return _maxer_terms(d, _snap(g, d, targets, lam0))

    # Miner: k is constant on each segment [1/(k+1), 1/k]; the segment
    # endpoints carry H = k g(1/k) and the map is monotone across segments.
    ks = np.arange(d - 1, 0, -1, dtype=float)           # segment k, ascending lambda0
    nodes = 1.0 / np.arange(d, 0, -1, dtype=float)      # 1/d, ..., 1/2, 1
    node_vals = np.arange(d, 0, -1) * g._f(nodes)
    if not increasing:
        idx = np.searchsorted(-node_vals, -targets, side="left")
    else:
        idx = np.searchsorted(node_vals, targets, side="left")
    # idx points at the right node of the bracketing segment; exact node hits
    # resolve to lambda0 = 1/k with a zero remainder.
    idx = np.clip(idx, 1, d - 1)
    seg_k = ks[idx - 1]
    lo, hi = nodes[idx - 1], nodes[idx]
    hit = node_vals[idx] == targets
    lam0 = _bisect(lambda x: _miner_terms_k(seg_k, x).total(g), lo, hi,
                   targets, increasing)
    lam0 = np.where(hit, hi, lam0)
    return _miner_terms_k(seg_k, _snap(g, d, targets, lam0))


def _snap(g, d, targets, lam0):
    # Exact endpoint targets map to exactly uniform / pure.
    u = d * float(g._f(np.array(1.0 / d)))
    p = float(g._f(np.array(1.0)))
    lam0 = np.where(targets == u, 1.0 / d, lam0)
    return np.where(targets == p, 1.0, lam0)


def invert_Hg(g, form, d: int, target: float) -> float:
    """Find ``lambda0`` whose family member has raw ``H_g == target``."""
    g = make_measure(g)
    _check_d(d)
    terms = _invert(g, _form(form), d, target)
    return float(terms.x0[0])


# --- condition ----------------------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    """Grid evidence about the curvature of ``f'`` as a function of ``g'``.

    ``grid`` holds rows ``(lambda, g'(lambda), f'(lambda))``.  For an
    indeterminate verdict, ``witness`` is a triple of lambdas around which the
    slope ``f''/g''`` stops moving monotonically in ``g'``.
    """

    verdict: Verdict
    f: str
    g: str
    grid: np.ndarray = field(repr=False)
    witness: Optional[tuple] = None

    @property
    def bounding(self) -> bool:
        return self.verdict is not Verdict.INDETERMINATE

    def to_dict(self, include_grid=False) -> dict:
        out = {
            "verdict": self.verdict.value,
            "f": self.f,
            "g": self.g,
            "gridsize": int(self.grid.shape[0]),
            "witness": list(self.witness) if self.witness else None,
        }
        if include_grid:
            out["grid"] = self.grid.tolist()
        return out


def classify_condition(f, g, gridsize: int = DEFAULT_GRIDSIZE) -> ConditionReport:
    """Classify ``f'(g')`` as strictly convex, strictly concave or neither.

    The slope ``d f'/d g' = f''/g''`` is sampled on a uniform lambda grid.
    Because ``g'`` is decreasing in lambda when ``g`` is concave, the samples
    are ordered by increasing ``g'`` before checking monotonicity.
    """
    f, g = make_measure(f), make_measure(g)
    if gridsize < 64:
        raise ValueError(f"gridsize must be >= 64, got {gridsize}")
    lam = np.linspace(CLASSIFY_EPS, 1.0 - CLASSIFY_EPS, gridsize)
    d2g = g.d2f(lam)
    if np.any(d2g == 0) or np.any(np.sign(d2g) != np.sign(d2g[0])):
        i = int(np.argmin(np.abs(d2g)))
        raise DegenerateMeasureError(f"g''({lam[i]!r}) = {d2g[i]!r}: g is not strictly curved")
    h = f.d2f(lam) / d2g
    grid = np.column_stack([lam, g.df(lam), f.df(lam)])

    order = slice(None) if d2g[0] > 0 else slice(None, None, -1)
    hs = h[order]
    diff = np.diff(hs)
    tol = CLASSIFY_TOL * np.maximum(np.abs(hs[1:]), np.abs(hs[:-1]))
    step = np.where(diff > tol, 1, np.where(diff < -tol, -1, 0))

    report = dict(f=f.name, g=g.name, grid=grid)
    if np.all(step == 1):
        return ConditionReport(Verdict.STRICTLY_CONVEX, **report)
    if np.all(step == -1):
        return ConditionReport(Verdict.STRICTLY_CONCAVE, **report)
    lam_o = lam[order]
    change = np.nonzero(step[1:] != step[:-1])[0]
    j = int(change[0]) + 1 if change.size else 1
    witness = (float(lam_o[j - 1]), float(lam_o[j]), float(lam_o[j + 1]))
    return ConditionReport(Verdict.INDETERMINATE, witness=tuple(sorted(witness)), **report)


# --- bounds ---------------------------------------------------------------------


class Bounds(NamedTuple):
    """Bounds on ``H_f`` at one value of ``H_g`` (display coordinates)."""

    hf_min: float
    hf_max: float
    lambda0_min: float
    lambda0_max: float
    form_min: Form
    form_max: Form
    bounding: bool


def _max_form(verdict: Verdict) -> Optional[Form]:
    if verdict is Verdict.STRICTLY_CONVEX:
        return Form.MAXER
    if verdict is Verdict.STRICTLY_CONCAVE:
        return Form.MINER
    return None


def family_values(f, g, d, hg_raw):
    """Raw ``H_f`` on both families at raw ``H_g`` values.

    Returns ``(hf_maxer, hf_miner, lam0_maxer, lam0_miner)`` arrays.
    """
    hg_raw = np.atleast_1d(np.asarray(hg_raw, dtype=float))
    tmax = _invert(g, Form.MAXER, d, hg_raw)
    tmin = _invert(g, Form.MINER, d, hg_raw)
    return tmax.total(f), tmin.total(f), tmax.x0, tmin.x0


def raw_bounds(f, g, d, hg_raw, verdict: Verdict):
    """Raw ``(lower, upper)`` envelopes of ``H_f`` at raw ``H_g`` values.

    For an indeterminate pair the envelope is the pointwise min/max of the
    two family curves, which need not bound anything.
    """
    hmax, hmin, _, _ = family_values(f, g, d, hg_raw)
    top = _max_form(verdict)
    if top is Form.MAXER:
        return hmin, hmax
    if top is Form.MINER:
        return hmax, hmin
    return np.minimum(hmax, hmin), np.maximum(hmax, hmin)


def bounds_at(f, g, d: int, hg: float, *, unchecked: bool = False,
              report: Optional[ConditionReport] = None) -> Bounds:
    """Minimum and maximum of ``H_f`` over all distributions with ``H_g = hg``.

    ``hg`` and the returned values are in display coordinates (the Renyi
    entropy for ``renyi:<alpha>``, the plain trace sum otherwise).  Raises
    :class:`ConditionIndeterminateError` unless the pair is certified, or
    ``unchecked`` is set, in which case the family envelope is returned with
    ``bounding=False``.
    """
    f, g = make_measure(f), make_measure(g)
    _check_d(d)
    report = report or classify_condition(f, g)
    if not report.bounding and not unchecked:
        raise ConditionIndeterminateError(
            f"f'(g') is neither strictly convex nor concave for f={f.name}, "
            f"g={g.name} (witness lambdas {report.witness})"
        )
    hg_raw = float(undo_display(g, float(hg)))
    hmax, hmin, l0max, l0min = (float(v[0]) for v in family_values(f, g, d, hg_raw))
    top = _max_form(report.verdict)
    if top is None:
        top = Form.MAXER if hmax >= hmin else Form.MINER
    if top is Form.MAXER:
        lo, hi, l_lo, l_hi = hmin, hmax, l0min, l0max
        f_lo, f_hi = Form.MINER, Form.MAXER
    else:
        lo, hi, l_lo, l_hi = hmax, hmin, l0max, l0min
        f_lo, f_hi = Form.MAXER, Form.MINER
    lo_s, hi_s = eval_display(f, lo), eval_display(f, hi)
    if f.reverses_order:
        lo_s, hi_s = hi_s, lo_s
        l_lo, l_hi = l_hi, l_lo
        f_lo, f_hi = f_hi, f_lo
    return Bounds(float(lo_s), float(hi_s), l_lo, l_hi, f_lo, f_hi, report.bounding)


# --- curves ---------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCurve:
    """Both family curves sampled across the attainable ``H_g`` range.

    Column arrays are aligned row by row and sorted by displayed ``H_g``.
    ``hg``/``hf_*`` are display coordinates; ``*_raw`` keep the trace sums.
    """

    f: str
    g: str
    d: int
    verdict: Verdict
    hg: np.ndarray
    hf_miner: np.ndarray
    hf_maxer: np.ndarray
    lambda0_miner: np.ndarray
    lambda0_maxer: np.ndarray
    which_is_max: tuple
    hg_raw: np.ndarray = field(repr=False)

    @property
    def bounding(self) -> bool:
        return self.verdict is not Verdict.INDETERMINATE

    def __len__(self):
        return self.hg.shape[0]

    def rows(self):
        for i in range(len(self)):
            yield (float(self.hg[i]), float(self.hf_miner[i]), float(self.hf_maxer[i]),
                   float(self.lambda0_miner[i]), float(self.lambda0_maxer[i]),
                   self.which_is_max[i], self.bounding)


CSV_HEADER = "Hg,Hf_miner,Hf_maxer,lambda0_miner,lambda0_maxer,which_is_max,bounding"


def bound_curve(f, g, d: int, npoints: int, *, unchecked: bool = False,
                report: Optional[ConditionReport] = None) -> BoundCurve:
    """Sample both family curves uniformly in ``lambda0``.

    Each family contributes ``npoints`` values of ``lambda0`` spread evenly
    over ``[1/d, 1]``; the other family is inverted at the resulting ``H_g``.
    Rows with coinciding ``H_g`` (the shared endpoints, or everything when
    ``d = 2``) are merged.
    """
    f, g = make_measure(f), make_measure(g)
    _check_d(d)
    if npoints < 2:
        raise ValueError(f"npoints must be >= 2, got {npoints}")
    report = report or classify_condition(f, g)
    if not report.bounding and not unchecked:
        raise ConditionIndeterminateError(
            f"refusing to emit bounds for unverified pair f={f.name}, g={g.name}"
        )
    lam = np.linspace(1.0 / d, 1.0, npoints)
    hg = np.concatenate([_maxer_terms(d, lam).total(g), _miner_terms(d, lam).total(g)])
    lo, hi = hg_range(g, d)
    hg = np.clip(hg, lo, hi)
    hg = np.sort(hg)
    keep = np.ones(hg.shape, dtype=bool)
    keep[1:] = np.diff(hg) > INVERT_TOL * np.maximum(1.0, np.abs(hg[1:]))
    hg = hg[keep]
    hg[0], hg[-1] = lo, hi

    hmax, hmin, l0max, l0min = family_values(f, g, d, hg)
    top = _max_form(report.verdict)
    hg_s = np.asarray(eval_display(g, hg), dtype=float)
    hmax_s = np.asarray(eval_display(f, hmax), dtype=float)
    hmin_s = np.asarray(eval_display(f, hmin), dtype=float)
    if top is None:
        which = tuple("maxer" if a >= b else "miner" for a, b in zip(hmax_s, hmin_s))
    else:
        if f.reverses_order:
            top = Form.MINER if top is Form.MAXER else Form.MAXER
        which = (top.value,) * hg.shape[0]
    order = np.argsort(hg_s, kind="stable")
    return BoundCurve(
        f=f.name, g=g.name, d=d, verdict=report.verdict,
        hg=hg_s[order], hf_miner=hmin_s[order], hf_maxer=hmax_s[order],
        lambda0_miner=l0min[order], lambda0_maxer=l0max[order],
        which_is_max=tuple(which[i] for i in order), hg_raw=hg[order],
    )
