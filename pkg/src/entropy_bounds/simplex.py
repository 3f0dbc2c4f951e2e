"""Probability vectors: validation and the two elementary constructions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NegativeEntryError, SumNotOneError, TooShortError

#: Entries in ``[-CLAMP, 0)`` are eigensolver round-off and become exact zeros.
CLAMP = 1e-12
#: Per-dimension slack on ``|sum - 1|``.
SUM_TOL = 1e-10
MAX_DIM = 10_000


@dataclass(frozen=True, eq=False)
class ProbVec:
    """A validated, read-only probability vector of dimension ``d >= 2``.

    Build instances with :func:`make_probvec`; the constructor trusts its input.
    """

    values: np.ndarray

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def __len__(self):
        return self.d

    def __iter__(self):
        return iter(self.values.tolist())

    def __getitem__(self, i):
        return self.values[i]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other):
        if isinstance(other, ProbVec):
            return np.array_equal(self.values, other.values)
        return NotImplemented

    def __hash__(self):
        return hash(self.values.tobytes())

    def __repr__(self):
        return f"ProbVec({self.values.tolist()!r})"

    def sorted(self) -> "ProbVec":
        """Copy with entries in descending order."""
        return _freeze(np.sort(self.values)[::-1])


def _freeze(arr: np.ndarray) -> ProbVec:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return ProbVec(arr)


def check_prob_rows(X, *, name="X") -> np.ndarray:
    """Validate an ``(n, d)`` array whose rows are probability vectors.

    Applies the clamp band and per-dimension sum tolerance to every row and
    returns a float copy.  Shared by :func:`make_probvec` and the estimators.
    """
    X = np.array(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    d = X.shape[1]
    if d < 2:
        raise TooShortError(f"{name}: probability vectors need d >= 2, got d={d}")
    if d > MAX_DIM:
        raise ValueError(f"{name}: dimension {d} exceeds cap {MAX_DIM}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(X < -CLAMP):
        worst = float(X.min())
        raise NegativeEntryError(f"{name}: entry {worst!r} below clamp band -{CLAMP}")
    X[X < 0] = 0.0
    dev = np.abs(X.sum(axis=1) - 1.0)
    if np.any(dev > SUM_TOL * d):
        i = int(np.argmax(dev))
        raise SumNotOneError(
            f"{name}: row {i} sums to {X[i].sum()!r}, tolerance {SUM_TOL * d:g}"
        )
    return X


def make_probvec(values) -> ProbVec:
    """Validate ``values`` and wrap them as a :class:`ProbVec` (order preserved).

    >>> make_probvec([1.0, -1e-13, 1e-13]).values.tolist()
    [1.0, 0.0, 1e-13]
    """
    if isinstance(values, ProbVec):
        return values
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D sequence, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise TooShortError(f"probability vectors need d >= 2, got d={arr.shape[0]}")
    return _freeze(check_prob_rows(arr[None, :], name="values")[0])


def uniform(d: int) -> ProbVec:
    _check_d(d)
    return _freeze(np.full(d, 1.0 / d))


def pure(d: int) -> ProbVec:
    _check_d(d)
    arr = np.zeros(d)
    arr[0] = 1.0
    return _freeze(arr)


def _check_d(d):
    if int(d) != d or d < 2:
        raise TooShortError(f"dimension must be an integer >= 2, got {d!r}")
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds cap {MAX_DIM}")
