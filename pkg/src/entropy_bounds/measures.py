"""Trace-form entropy functions and the registry of named measures.

A measure is a scalar function ``f`` on ``[0, 1]`` with ``f(0) = 0`` that is
strictly concave or strictly convex.  The entropy of a probability vector (or
of a density matrix, via its eigenvalues) is ``sum_i f(p_i)``.  Logarithms are
base 2 throughout.

Measures are built from a short textual spec::

    shannon
    power:<alpha>
    tsallis:<q>
    renyi:<alpha>
    peculiar:<omega>[:<a>]
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import DomainError, SpecError

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2

#: Derivatives are only evaluated on ``[EPS, 1 - EPS]``.
EPS = 1e-9

PECULIAR_DEFAULT_AMPLITUDE = 1.99

GRAMMAR = "shannon | power:<alpha> | tsallis:<q> | renyi:<alpha> | peculiar:<omega>[:<a>]"

#: Specs exercised by the test-suite as "every registered measure".
BUILTIN_SPECS = (
    "shannon",
    "power:2",
    "power:3",
    "power:1.5",
    "power:0.5",
    "tsallis:2",
    "tsallis:0.5",
    "renyi:2",
    "renyi:0.5",
    "peculiar:10",
    "peculiar:4",
)


class Sense(enum.Enum):
    CONCAVE = "concave"
    CONVEX = "convex"


@dataclass(frozen=True)
class Display:
    """Monotone transform applied to a raw trace sum for reporting."""

    name: str
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    reverses_order: bool


@dataclass(frozen=True)
class EntropyMeasure:
    """An immutable trace-form entropy function with analytic derivatives.

    ``f`` accepts scalars or arrays on ``[0, 1]``; ``df`` and ``d2f`` raise
    :class:`DomainError` for arguments within ``EPS`` of either endpoint.
    """

    name: str
    _f: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _df: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _d2f: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    sense: Sense
    display: Optional[Display] = None

    def f(self, lam):
        x = np.asarray(lam, dtype=float)
        return _like(lam, self._f(x))

    def df(self, lam):
        x = _interior(lam)
        return _like(lam, self._df(x))

    def d2f(self, lam):
        x = _interior(lam)
        return _like(lam, self._d2f(x))

    @property
    def reverses_order(self) -> bool:
        return self.display is not None and self.display.reverses_order

    def __str__(self):
        return self.name


def _like(ref, out):
    if np.ndim(ref) == 0:
        return float(out)
    return out


def _interior(lam):
    x = np.asarray(lam, dtype=float)
    if np.any(x < EPS) or np.any(x > 1.0 - EPS):
        raise DomainError(
            f"derivative requested outside [{EPS}, {1 - EPS}]; got range "
            f"[{np.min(x)!r}, {np.max(x)!r}]"
        )
    return x


# --- concrete measures --------------------------------------------------------


def _shannon_f(x):
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = -xp * np.log2(xp)
    return out


def shannon() -> EntropyMeasure:
    return EntropyMeasure(
        name="shannon",
        _f=_shannon_f,
        _df=lambda x: -np.log2(x) - LOG2E,
        _d2f=lambda x: -LOG2E / x,
        sense=Sense.CONCAVE,
    )


def _power_parts(alpha):
    def f(x):
        return x**alpha

    def df(x):
        return alpha * x ** (alpha - 1.0)

    def d2f(x):
        return alpha * (alpha - 1.0) * x ** (alpha - 2.0)

    sense = Sense.CONVEX if alpha > 1 else Sense.CONCAVE
    return f, df, d2f, sense


def power(alpha: float, name: Optional[str] = None) -> EntropyMeasure:
    if not alpha > 0 or alpha == 1:
        raise SpecError(f"power requires alpha > 0 and alpha != 1, got {alpha!r}")
    f, df, d2f, sense = _power_parts(alpha)
    return EntropyMeasure(
        name=name or f"power:{_fmt(alpha)}", _f=f, _df=df, _d2f=d2f, sense=sense
    )


def tsallis(q: float) -> EntropyMeasure:
    if not q > 0 or q == 1:
        raise SpecError(f"tsallis requires q > 0 and q != 1, got {q!r}")

    def f(x):
        return (x - x**q) / (q - 1.0)

    return EntropyMeasure(
        name=f"tsallis:{_fmt(q)}",
        _f=f,
        _df=lambda x: (1.0 - q * x ** (q - 1.0)) / (q - 1.0),
        _d2f=lambda x: -q * x ** (q - 2.0),
        sense=Sense.CONCAVE,
    )


def renyi(alpha: float) -> EntropyMeasure:
    """Power sum ``sum p**alpha`` reported as ``log2(sum)/(1 - alpha)``."""
    if not alpha > 0 or alpha == 1:
        raise SpecError(f"renyi requires alpha > 0 and alpha != 1, got {alpha!r}")
    f, df, d2f, sense = _power_parts(alpha)
    scale = 1.0 - alpha

    def forward(t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("renyi display needs a positive power sum")
        return np.log2(t) / scale

    def inverse(s):
        return np.exp2(np.asarray(s, dtype=float) * scale)

    display = Display(
        name=f"renyi:{_fmt(alpha)}", forward=forward, inverse=inverse,
        reverses_order=alpha > 1,
    )
    return EntropyMeasure(
        name=f"renyi:{_fmt(alpha)}", _f=f, _df=df, _d2f=d2f, sense=sense,
        display=display,
    )


def peculiar(omega: float, a: float = PECULIAR_DEFAULT_AMPLITUDE) -> EntropyMeasure:
    """``f(x) = x**2 + a (1 - cos(omega x)) / omega**2``; convex while ``a < 2``."""
    if not omega > 0:
        raise SpecError(f"peculiar requires omega > 0, got {omega!r}")
    if not 0 < a < 2:
        raise SpecError(f"peculiar requires 0 < a < 2, got {a!r}")
    w2 = omega * omega
    return EntropyMeasure(
        name=f"peculiar:{_fmt(omega)}:{_fmt(a)}",
        # 1 - cos(t) = 2 sin(t/2)^2 without cancellation at small t.
        _f=lambda x: x * x + 2.0 * a * np.sin(0.5 * omega * x) ** 2 / w2,
        _df=lambda x: 2.0 * x + a * np.sin(omega * x) / omega,
        _d2f=lambda x: 2.0 + a * np.cos(omega * x),
        sense=Sense.CONVEX,
    )


def _fmt(v: float) -> str:
    return f"{v:g}" if float(v) == float(f"{v:g}") else repr(float(v))


def _num(token: str, what: str, spec: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise SpecError(
            f"bad {what} {token!r} in measure spec {spec!r}; grammar: {GRAMMAR}"
        ) from None
    if not math.isfinite(v):
        raise SpecError(f"{what} must be finite in {spec!r}")
    return v


def make_measure(spec) -> EntropyMeasure:
    """Parse a measure spec such as ``"shannon"`` or ``"peculiar:10:1.99"``.

    An :class:`EntropyMeasure` passes through unchanged.
    """
    if isinstance(spec, EntropyMeasure):
        return spec
    if not isinstance(spec, str):
        raise SpecError(f"measure spec must be a string; grammar: {GRAMMAR}")
    parts = spec.strip().lower().split(":")
    kind, args = parts[0], parts[1:]
    if kind == "shannon":
        if args:
            raise SpecError(f"shannon takes no parameters; grammar: {GRAMMAR}")
        return shannon()
    if kind in ("power", "tsallis", "renyi"):
        if len(args) != 1:
            raise SpecError(f"{kind} takes exactly one parameter; grammar: {GRAMMAR}")
        v = _num(args[0], "alpha" if kind != "tsallis" else "q", spec)
        return {"power": power, "tsallis": tsallis, "renyi": renyi}[kind](v)
    if kind == "peculiar":
        if len(args) not in (1, 2):
            raise SpecError(f"peculiar takes omega and optional a; grammar: {GRAMMAR}")
        omega = _num(args[0], "omega", spec)
        a = _num(args[1], "a", spec) if len(args) == 2 else PECULIAR_DEFAULT_AMPLITUDE
        return peculiar(omega, a)
    raise SpecError(f"unknown measure {kind!r}; grammar: {GRAMMAR}")


def eval_sum(m: EntropyMeasure, p) -> float:
    """Raw trace sum ``sum_i f(p_i)``; zero entries contribute exactly 0."""
    values = getattr(p, "values", p)
    return float(np.sum(m.f(np.asarray(values, dtype=float))))


def eval_sum_rows(m: EntropyMeasure, P: np.ndarray) -> np.ndarray:
    """Row-wise trace sums of an ``(n, d)`` array of probability vectors."""
    return np.sum(m._f(np.asarray(P, dtype=float)), axis=-1)


def eval_display(m: EntropyMeasure, raw):
    """Apply the measure's display transform (identity when it has none)."""
    if m.display is None:
        return raw
    return _like(raw, m.display.forward(raw))


def undo_display(m: EntropyMeasure, shown):
    if m.display is None:
        return shown
    return _like(shown, m.display.inverse(shown))
