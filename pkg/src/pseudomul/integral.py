"""Idempotent integrals over finite maxitive measure spaces.

The integral of ``f`` over ``B`` is ``sup_{t>0} op(t, nu(B & {f >= t}))``.
With ``op = times`` this is the Shilkret integral, with ``op = min`` the
Sugeno integral.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .ops import PseudoMulOp
from .xreal import ZERO, XReal, join, xr

LEVEL_SET = "f >= t"


@dataclass(frozen=True)
class MaxitiveSpace:
    """Finite ground set with a point density ``c``; ``nu(A) = max_{x in A} c(x)``."""

    ground: Tuple[str, ...]
    density: Mapping[str, XReal]

    def __post_init__(self):
        if len(set(self.ground)) != len(self.ground):
            raise ValueError("ground points must be distinct")
        missing = [x for x in self.ground if x not in self.density]
        if missing:
            raise ValueError(f"density missing for {missing}")
        extra = [x for x in self.density if x not in self.ground]
        if extra:
            raise ValueError(f"density given for unknown points {extra}")

    @classmethod
    def of(cls, density: Mapping[str, object], ground: Optional[Sequence[str]] = None) -> "MaxitiveSpace":
        ground = tuple(ground) if ground is not None else tuple(density)
        return cls(ground, {k: xr(v) for k, v in density.items()})


@dataclass(frozen=True)
class SimpleFunction:
    values: Mapping[str, XReal]

    @classmethod
    def of(cls, values: Mapping[str, object]) -> "SimpleFunction":
        return cls({k: xr(v) for k, v in values.items()})

    def __call__(self, x: str) -> XReal:
        return self.values[x]


def _check_subset(space: MaxitiveSpace, A: Iterable[str]) -> list:
    A = list(A)
    unknown = [x for x in A if x not in space.density]
    if unknown:
        raise KeyError(f"unknown point(s) {unknown}")
    return A


def measure(space: MaxitiveSpace, A: Iterable[str]) -> XReal:
    """``nu(A)``: the max of the density over ``A``, 0 on the empty set."""
    out = ZERO
    for x in _check_subset(space, A):
        out = join(out, space.density[x])
    return out


def _check_function(f: SimpleFunction, space: MaxitiveSpace):
    missing = [x for x in space.ground if x not in f.values]
    if missing:
        raise ValueError(f"function undefined at {missing}")


def integrate(op: PseudoMulOp, f: SimpleFunction, space: MaxitiveSpace,
              B: Optional[Iterable[str]] = None) -> XReal:
    """Exact level-set integral by enumerating the values of ``f`` on ``B``.

    The level measure is a right-continuous step function jumping only
    at values of ``f``; monotonicity of ``op`` in its first argument puts
    the supremum over each step at the step's right end.
    """
    _check_function(f, space)
    B = _check_subset(space, space.ground if B is None else B)
    best = ZERO
    for t in sorted({f(x) for x in B if not f(x).is_zero}):
        level = measure(space, (x for x in B if f(x) >= t))
        best = join(best, op.apply(t, level))
    return best


@lru_cache(maxsize=4)
def _threshold_grid(n_grid: int) -> np.ndarray:
    u = np.arange(1, n_grid + 1, dtype=float) / n_grid
    with np.errstate(divide="ignore"):
        grid = np.where(u >= 1.0, np.inf, u / (1.0 - u))
    grid.flags.writeable = False
    return grid


def integrate_oracle(op: PseudoMulOp, f: SimpleFunction, space: MaxitiveSpace,
                     B: Optional[Iterable[str]] = None, n_grid: int = 1_000_000) -> XReal:
    """Brute-force check of :func:`integrate` on a dense threshold grid.

    Thresholds are ``n_grid`` compactified-uniform points in ``(0, inf]``
    together with the values of ``f``.  Intended for tests.
    """
    _check_function(f, space)
    B = _check_subset(space, space.ground if B is None else B)
    grid = _threshold_grid(n_grid)
    fv = np.array([float(f(x)) for x in B], float)
    cv = np.array([float(space.density[x]) for x in B], float)
    thresholds = np.concatenate([grid, fv[fv > 0]])
    order = np.argsort(fv)
    fs, cs = fv[order], cv[order]
    # suffix max of densities over points sorted by f value
    suffix = np.maximum.accumulate(cs[::-1])[::-1] if len(cs) else cs
    suffix = np.append(suffix, 0.0)
    first = np.searchsorted(fs, thresholds, side="left")  # first index with f >= t
    levels = suffix[first]
    vals = op.apply_array(thresholds, levels)
    if np.isnan(vals).any():
        bad = int(np.flatnonzero(np.isnan(vals))[0])
        op.apply(XReal._raw(thresholds[bad]), XReal._raw(levels[bad]))  # raises the EvalError
    return XReal._raw(float(vals.max())) if vals.size else ZERO


def shilkret(f: SimpleFunction, space: MaxitiveSpace, B: Optional[Iterable[str]] = None) -> XReal:
    """Closed form ``max_{x in B} f(x) * c(x)`` (with ``0 * inf = 0``)."""
    B = _check_subset(space, space.ground if B is None else B)
    best = ZERO
    for x in B:
        a, b = f(x), space.density[x]
        best = join(best, ZERO if a.is_zero or b.is_zero else XReal._raw(float(a) * float(b)))
    return best


def sugeno(f: SimpleFunction, space: MaxitiveSpace, B: Optional[Iterable[str]] = None) -> XReal:
    """Closed form ``max_{x in B} min(f(x), c(x))``."""
    B = _check_subset(space, space.ground if B is None else B)
    best = ZERO
    for x in B:
        best = join(best, min(f(x), space.density[x]))
    return best


# instance files ---------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    space: MaxitiveSpace
    f: SimpleFunction
    B: Tuple[str, ...]


def _xr_field(v) -> XReal:
    if isinstance(v, bool):
        raise ValueError(f"not an extended real: {v!r}")
    return xr(v)


def instance_from_dict(d: Dict) -> Instance:
    """Build an instance from ``{ground, density, f, B}``; values may be ``"inf"``."""
    ground = tuple(d["ground"])
    space = MaxitiveSpace(ground, {k: _xr_field(v) for k, v in d["density"].items()})
    f = SimpleFunction({k: _xr_field(v) for k, v in d["f"].items()})
    _check_function(f, space)
    B = tuple(_check_subset(space, d.get("B", ground)))
    return Instance(space, f, B)


def load_instance(path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
