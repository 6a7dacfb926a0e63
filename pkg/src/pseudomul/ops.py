"""Pseudo-multiplications on [0, inf] and the built-in catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .xreal import INF, ONE, XReal, xr

RawFn = Callable[[float, float], float]

# largest double below 1; keeps atanh finite
_BELOW_ONE = math.nextafter(1.0, 0.0)


class EvalError(ArithmeticError):
    """A domain fault while evaluating an operation at one input pair.

    ``tag`` names the fault (``atanh-domain``, ``div-by-zero`` ...).
    Sweeps turn these into witnesses instead of aborting.
    """

    def __init__(self, tag: str, detail: str = ""):
        super().__init__(f"{tag}: {detail}" if detail else tag)
        self.tag = tag
        self.detail = detail


@dataclass(frozen=True)
class PseudoMulOp:
    """A named candidate binary operation on [0, inf].

    ``raw`` is the float-level implementation (``math.inf`` encodes
    infinity, inputs are already validated); :meth:`apply` is the
    XReal-typed entry point.  ``landmarks`` are critical values the
    checkers add to their sample sets (thresholds, identities).
    ``vectorized`` is an optional numpy version of ``raw`` used by
    brute-force sweeps.
    """

    name: str
    raw: RawFn = field(repr=False, compare=False)
    declared_identity: Optional[XReal] = None
    commutative_hint: Optional[bool] = None
    landmarks: Tuple[XReal, ...] = ()
    vectorized: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = field(
        default=None, repr=False, compare=False
    )

    def apply(self, s: XReal, t: XReal) -> XReal:
        v = self.raw(float(s), float(t))
        if v != v or v < 0:
            raise EvalError("range", f"{self.name}({s}, {t}) = {v!r}")
        return XReal._raw(v)

    def __call__(self, s, t) -> XReal:
        return self.apply(xr(s), xr(t))

    def apply_array(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Elementwise evaluation on float arrays; NaN marks an evaluation error."""
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        if self.vectorized is not None:
            out = np.asarray(self.vectorized(s, t), float)
            return np.where(out < 0, math.nan, out)
        out = np.empty(s.shape)
        flat_s, flat_t, flat_o = s.ravel(), t.ravel(), out.ravel()
        for i in range(flat_s.size):
            try:
                flat_o[i] = self.raw(float(flat_s[i]), float(flat_t[i]))
            except EvalError:
                flat_o[i] = math.nan
        out[out < 0] = math.nan
        return out


def apply(op: PseudoMulOp, s: XReal, t: XReal) -> XReal:
    return op.apply(s, t)


def _times(s: float, t: float) -> float:
    if s == 0.0 or t == 0.0:
        return 0.0
    return s * t


def _times_vec(s, t):
    with np.errstate(invalid="ignore"):
        out = s * t
    return np.where((s == 0) | (t == 0), 0.0, out)


def builtin_times() -> PseudoMulOp:
    """Ordinary multiplication with ``0 * inf = inf * 0 = 0``."""
    return PseudoMulOp(
        name="times",
        raw=_times,
        declared_identity=ONE,
        commutative_hint=True,
        landmarks=(ONE,),
        vectorized=_times_vec,
    )


def builtin_min() -> PseudoMulOp:
    """The infimum; its left identity is inf."""
    return PseudoMulOp(
        name="min",
        raw=min,
        declared_identity=INF,
        commutative_hint=True,
        vectorized=np.minimum,
    )


def _degenerate_right(s: float, t: float) -> float:
    return t if s > 0.0 else 0.0


def builtin_degenerate_right() -> PseudoMulOp:
    """``s (x) t = t`` for ``s > 0`` and ``0 (x) t = 0``.

    Every positive value is a left identity; 1 is declared.
    """
    return PseudoMulOp(
        name="degenerate-right",
        raw=_degenerate_right,
        declared_identity=ONE,
        commutative_hint=False,
        landmarks=(ONE,),
        vectorized=lambda s, t: np.where(s > 0, t, 0.0),
    )


def _tanh_conj(s: float, t: float, phi: float) -> float:
    a = math.atanh(min(s / phi, _BELOW_ONE))
    b = math.atanh(min(t / phi, _BELOW_ONE))
    return min(phi * math.tanh(a * b), phi)


def builtin_tanh_phi(phi, patched: bool = True) -> PseudoMulOp:
    """Truncated conjugate of multiplication with finiteness bound ``phi``.

    Below ``phi`` in both arguments the operation is
    ``phi * tanh(atanh(s/phi) * atanh(t/phi))``; otherwise ``max(s, t)``.
    The patched form forces ``s * 0 = 0 * t = 0``, which the verbatim
    two-clause form violates for arguments at or above ``phi``.
    """
    phi_x = xr(phi)
    if phi_x.is_zero or phi_x.is_inf:
        raise ValueError(f"tanh-phi needs 0 < phi < inf, got {phi_x}")
    p = float(phi_x)

    def raw(s: float, t: float) -> float:
        if patched and (s == 0.0 or t == 0.0):
            return 0.0
        if s >= p or t >= p:
            return s if s >= t else t
        return _tanh_conj(s, t, p)

    def vec(s, t):
        lo = (s < p) & (t < p)
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.arctanh(np.minimum(np.where(lo, s, 0.0) / p, _BELOW_ONE))
            b = np.arctanh(np.minimum(np.where(lo, t, 0.0) / p, _BELOW_ONE))
            inner = np.minimum(p * np.tanh(a * b), p)
        out = np.where(lo, inner, np.maximum(s, t))
        if patched:
            out = np.where((s == 0) | (t == 0), 0.0, out)
        return out

    identity = XReal._raw(p * math.tanh(1.0))
    variant = "patched" if patched else "verbatim"
    return PseudoMulOp(
        name=f"tanh-phi:{phi_x}:{variant}",
        raw=raw,
        declared_identity=identity,
        commutative_hint=True,
        landmarks=(identity, phi_x),
        vectorized=vec,
    )


def builtin(name: str) -> PseudoMulOp:
    """Resolve ``times``, ``min``, ``degenerate-right`` or ``tanh-phi:<phi>[:variant]``."""
    if name == "times":
        return builtin_times()
    if name == "min":
        return builtin_min()
    if name == "degenerate-right":
        return builtin_degenerate_right()
    if name.startswith("tanh-phi:"):
        parts = name.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"malformed builtin {name!r}")
        variant = parts[2] if len(parts) == 3 else "patched"
        if variant not in ("patched", "verbatim"):
            raise ValueError(f"unknown tanh-phi variant {variant!r}")
        return builtin_tanh_phi(XReal(parts[1]), patched=(variant == "patched"))
    raise ValueError(f"unknown builtin operation {name!r}")


BUILTIN_NAMES = ("times", "min", "degenerate-right", "tanh-phi:<phi>[:verbatim|:patched]")
