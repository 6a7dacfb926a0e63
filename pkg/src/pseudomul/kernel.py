"""The kernel map ``O(t) = inf_{s>0} op(s, t)`` and finiteness classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .axioms import DEFAULT_TOL, GridSpec, find_left_identities, sample_points
from .ops import EvalError, PseudoMulOp
from .xreal import INF, XReal, compactify, decompactify, xr

K_STEPS = 80
CONVERGENCE_TOL = 1e-12
ZERO_SNAP = 1e-10
BISECTION_STEPS = 40


class NonConvergence(ArithmeticError):
    """The dyadic iterates ``op(2**-k, t)`` were still moving at ``k = K``."""

    def __init__(self, t: XReal, last: float, previous: float):
        super().__init__(f"O({t}) did not converge: {previous!r} -> {last!r}")
        self.t, self.last, self.previous = t, last, previous


class InconsistentPredicate(ArithmeticError):
    """Sampled finiteness is not downward closed: the operation is broken."""


class IdentityUnknown(ValueError):
    """No left identity is declared or discoverable on the sample grid."""


def kernel_value(op: PseudoMulOp, t, steps: int = K_STEPS) -> XReal:
    """``O(t)`` as the limit of ``op(2**-k, t)`` for ``k = 0..steps``.

    Monotonicity in the first argument makes the infimum over ``s > 0``
    equal to this limit.  Values at or below 1e-10 snap to exact zero.
    """
    t = xr(t)
    tv = float(t)
    vals = []
    for k in range(steps + 1):
        v = op.raw(math.ldexp(1.0, -k), tv)
        if v != v or v < 0:
            raise EvalError("range", f"{op.name}(2**-{k}, {t}) = {v!r}")
        vals.append(v)
    if all(v == math.inf for v in vals):
        return INF
    # snap before comparing: both iterates below the threshold count as 0
    last, prev = (0.0 if v <= ZERO_SNAP else v for v in vals[-1:-3:-1])
    if last == math.inf or prev == math.inf:
        raise NonConvergence(t, last, prev)
    if abs(last - prev) > CONVERGENCE_TOL * max(1.0, abs(last)):
        raise NonConvergence(t, last, prev)
    return XReal._raw(last)


def is_finite(op: PseudoMulOp, t) -> bool:
    """Whether ``t`` is finite with respect to ``op``, i.e. ``O(t) == 0``."""
    return kernel_value(op, t).is_zero


class Kernel:
    """Memoised ``kernel_value``/``is_finite`` for one operation."""

    def __init__(self, op: PseudoMulOp):
        self.op = op
        self._cache: Dict[float, XReal] = {}

    def value(self, t) -> XReal:
        key = float(xr(t))
        if key not in self._cache:
            self._cache[key] = kernel_value(self.op, XReal._raw(key))
        return self._cache[key]

    def is_finite(self, t) -> bool:
        return self.value(t).is_zero


@dataclass(frozen=True)
class FinitenessClass:
    """Shape of the finite set: ``only-zero``, ``all`` or ``up-to`` phi.

    For ``up-to``, ``phi_bracket`` holds a finite (lower) and an infinite
    (upper) probe point; ``phi = inf`` means every finite value is finite.
    """

    kind: str
    phi: Optional[XReal] = None
    phi_bracket: Optional[Tuple[XReal, XReal]] = None
    identity_used: Optional[XReal] = None

    ONLY_ZERO = "only-zero"
    ALL = "all"
    UP_TO = "up-to"

    @property
    def degenerate(self) -> bool:
        return self.kind == self.ONLY_ZERO

    def to_dict(self, op_name: str = None) -> dict:
        d = {}
        if op_name is not None:
            d["op"] = op_name
        d["class"] = self.kind
        d["phi"] = None if self.phi is None else str(self.phi)
        d["phi_bracket"] = None if self.phi_bracket is None else [str(x) for x in self.phi_bracket]
        d["identity_used"] = None if self.identity_used is None else str(self.identity_used)
        return d


def choose_identity(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL) -> XReal:
    """The declared identity, else the smallest discovered one."""
    if op.declared_identity is not None:
        return op.declared_identity
    ids = find_left_identities(op, grid, tol)
    if not ids:
        raise IdentityUnknown(f"{op.name}: no left identity found on the grid")
    return ids[0]


def classify(op: PseudoMulOp, identity: Optional[XReal] = None, grid: GridSpec = GridSpec(),
             tol: float = DEFAULT_TOL, steps: int = BISECTION_STEPS,
             kernel: Optional[Kernel] = None) -> FinitenessClass:
    """Classify the set of finite elements as ``{0}``, ``[0, inf]`` or ``[0, phi)``.

    The boundary phi is bracketed by bisection on the monotone predicate
    ``is_finite`` in compactified coordinates.  If the upper end never
    leaves the compactification boundary the result is ``up-to inf``.
    """
    e = xr(identity) if identity is not None else choose_identity(op, grid, tol)
    ker = kernel or Kernel(op)
    if not ker.is_finite(e):
        return FinitenessClass(FinitenessClass.ONLY_ZERO, identity_used=e)
    if ker.is_finite(INF):
        return FinitenessClass(FinitenessClass.ALL, identity_used=e)
    lo, hi = compactify(e), 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ker.is_finite(decompactify(mid)):
            lo = mid
        else:
            hi = mid
    lo_x, hi_x = decompactify(lo), decompactify(hi)
    # the predicate must be downward closed on the sample grid
    for p in sample_points(op, grid):
        if p < lo_x and not ker.is_finite(p):
            raise InconsistentPredicate(f"{op.name}: {p} < {lo_x} is not finite")
        if p > hi_x and ker.is_finite(p):
            raise InconsistentPredicate(f"{op.name}: {p} > {hi_x} is finite")
    if hi == 1.0:
        return FinitenessClass(FinitenessClass.UP_TO, INF, (lo_x, INF), e)
    phi = decompactify(0.5 * (lo + hi))
    return FinitenessClass(FinitenessClass.UP_TO, phi, (lo_x, hi_x), e)
