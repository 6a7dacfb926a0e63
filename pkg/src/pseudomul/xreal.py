"""Extended nonnegative reals [0, inf] with the idempotent addition (max)."""

from __future__ import annotations

import math
from functools import total_ordering
from typing import Union

Number = Union[int, float]


@total_ordering
class XReal:
    """An element of [0, inf].

    Finite values carry a nonnegative magnitude; infinity is a distinct
    value (:data:`INF`) tested with :attr:`is_inf`.  Equality is exact.
    Use :func:`isclose` for tolerance-based comparison.
    """

    __slots__ = ("_v",)

    def __init__(self, value: Union["XReal", Number, str] = 0.0):
        if isinstance(value, XReal):
            v = value._v
        elif isinstance(value, str):
            v = _parse_text(value)
        else:
            v = float(value)
        if math.isnan(v):
            raise ValueError("XReal cannot be NaN")
        if v < 0:
            raise ValueError(f"XReal must be nonnegative, got {value!r}")
        object.__setattr__(self, "_v", v + 0.0)

    @classmethod
    def _raw(cls, v: float) -> "XReal":
        # trusted constructor: v is a float in [0, inf]
        obj = object.__new__(cls)
        object.__setattr__(obj, "_v", float(v) + 0.0)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("XReal is immutable")

    def __reduce__(self):
        return (XReal, (str(self),))

    @property
    def is_inf(self) -> bool:
        return self._v == math.inf

    @property
    def is_zero(self) -> bool:
        return self._v == 0.0

    @property
    def magnitude(self) -> float:
        """The finite magnitude; raises for infinity."""
        if self.is_inf:
            raise ValueError("infinity has no finite magnitude")
        return self._v

    def __float__(self) -> float:
        return self._v

    def __eq__(self, other):
        if isinstance(other, XReal):
            return self._v == other._v
        if isinstance(other, (int, float)):
            return self._v == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, XReal):
            return self._v < other._v
        if isinstance(other, (int, float)):
            return self._v < other
        return NotImplemented

    def __hash__(self):
        return hash(self._v)

    def __str__(self) -> str:
        return "inf" if self.is_inf else repr(self._v)

    def __repr__(self) -> str:
        return f"XReal({str(self)!r})"


def _parse_text(text: str) -> float:
    token = text.strip().lower()
    if token in ("inf", "+inf", "infinity", "∞"):
        return math.inf
    try:
        v = float(token)
    except ValueError:
        raise ValueError(f"not an extended real: {text!r}") from None
    if math.isinf(v) or math.isnan(v):
        raise ValueError(f"not an extended real: {text!r}")
    return v


ZERO = XReal._raw(0.0)
ONE = XReal._raw(1.0)
INF = XReal._raw(math.inf)


def xr(value) -> XReal:
    """Coerce numbers, strings and XReal values to XReal."""
    return value if isinstance(value, XReal) else XReal(value)


def parse(text: str) -> XReal:
    """Parse the textual form: a decimal literal or ``inf``."""
    return XReal(text)


def join(a: XReal, b: XReal) -> XReal:
    """The idempotent addition: max under the total order."""
    return a if a >= b else b


def compactify(t: XReal) -> float:
    """Map [0, inf] onto [0, 1] by t / (1 + t), with inf -> 1."""
    v = float(t)
    if v == math.inf:
        return 1.0
    return v / (1.0 + v)


def decompactify(u: float) -> XReal:
    """Inverse of :func:`compactify`."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"decompactify expects u in [0, 1], got {u!r}")
    if u == 1.0:
        return INF
    return XReal._raw(u / (1.0 - u))


def isclose(a: XReal, b: XReal, tol: float = 1e-9) -> bool:
    """Tolerance comparison, exact whenever either side is 0 or inf.

    Finite values match when ``|a - b| <= tol * max(1, a, b)``.
    """
    return close_raw(float(a), float(b), tol)


def close_raw(a: float, b: float, tol: float) -> bool:
    if a == b:
        return True
    if a == 0.0 or b == 0.0 or a == math.inf or b == math.inf:
        return False
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def leq_raw(a: float, b: float, tol: float) -> bool:
    """``a <= b`` forgiving finite excess within tolerance."""
    if a <= b:
        return True
    if b == 0.0 or a == math.inf:
        return False
    return a - b <= tol * max(1.0, a, b)
