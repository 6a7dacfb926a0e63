import math
import pickle

import pytest
from hypothesis import given, strategies as st

from pseudomul.xreal import (
    INF, ONE, ZERO, XReal, close_raw, compactify, decompactify, isclose, join, leq_raw, parse, xr,
)

finite = st.floats(min_value=0.0, max_value=1e300, allow_nan=False, allow_infinity=False)
xreals = st.one_of(finite.map(XReal), st.just(INF), st.just(ZERO))


def test_construction_and_parse():
    assert XReal(3) == 3.0
    assert XReal("inf").is_inf
    assert parse("∞") is not None and parse("∞").is_inf
    assert parse(" 2.5 ") == XReal(2.5)
    assert XReal(XReal(4)) == XReal(4)
    assert str(INF) == "inf" and str(XReal(0.5)) == "0.5"


@pytest.mark.parametrize("bad", [-1, -1e-300, math.nan, "nan", "-inf", "abc", "1e999"])
def test_rejects_negative_nan_and_garbage(bad):
    with pytest.raises(ValueError):
        XReal(bad)


def test_negative_zero_normalised():
    assert str(XReal(-0.0)) == "0.0"


def test_immutable_and_picklable():
    x = XReal(2)
    with pytest.raises(AttributeError):
        x._v = 3.0
    assert pickle.loads(pickle.dumps(INF)) == INF


def test_magnitude():
    assert XReal(7).magnitude == 7.0
    with pytest.raises(ValueError):
        INF.magnitude


def test_join_examples():
    for t in [ZERO, ONE, XReal(0.3), INF]:
        assert join(ZERO, t) == t
    assert join(INF, XReal(5)) == INF
    assert join(XReal(2), XReal(3)) == XReal(3)


@given(xreals, xreals)
def test_total_order(a, b):
    assert sum([a < b, a == b, a > b]) == 1
    if not a.is_inf:
        assert a < INF


@given(xreals, xreals, xreals)
def test_join_laws(a, b, c):
    assert join(a, join(b, c)) == join(join(a, b), c)
    assert join(a, b) == join(b, a)
    assert join(a, a) == a


def test_compactify_examples():
    assert compactify(ZERO) == 0.0
    assert compactify(INF) == 1.0
    assert decompactify(compactify(XReal(3))) == XReal(3)
    assert decompactify(1.0) is INF


def test_compactify_strictly_increasing():
    pts = [decompactify(k / 1001) for k in range(1001)] + [INF]
    assert len(pts) == 1002
    us = [compactify(p) for p in pts]
    assert all(u < v for u, v in zip(us, us[1:]))


@given(st.floats(min_value=0.0, max_value=1e3, allow_nan=False))
def test_round_trip(x):
    back = float(decompactify(compactify(XReal(x))))
    assert abs(back - x) <= 1e-12 * x


@given(st.floats(min_value=1e3, max_value=1e12, allow_nan=False))
def test_round_trip_large_values_within_conditioning(x):
    # the spacing of doubles near u = 1 bounds the recoverable precision
    back = float(decompactify(compactify(XReal(x))))
    assert abs(back - x) <= 4 * 2.0 ** -52 * x * (1 + x)


@pytest.mark.parametrize("u", [-0.1, 1.5, math.nan])
def test_decompactify_domain(u):
    with pytest.raises(ValueError):
        decompactify(u)


def test_isclose_exact_at_boundaries():
    assert isclose(XReal(1), XReal(1 + 1e-12))
    assert not isclose(ZERO, XReal(1e-300))
    assert not isclose(INF, XReal(1e300))
    assert isclose(INF, INF)
    assert close_raw(1e6, 1e6 + 1e-4, 1e-9)
    assert leq_raw(1.0 + 1e-12, 1.0, 1e-9)
    assert not leq_raw(1e-12, 0.0, 1e-9)


def test_xr_coercion():
    x = XReal(2)
    assert xr(x) is x
    assert xr("inf") == INF
