import pytest

from pseudomul import dsl
from pseudomul.axioms import GridSpec
from pseudomul.ops import builtin
from pseudomul.theorems import (
    RESULT_IDS, AxiomGateFailed, Inapplicable, TheoremVerdict, check_commutativity_on_unit,
    check_phi_indecomposable, check_finite_identity, check_finite_set_shape, check_finite_characterisations, check_phi_absorbing,
    finiteness_conditions, run_suite,
)
from pseudomul.xreal import INF, XReal


def comp(src):
    return dsl.compile(dsl.parse(src), name=src)


@pytest.mark.parametrize("name", ["times", "min", "degenerate-right", "tanh-phi:2"])
def test_finite_identity(name):
    e = check_finite_identity(builtin(name))
    assert e.verdict is TheoremVerdict.CONSISTENT
    assert e.details["identity_finite"] == (name != "degenerate-right")


def test_finite_identity_detects_broken_op():
    # not a pseudo-multiplication (0 does not annihilate t >= 1): 1 is a left
    # identity that is infinite, yet 0.5 is finite
    e = check_finite_identity(comp("if s >= 1 or t >= 1 then t else s * t"))
    assert e.verdict is TheoremVerdict.VIOLATED
    assert e.witnesses[0]["identity_finite"] is False


def test_finite_characterisations_points():
    times = builtin("times")
    assert all(finiteness_conditions(times, 7).values())
    assert not any(finiteness_conditions(times, INF).values())
    for t in [0, 0.5, 3, INF]:
        assert all(finiteness_conditions(builtin("min"), t).values())


@pytest.mark.parametrize("name", ["times", "min", "tanh-phi:2", "tanh-phi:0.5"])
def test_finite_characterisations_consistent(name):
    assert check_finite_characterisations(builtin(name)).consistent


def test_finite_characterisations_inapplicable_for_degenerate():
    with pytest.raises(Inapplicable):
        check_finite_characterisations(builtin("degenerate-right"))


def test_phi_absorbing_tanh():
    op = builtin("tanh-phi:2")
    assert op(XReal(1.5), XReal(2)) == XReal(2)
    assert op(XReal(2), XReal(2)) == XReal(2)
    e = check_phi_absorbing(op)
    assert e.consistent and e.branch == "up-to"
    assert all(e.details["equivalence"].values())


def test_phi_absorbing_branches():
    assert check_phi_absorbing(builtin("min")).branch == "all"
    deg = check_phi_absorbing(builtin("degenerate-right"))
    assert deg.consistent and deg.branch == "only-zero"
    assert not any(deg.details["equivalence"].values())
    times = check_phi_absorbing(builtin("times"))
    assert times.consistent and times.branch == "up-to"


def test_commutativity_on_unit():
    assert check_commutativity_on_unit(builtin("times")).consistent
    assert check_commutativity_on_unit(builtin("tanh-phi:1")).details["commutative_on_unit"]
    op = builtin("degenerate-right")
    e = check_commutativity_on_unit(op)
    assert e.consistent and e.branch == "degenerate"
    assert not e.details["commutative_on_unit"]
    pair = e.details["noncommuting_pair"]
    assert op(XReal(pair["s"]), XReal(pair["t"])) != op(XReal(pair["t"]), XReal(pair["s"]))
    assert op(XReal(0.5), XReal(0.25)) == XReal(0.25)
    assert op(XReal(0.25), XReal(0.5)) == XReal(0.5)


def test_phi_indecomposable():
    e = check_phi_indecomposable(builtin("tanh-phi:2"))
    assert e.consistent and e.branch == "up-to" and e.samples > 0
    assert check_phi_indecomposable(builtin("times")).branch.startswith("vacuous")
    assert check_phi_indecomposable(builtin("min")).branch.startswith("vacuous")


def test_finite_set_shape():
    for name, kind in [("times", "up-to"), ("min", "all"), ("degenerate-right", "only-zero"),
                       ("tanh-phi:2", "up-to")]:
        e = check_finite_set_shape(builtin(name))
        assert e.consistent and e.branch == kind


@pytest.mark.parametrize("name", ["times", "min", "degenerate-right", "tanh-phi:2"])
def test_run_suite_builtins(name):
    r = run_suite(builtin(name))
    assert [e.result for e in r.entries] == list(RESULT_IDS)
    assert r.consistent
    assert all(e.verdict is TheoremVerdict.CONSISTENT for e in r.entries)


def test_degenerate_branches_are_named():
    r = run_suite(builtin("degenerate-right"))
    assert r["finite-characterisations"].branch.startswith("degenerate")
    assert r.classification.degenerate


def test_gate_refuses_verbatim():
    with pytest.raises(AxiomGateFailed) as exc:
        run_suite(builtin("tanh-phi:2:verbatim"))
    assert exc.value.failing == ["annihilator"]


def test_suite_deterministic():
    op = builtin("tanh-phi:2")
    assert run_suite(op).to_json() == run_suite(op).to_json()


def test_report_json_schema():
    d = run_suite(builtin("times"), GridSpec(n_points=9, n_random=4)).to_dict()
    assert set(d) == {"op", "grid", "identity", "classification", "consistent", "results"}
    assert d["identity"] == "1.0"
    assert [r["id"] for r in d["results"]] == list(RESULT_IDS)
