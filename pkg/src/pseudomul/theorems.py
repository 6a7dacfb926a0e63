"""Executable consistency checks of the structural results on finiteness.

Each check evaluates one statement (finite identity criterion, the
five-way equivalence for finite elements, the shape of the finite set,
commutativity below the identity, absorption at the boundary, and the
impossibility of hitting the boundary from both sides) on sampled inputs.  A ``violated``
verdict on an operation that passed the axiom gate is either a bug here
or a genuine counterexample.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from .axioms import DEFAULT_TOL, AxiomReport, GridSpec, check_all, sample_points
from .kernel import FinitenessClass, Kernel, choose_identity, classify
from .ops import EvalError, PseudoMulOp
from .xreal import XReal, close_raw, compactify, decompactify, xr

RESULT_IDS = (
    "finite-identity",
    "finite-characterisations",
    "finite-set-shape",
    "unit-commutativity",
    "phi-absorbing",
    "phi-indecomposable",
)
DYADIC = [math.ldexp(1.0, -k) for k in range(61)]
UNIT_SUBGRID = 16
PHI_MARGIN = 1e-3


class TheoremVerdict(str, Enum):
    CONSISTENT = "consistent"
    VIOLATED = "violated"


class AxiomGateFailed(RuntimeError):
    def __init__(self, failing: List[str], report: AxiomReport):
        super().__init__(f"{report.op} fails the axiom gate: {', '.join(failing)}")
        self.failing = failing
        self.report = report


class Inapplicable(ValueError):
    """The hypothesis of a result does not hold for this operation."""


@dataclass
class TheoremEntry:
    result: str
    verdict: TheoremVerdict
    branch: str
    samples: int
    witnesses: List[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.verdict is TheoremVerdict.CONSISTENT

    def to_dict(self) -> dict:
        d = {
            "id": self.result,
            "verdict": self.verdict.value,
            "branch": self.branch,
            "samples": self.samples,
            "witnesses": self.witnesses,
        }
        if self.details:
            d["details"] = self.details
        return d


@dataclass
class TheoremReport:
    op: str
    grid: GridSpec
    identity: XReal
    classification: FinitenessClass
    entries: List[TheoremEntry]

    @property
    def consistent(self) -> bool:
        return all(e.consistent for e in self.entries)

    def __getitem__(self, result: str) -> TheoremEntry:
        for e in self.entries:
            if e.result == result:
                return e
        raise KeyError(result)

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "grid": self.grid.to_dict(),
            "identity": str(self.identity),
            "classification": self.classification.to_dict(),
            "consistent": self.consistent,
            "results": [e.to_dict() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _verdict(ok: bool) -> TheoremVerdict:
    return TheoremVerdict.CONSISTENT if ok else TheoremVerdict.VIOLATED


class _Context:
    """Per-operation state shared by the checks: identity, kernel cache, class."""

    def __init__(self, op: PseudoMulOp, grid: GridSpec, tol: float, identity: Optional[XReal] = None):
        self.op, self.grid, self.tol = op, grid, tol
        self.identity = identity if identity is not None else choose_identity(op, grid, tol)
        self.kernel = Kernel(op)
        self.points = sample_points(op, grid)
        self._cls = None

    @property
    def cls(self) -> FinitenessClass:
        if self._cls is None:
            self._cls = classify(self.op, self.identity, self.grid, self.tol, kernel=self.kernel)
        return self._cls

    @property
    def nondegenerate(self) -> bool:
        return self.kernel.is_finite(self.identity)

    def ev(self, s: float, t: float) -> float:
        v = self.op.raw(s, t)
        if v != v or v < 0:
            raise EvalError("range", repr(v))
        return v

    def positive_finite(self) -> Optional[XReal]:
        for p in self.points:
            if not p.is_zero and self.kernel.is_finite(p):
                return p
        return None


def _ctx(op, grid, tol, ctx) -> _Context:
    return ctx if ctx is not None else _Context(op, grid, tol)


def check_finite_identity(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                       ctx: _Context = None) -> TheoremEntry:
    """A positive finite element exists iff the identity is finite."""
    c = _ctx(op, grid, tol, ctx)
    e_finite = c.nondegenerate
    example = c.positive_finite()
    ok = (example is not None) == e_finite
    witnesses = [] if ok else [{
        "identity": str(c.identity),
        "identity_finite": e_finite,
        "positive_finite_example": None if example is None else str(example),
    }]
    details = {"identity_finite": e_finite,
               "positive_finite_example": None if example is None else str(example)}
    return TheoremEntry("finite-identity", _verdict(ok), "equivalence", len(c.points), witnesses, details)


def _finiteness_conditions(c: _Context, t: XReal) -> dict:
    tv, e = float(t), float(c.identity)
    ker = c.kernel
    return {
        "finite": ker.is_finite(t),
        "left-product-finite": any(ker.is_finite(XReal._raw(c.ev(s, tv))) for s in DYADIC),
        "left-product-below-identity": any(c.ev(s, tv) <= e for s in DYADIC),
        "right-product-below-identity": any(c.ev(tv, s) <= e for s in DYADIC),
        "right-product-finite": any(ker.is_finite(XReal._raw(c.ev(tv, s))) for s in DYADIC),
    }


def finiteness_conditions(op: PseudoMulOp, t, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL) -> dict:
    """The five characterisations of finiteness evaluated at a single ``t``."""
    return _finiteness_conditions(_Context(op, grid, tol), xr(t))


def check_finite_characterisations(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                   ctx: _Context = None) -> TheoremEntry:
    """The five characterisations of finite elements agree at every sample.

    Existential witnesses ``s > 0`` are searched along ``2**-k``, ``k <= 60``.
    Raises :class:`Inapplicable` for degenerate operations.
    """
    c = _ctx(op, grid, tol, ctx)
    if not c.nondegenerate:
        raise Inapplicable(f"{op.name} is degenerate")
    witnesses = []
    for t in c.points:
        conds = _finiteness_conditions(c, t)
        if len(set(conds.values())) > 1:
            witnesses.append({"t": str(t), "conditions": conds})
    return TheoremEntry("finite-characterisations", _verdict(not witnesses), "non-degenerate", len(c.points), witnesses)


def _check_finite_characterisations_degenerate(c: _Context) -> TheoremEntry:
    # hypothesis fails; the reduced check confirms no positive sample is finite
    witnesses = [{"t": str(p), "finite": True} for p in c.points
                 if not p.is_zero and c.kernel.is_finite(p)]
    return TheoremEntry("finite-characterisations", _verdict(not witnesses), "degenerate: hypothesis fails",
                        len(c.points), witnesses)


def check_finite_set_shape(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                       ctx: _Context = None) -> TheoremEntry:
    """The finite set is ``{0}``, ``[0, inf]`` or ``[0, phi)`` with ``phi`` above
    the identity and ``O(phi) = phi``."""
    c = _ctx(op, grid, tol, ctx)
    cls = c.cls
    ker = c.kernel
    witnesses = []
    if cls.kind == FinitenessClass.ONLY_ZERO:
        for p in c.points:
            if p.is_zero != ker.is_finite(p):
                witnesses.append({"t": str(p), "finite": ker.is_finite(p), "expected": p.is_zero})
    elif cls.kind == FinitenessClass.ALL:
        for p in c.points:
            if not ker.is_finite(p):
                witnesses.append({"t": str(p), "finite": False, "expected": True})
    else:
        lo, hi = cls.phi_bracket
        for p in c.points:
            if lo < p < hi:
                continue
            expected = p <= lo
            if ker.is_finite(p) != expected:
                witnesses.append({"t": str(p), "finite": not expected, "expected": expected})
        if not hi > c.identity:
            witnesses.append({"phi": str(cls.phi), "identity": str(c.identity), "expected": "phi > identity"})
        o_hi = ker.value(hi)
        if cls.phi.is_inf:
            ok = o_hi.is_inf
        else:
            phi = float(cls.phi)
            ok = abs(float(o_hi) - phi) <= tol * phi + (float(hi) - float(lo))
        if not ok:
            witnesses.append({"t": str(hi), "kernel": str(o_hi), "expected": f"O(phi) = phi ~ {cls.phi}"})
    return TheoremEntry("finite-set-shape", _verdict(not witnesses), cls.kind, len(c.points), witnesses,
                        {"class": cls.to_dict()})


def _unit_samples(c: _Context) -> List[XReal]:
    ue = compactify(c.identity)
    sub = {decompactify(ue * k / UNIT_SUBGRID) for k in range(UNIT_SUBGRID + 1)}
    return sorted(sub | {p for p in c.points if p <= c.identity} | {c.identity})


def _noncommuting_pairs(c: _Context, pts: List[XReal]) -> List[dict]:
    out = []
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            try:
                ab, ba = c.ev(float(a), float(b)), c.ev(float(b), float(a))
            except EvalError as exc:
                out.append({"s": str(a), "t": str(b), "error": exc.tag})
                continue
            if not close_raw(ab, ba, c.tol):
                out.append({"s": str(a), "t": str(b), "op(s,t)": str(XReal._raw(ab)),
                            "op(t,s)": str(XReal._raw(ba))})
    return out


def check_commutativity_on_unit(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                                ctx: _Context = None) -> TheoremEntry:
    """Commutativity on ``[0, identity]`` holds exactly when the op is non-degenerate."""
    c = _ctx(op, grid, tol, ctx)
    pts = _unit_samples(c)
    bad = _noncommuting_pairs(c, pts)
    commutative = not bad
    nondeg = c.nondegenerate
    ok = commutative == nondeg
    witnesses = []
    if not ok:
        witnesses = bad[:1] if bad else [{"note": "commutative on samples but degenerate",
                                          "identity": str(c.identity)}]
    details = {"commutative_on_unit": commutative, "non_degenerate": nondeg}
    if bad:
        details["noncommuting_pair"] = bad[0]
    return TheoremEntry("unit-commutativity", _verdict(ok), "non-degenerate" if nondeg else "degenerate",
                        len(pts) * (len(pts) - 1) // 2, witnesses, details)


def check_phi_absorbing(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                      ctx: _Context = None) -> TheoremEntry:
    """Four-way equivalence, plus ``O(phi) = phi`` and ``t*phi = phi*t = phi``
    for ``0 < t <= phi`` when the finite set is ``[0, phi)``."""
    c = _ctx(op, grid, tol, ctx)
    cls = c.cls
    nondeg = c.nondegenerate
    pos_finite = c.positive_finite() is not None
    commutative = not _noncommuting_pairs(c, _unit_samples(c))
    shape_ok = cls.kind == FinitenessClass.ALL or (
        cls.kind == FinitenessClass.UP_TO and cls.phi_bracket[1] > c.identity)
    flags = {"non-degenerate": nondeg, "positive-finite-element": pos_finite,
             "commutative-on-unit": commutative, "finite-set-shape": shape_ok}
    witnesses = []
    if len(set(flags.values())) > 1:
        witnesses.append({"equivalence": flags})
    samples = 4
    if cls.kind == FinitenessClass.UP_TO:
        lo, hi = cls.phi_bracket
        hv = float(hi)
        if cls.phi.is_inf:
            slack, target = 0.0, math.inf
        else:
            target = float(cls.phi)
            slack = tol * target + (hv - float(lo))

        def near(v: float) -> bool:
            if math.isinf(target):
                return v == math.inf
            return abs(v - target) <= slack

        o = float(c.kernel.value(hi))
        if not near(o):
            witnesses.append({"kernel_at_phi": str(XReal._raw(o)), "phi": str(cls.phi)})
        ts = [p for p in c.points if not p.is_zero and p < lo] + [hi]
        samples += 2 * len(ts)
        for t in ts:
            for s_, t_ in ((float(t), hv), (hv, float(t))):
                try:
                    v = c.ev(s_, t_)
                except EvalError as exc:
                    witnesses.append({"args": [str(XReal._raw(s_)), str(XReal._raw(t_))], "error": exc.tag})
                    continue
                if not near(v):
                    witnesses.append({"args": [str(XReal._raw(s_)), str(XReal._raw(t_))],
                                      "value": str(XReal._raw(v)), "expected": str(cls.phi)})
        branch = "up-to"
    else:
        branch = cls.kind
    return TheoremEntry("phi-absorbing", _verdict(not witnesses), branch, samples, witnesses, {"equivalence": flags})


def check_phi_indecomposable(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                        ctx: _Context = None) -> TheoremEntry:
    """No ``t < phi < t'`` with ``t * t' = phi``."""
    c = _ctx(op, grid, tol, ctx)
    cls = c.cls
    if cls.kind != FinitenessClass.UP_TO or cls.phi.is_inf:
        sup = "inf" if cls.kind != FinitenessClass.ONLY_ZERO else "0"
        return TheoremEntry("phi-indecomposable", TheoremVerdict.CONSISTENT,
                            f"vacuous: {cls.kind}, sup of finite set = {sup}", 0)
    phi = float(cls.phi)
    below = [float(p) for p in c.points if float(p) <= phi * (1 - PHI_MARGIN)]
    above = [float(p) for p in c.points if float(p) >= phi * (1 + PHI_MARGIN)]
    witnesses = []
    for t in below:
        for t2 in above:
            try:
                v = c.ev(t, t2)
            except EvalError as exc:
                witnesses.append({"t": str(XReal._raw(t)), "t'": str(XReal._raw(t2)), "error": exc.tag})
                continue
            if abs(v - phi) <= tol * phi:
                witnesses.append({"t": str(XReal._raw(t)), "t'": str(XReal._raw(t2)),
                                  "value": str(XReal._raw(v)), "phi": str(cls.phi)})
    return TheoremEntry("phi-indecomposable", _verdict(not witnesses), "up-to", len(below) * len(above), witnesses)


def run_suite(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
              axiom_report: Optional[AxiomReport] = None) -> TheoremReport:
    """Gate on the non-heuristic axioms, then run every result check."""
    report = axiom_report if axiom_report is not None else check_all(op, grid, tol)
    if not report.passed:
        raise AxiomGateFailed(report.failing, report)
    c = _Context(op, grid, tol)
    entries = [check_finite_identity(op, grid, tol, c)]
    if c.nondegenerate:
        entries.append(check_finite_characterisations(op, grid, tol, c))
    else:
        entries.append(_check_finite_characterisations_degenerate(c))
    entries += [
        check_finite_set_shape(op, grid, tol, c),
        check_commutativity_on_unit(op, grid, tol, c),
        check_phi_absorbing(op, grid, tol, c),
        check_phi_indecomposable(op, grid, tol, c),
    ]
    return TheoremReport(op.name, grid, c.identity, c.cls, entries)
