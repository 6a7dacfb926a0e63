"""Sampled verification of the pseudo-multiplication axioms.

Every check sweeps a finite sample of [0, inf] and either passes on
those samples or refutes with replayable witnesses.  Nothing here is a
proof.  Continuity is probed heuristically and flagged as such.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .ops import EvalError, PseudoMulOp
from .xreal import XReal, close_raw, compactify, decompactify, leq_raw

DEFAULT_TOL = 1e-9
MAX_TRIPLES = 50_000
MAX_WITNESSES = 64


class Verdict(str, Enum):
    PASSED = "passed-on-samples"
    REFUTED = "refuted"


@dataclass(frozen=True)
class GridSpec:
    """Sample layout: 0, inf, ``n_points`` compactified-uniform points and
    ``n_random`` seeded random points."""

    n_points: int = 33
    n_random: int = 32
    seed: int = 42

    def __post_init__(self):
        if self.n_points < 1 or self.n_random < 0:
            raise ValueError("n_points must be positive and n_random nonnegative")

    def points(self) -> List[XReal]:
        us = {0.0, 1.0}
        us.update(k / (self.n_points + 1) for k in range(1, self.n_points + 1))
        rng = random.Random(self.seed)
        us.update(rng.random() for _ in range(self.n_random))
        return [decompactify(u) for u in sorted(us)]

    def to_dict(self) -> dict:
        return {"n_points": self.n_points, "n_random": self.n_random, "seed": self.seed}


def sample_points(op: PseudoMulOp, grid: GridSpec) -> List[XReal]:
    """Grid points plus the operation's landmarks, sorted and deduplicated."""
    return sorted(set(grid.points()) | set(op.landmarks))


@dataclass(frozen=True)
class Witness:
    kind: str
    args: Tuple[XReal, ...]
    observed: str
    required: str
    error: Optional[str] = None

    def sort_key(self):
        return (tuple(float(a) for a in self.args), self.kind)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "args": [str(a) for a in self.args],
            "observed": self.observed,
            "required": self.required,
        }
        if self.error is not None:
            d["error"] = self.error
        return d


@dataclass
class AxiomEntry:
    name: str
    verdict: Verdict
    heuristic: bool
    tolerance: float
    samples: int
    witnesses: List[Witness] = field(default_factory=list)
    violations: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASSED

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "verdict": self.verdict.value,
            "heuristic": self.heuristic,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "violations": self.violations,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }
        if self.details:
            d["details"] = self.details
        return d


@dataclass
class AxiomReport:
    op: str
    grid: GridSpec
    entries: List[AxiomEntry]

    def __getitem__(self, name: str) -> AxiomEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        """All non-heuristic axioms passed on samples (the axiom gate)."""
        return all(e.passed for e in self.entries if not e.heuristic)

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failing(self) -> List[str]:
        return [e.name for e in self.entries if not e.passed and not e.heuristic]

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "grid": self.grid.to_dict(),
            "passed": self.passed,
            "axioms": [e.to_dict() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# helpers --------------------------------------------------------------------

def _x(v: float) -> XReal:
    return XReal._raw(v)


def _fmt(v: float) -> str:
    return str(_x(v)) if v == v and v >= 0 else repr(v)


def _eval(op: PseudoMulOp, s: float, t: float):
    """Value or the EvalError raised at (s, t)."""
    try:
        v = op.raw(s, t)
    except EvalError as exc:
        return exc
    if v != v or v < 0:
        return EvalError("range", repr(v))
    return v


def _assoc_sides(op, s: float, t: float, u: float):
    """Both bracketings of ``s*t*u``, or the first EvalError met."""
    st, tu = _eval(op, s, t), _eval(op, t, u)
    for r in (st, tu):
        if isinstance(r, EvalError):
            return r
    lhs, rhs = _eval(op, st, u), _eval(op, s, tu)
    for r in (lhs, rhs):
        if isinstance(r, EvalError):
            return r
    return lhs, rhs


def _table(op: PseudoMulOp, pts: Sequence[float]) -> np.ndarray:
    p = np.asarray(pts, float)
    return op.apply_array(p[:, None], p[None, :])


def _error_witnesses(op, pts, table, kind="eval-error") -> List[Witness]:
    out = []
    for i, j in zip(*np.nonzero(np.isnan(table))):
        r = _eval(op, pts[i], pts[j])
        tag = r.tag if isinstance(r, EvalError) else "nan"
        out.append(Witness(kind, (_x(pts[i]), _x(pts[j])), "error", "value in [0, inf]", tag))
    return out


def _entry(name, witnesses, samples, tol, heuristic=False, max_witnesses=MAX_WITNESSES, details=None):
    witnesses = sorted(witnesses, key=Witness.sort_key)
    return AxiomEntry(
        name=name,
        verdict=Verdict.REFUTED if witnesses else Verdict.PASSED,
        heuristic=heuristic,
        tolerance=tol,
        samples=samples,
        witnesses=witnesses[:max_witnesses],
        violations=len(witnesses),
        details=details or {},
    )


def _compact_arr(v: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(v), 1.0, v / (1.0 + v))


# checks ---------------------------------------------------------------------

def check_associativity(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                        max_triples: int = MAX_TRIPLES) -> AxiomEntry:
    """``(s*t)*u == s*(t*u)`` on sampled triples, exact at 0 and inf."""
    pts = [float(p) for p in sample_points(op, grid)]
    n = len(pts)
    table = _table(op, pts)
    total = n ** 3
    if total <= max_triples:
        idx = range(total)
    else:
        idx = sorted(random.Random(grid.seed).sample(range(total), max_triples))
    raw = op.raw
    witnesses = []
    for flat in idx:
        i, rem = divmod(flat, n * n)
        j, k = divmod(rem, n)
        st, tu = table[i, j], table[j, k]
        s, u = pts[i], pts[k]
        if st == st and tu == tu:
            try:
                if close_raw(raw(st, u), raw(s, tu), tol):
                    continue
            except EvalError:
                pass
        args = (_x(s), _x(pts[j]), _x(u))
        sides = _assoc_sides(op, s, pts[j], u)
        if isinstance(sides, EvalError):
            witnesses.append(Witness("eval-error", args, "error", "(s*t)*u == s*(t*u)", sides.tag))
        else:
            lhs, rhs = sides
            witnesses.append(Witness("associativity", args, f"(s*t)*u = {_fmt(lhs)}",
                                     f"s*(t*u) = {_fmt(rhs)}"))
    return _entry("associativity", witnesses, len(idx), tol)


def _leq_arr(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        scale = np.maximum(1.0, np.maximum(a, b))
        excess = (b != 0) & (a != np.inf) & (a - b <= tol * scale)
    return (a <= b) | excess


def check_monotonicity(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL) -> AxiomEntry:
    """Nondecreasing in each argument over all sampled pairs ``s <= s'``."""
    pts = [float(p) for p in sample_points(op, grid)]
    n = len(pts)
    table = _table(op, pts)
    witnesses = _error_witnesses(op, pts, table)
    upper = np.triu(np.ones((n, n), bool), k=1)  # i < i'
    for side in ("left", "right"):
        m = table if side == "left" else table.T  # m[i, j] = op(p_i, p_j) / op(p_j, p_i)
        for j in range(n):
            col = m[:, j]
            a, b = np.meshgrid(col, col, indexing="ij")
            bad = upper & ~_leq_arr(a, b, tol) & ~np.isnan(a) & ~np.isnan(b)
            for i, i2 in zip(*np.nonzero(bad)):
                s, s2, t = _x(pts[i]), _x(pts[i2]), _x(pts[j])
                if side == "left":
                    obs = f"op(s,t) = {_fmt(col[i])} > op(s',t) = {_fmt(col[i2])}"
                else:
                    obs = f"op(t,s) = {_fmt(col[i])} > op(t,s') = {_fmt(col[i2])}"
                witnesses.append(Witness(f"monotonicity-{side}", (s, s2, t), obs, "nondecreasing"))
    return _entry("monotonicity", witnesses, 2 * n * n * (n - 1) // 2, tol)


def _identity_ok(op, e: float, ts: Sequence[float], tol: float) -> bool:
    for t in ts:
        v = _eval(op, e, t)
        if isinstance(v, EvalError) or not close_raw(v, t, tol):
            return False
    return True


def _identity_gap(op, e: float, ts: Sequence[float]) -> float:
    # worst deviation of op(e, .) from the identity in compactified units
    worst = 0.0
    for t in ts:
        v = _eval(op, e, t)
        if isinstance(v, EvalError):
            return 2.0
        worst = max(worst, abs(compactify(_x(v)) - compactify(_x(t))))
    return worst


_INV_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo: float, hi: float, iters: int = 100) -> float:
    # golden-section search; tolerates the kink of a max-of-abs objective
    a, b = lo, hi
    c, d = b - _INV_GOLD * (b - a), a + _INV_GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a <= 1e-17:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLD * (b - a)
            fd = f(d)
    return c if fc <= fd else d


def find_left_identities(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
                         max_refine: int = 4) -> Tuple[XReal, ...]:
    """All sampled ``e`` with ``op(e, t) == t`` for every sampled ``t``.

    Besides sample points, up to ``max_refine`` local minima of the
    identity gap are polished by golden-section search, so an
    identity that is not itself a sample point is still found.
    """
    cands = sample_points(op, grid)
    if op.declared_identity is not None and op.declared_identity not in cands:
        cands = sorted(set(cands) | {op.declared_identity})
    ts = [float(p) for p in sample_points(op, grid)]
    us = [compactify(c) for c in cands]
    found = [c for c in cands if _identity_ok(op, float(c), ts, tol)]
    if found:
        return tuple(found)
    gaps = [_identity_gap(op, float(c), ts) for c in cands]
    n = len(cands)
    minima = [
        i for i in range(n)
        if (i == 0 or gaps[i] <= gaps[i - 1]) and (i == n - 1 or gaps[i] <= gaps[i + 1]) and gaps[i] < 2.0
    ]
    minima.sort(key=lambda i: (gaps[i], i))
    for i in minima[:max_refine]:
        lo, hi = us[max(i - 1, 0)], us[min(i + 1, n - 1)]
        if hi <= lo:
            continue
        u = _golden_min(lambda u: _identity_gap(op, float(decompactify(u)), ts), lo, hi)
        e = decompactify(u)
        if _identity_ok(op, float(e), ts, tol):
            found.append(e)
    return tuple(sorted(set(found)))


def check_identity(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL) -> AxiomEntry:
    """Existence of a left identity; the declared one must be among them."""
    ids = find_left_identities(op, grid, tol)
    ts = [float(p) for p in sample_points(op, grid)]
    witnesses = []

    def worst_witness(e: XReal, kind: str):
        worst, wt = -1.0, None
        for t in ts:
            v = _eval(op, float(e), t)
            if isinstance(v, EvalError):
                return Witness(kind, (e, _x(t)), "error", f"op(e,t) = {_x(t)}", v.tag)
            if not close_raw(v, t, tol):
                gap = abs(compactify(_x(v)) - compactify(_x(t)))
                if gap > worst:
                    worst, wt = gap, (t, v)
        if wt is None:
            return None
        return Witness(kind, (e, _x(wt[0])), f"op(e,t) = {_fmt(wt[1])}", f"op(e,t) = {_fmt(wt[0])}")

    if not ids:
        cands = sample_points(op, grid)
        best = min(cands, key=lambda c: (_identity_gap(op, float(c), ts), float(c)))
        w = worst_witness(best, "no-identity")
        if w is not None:
            witnesses.append(w)
    declared = op.declared_identity
    if declared is not None and declared not in ids:
        w = worst_witness(declared, "declared-identity")
        if w is not None:
            witnesses.append(w)
    details = {"identities": [str(e) for e in ids]}
    if declared is not None:
        details["declared"] = str(declared)
    return _entry("identity", witnesses, len(ts) * len(sample_points(op, grid)), tol, details=details)


def check_zero_divisors(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL) -> AxiomEntry:
    """No ``s, t > 0`` with ``op(s, t) == 0`` (exact zero)."""
    pts = [float(p) for p in sample_points(op, grid)]
    table = _table(op, pts)
    witnesses = _error_witnesses(op, pts, table)
    p = np.asarray(pts)
    bad = (p[:, None] > 0) & (p[None, :] > 0) & (table == 0)
    for i, j in zip(*np.nonzero(bad)):
        witnesses.append(Witness("zero-divisor", (_x(pts[i]), _x(pts[j])), "op(s,t) = 0.0", "op(s,t) > 0"))
    return _entry("zero-divisors", witnesses, len(pts) ** 2, tol)


def check_annihilator(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL) -> AxiomEntry:
    """``op(0, t) == op(t, 0) == 0`` exactly."""
    pts = [float(p) for p in sample_points(op, grid)]
    witnesses = []
    for t in pts:
        for s_, t_ in ((0.0, t), (t, 0.0)):
            v = _eval(op, s_, t_)
            args = (_x(s_), _x(t_))
            if isinstance(v, EvalError):
                witnesses.append(Witness("eval-error", args, "error", "op = 0.0", v.tag))
            elif v != 0.0:
                witnesses.append(Witness("annihilator", args, f"op = {_fmt(v)}", "op = 0.0"))
    return _entry("annihilator", sorted(set(witnesses), key=Witness.sort_key), 2 * len(pts), tol)


REGIONS = ("joint", "first-argument")
_R0 = 1e-2


def _probe_offsets(region: str) -> List[Tuple[int, int]]:
    if region == "joint":
        return [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]
    return [(a, 0) for a in (-1, 0, 1)]


def _probe(op, centers: Sequence[Tuple[float, float]], region: str, levels: int) -> np.ndarray:
    """Oscillation of compactified outputs per center and level; NaN on errors."""
    offs = np.array(_probe_offsets(region), float)
    c = np.array([(compactify(_x(s)), compactify(_x(t))) for s, t in centers], float).reshape(-1, 2)
    us = c[:, 0]
    base = np.minimum(_R0, us / 2)
    if region == "joint":
        base = np.minimum(base, (1.0 - us) / 2)
    radii = base[:, None] * (10.0 ** -np.arange(levels))[None, :]  # (m, L)
    su = np.clip(us[:, None, None] + radii[:, :, None] * offs[None, None, :, 0], 0.0, 1.0)
    tu = np.clip(c[:, 1][:, None, None] + radii[:, :, None] * offs[None, None, :, 1], 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(su >= 1.0, np.inf, su / (1.0 - su))
        t = np.where(tu >= 1.0, np.inf, tu / (1.0 - tu))
    out = _compact_arr(op.apply_array(s, t))
    return out.max(axis=2) - out.min(axis=2)


def _suspect(osc_row: np.ndarray, tol: float) -> bool:
    last, prev = osc_row[-1], osc_row[-2]
    return bool(last > tol and last > 0.5 * prev)


def _continuity_centers(op, grid: GridSpec, region: str) -> List[Tuple[float, float]]:
    pts = [float(p) for p in grid.points()]
    if region == "joint":
        ss = [p for p in pts if 0.0 < p < math.inf]
    else:
        ss = [p for p in pts if p > 0.0]
    return [(s, t) for s in ss for t in pts]


def probe_continuity(op: PseudoMulOp, grid: GridSpec = GridSpec(), refinement_levels: int = 3,
                     tol: float = DEFAULT_TOL, region: str = "joint") -> AxiomEntry:
    """Heuristic continuity probe around grid points.

    ``region='joint'`` covers ``(0, inf) x [0, inf]``; ``'first-argument'``
    covers ``s -> op(s, t)`` on ``(0, inf]``.  Neighbourhoods in
    compactified coordinates shrink tenfold per level; a center whose
    output oscillation fails to halve between the last two levels (and
    exceeds ``tol``) is reported as a suspected discontinuity.
    """
    if refinement_levels < 2:
        raise ValueError("refinement_levels must be >= 2")
    if region not in REGIONS:
        raise ValueError(f"unknown region {region!r}")
    centers = _continuity_centers(op, grid, region)
    osc = _probe(op, centers, region, refinement_levels)
    witnesses = []
    for (s, t), row in zip(centers, osc):
        if np.isnan(row).any():
            r = _eval(op, s, t)
            tag = r.tag if isinstance(r, EvalError) else "error-in-neighbourhood"
            witnesses.append(Witness("eval-error", (_x(s), _x(t)), "error", "defined near (s,t)", tag))
        elif _suspect(row, tol):
            witnesses.append(Witness(
                f"suspected-discontinuity-{region}", (_x(s), _x(t)),
                "oscillation " + " -> ".join(f"{o:.3g}" for o in row),
                "oscillation shrinking with the neighbourhood",
            ))
    name = "continuity-joint" if region == "joint" else "continuity-first-argument"
    return _entry(name, witnesses, len(centers) * refinement_levels, tol, heuristic=True,
                  details={"refinement_levels": refinement_levels, "region": region})


def check_all(op: PseudoMulOp, grid: GridSpec = GridSpec(), tol: float = DEFAULT_TOL,
              refinement_levels: int = 3) -> AxiomReport:
    entries = [
        check_associativity(op, grid, tol),
        probe_continuity(op, grid, refinement_levels, tol, region="joint"),
        probe_continuity(op, grid, refinement_levels, tol, region="first-argument"),
        check_monotonicity(op, grid, tol),
        check_identity(op, grid, tol),
        check_zero_divisors(op, grid, tol),
        check_annihilator(op, grid, tol),
    ]
    return AxiomReport(op=op.name, grid=grid, entries=entries)


def replay_witness(op: PseudoMulOp, witness: Witness, tol: float = DEFAULT_TOL,
                   refinement_levels: int = 3) -> bool:
    """Re-evaluate one witness in isolation; True if it still shows a violation."""
    a = [float(x) for x in witness.args]
    kind = witness.kind
    if kind == "eval-error":
        if len(a) == 3:
            return isinstance(_assoc_sides(op, *a), EvalError)
        if isinstance(_eval(op, a[0], a[1]), EvalError):
            return True
        return any(np.isnan(_probe(op, [(a[0], a[1])], region, refinement_levels)).any()
                   for region in REGIONS)
    if kind == "associativity":
        sides = _assoc_sides(op, *a)
        return isinstance(sides, EvalError) or not close_raw(sides[0], sides[1], tol)
    if kind.startswith("monotonicity-"):
        s, s2, t = a
        if kind.endswith("left"):
            return not leq_raw(op.raw(s, t), op.raw(s2, t), tol)
        return not leq_raw(op.raw(t, s), op.raw(t, s2), tol)
    if kind in ("no-identity", "declared-identity"):
        e, t = a
        return not close_raw(op.raw(e, t), t, tol)
    if kind == "zero-divisor":
        return a[0] > 0 and a[1] > 0 and op.raw(a[0], a[1]) == 0.0
    if kind == "annihilator":
        return 0.0 in a and op.raw(a[0], a[1]) != 0.0
    if kind.startswith("suspected-discontinuity-"):
        region = kind[len("suspected-discontinuity-"):]
        osc = _probe(op, [(a[0], a[1])], region, refinement_levels)[0]
        return _suspect(osc, tol)
    raise ValueError(f"unknown witness kind {kind!r}")
