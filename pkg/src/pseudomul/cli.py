"""Command line entry point: ``pseudomul {check,classify,theorems,kernel,integrate}``.

Exit codes: 0 success/consistent, 1 refutation/violation, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

from . import dsl
from .axioms import DEFAULT_TOL, GridSpec, check_all
from .integral import LEVEL_SET, integrate, load_instance
from .kernel import IdentityUnknown, InconsistentPredicate, Kernel, NonConvergence, classify
from .ops import EvalError, PseudoMulOp, builtin
from .theorems import AxiomGateFailed, run_suite
from .xreal import XReal

EXIT_OK, EXIT_REFUTED, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 42
SEED_ENV = "PSEUDOMUL_SEED"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    op_spec: str
    grid: GridSpec
    tol: float = DEFAULT_TOL
    fmt: str = "json"
    out: Optional[str] = None


def resolve_op(spec: str) -> PseudoMulOp:
    """``@path`` loads a DSL op file; anything else names a builtin."""
    if spec.startswith("@"):
        path = spec[1:]
        try:
            source = open(path, encoding="utf-8").read()
        except OSError as exc:
            raise UsageError(f"cannot read op file {path}: {exc.strerror}") from None
        try:
            return dsl.compile(dsl.parse(source), name=spec)
        except dsl.DslSyntaxError as exc:
            raise UsageError(f"{path}: {exc.render(source)}") from None
    try:
        return builtin(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _seed(arg: Optional[int]) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _config(args) -> RunConfig:
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    if args.grid_points < 1 or args.grid_random < 0:
        raise UsageError("--grid-points must be >= 1 and --grid-random >= 0")
    grid = GridSpec(args.grid_points, args.grid_random, _seed(args.seed))
    return RunConfig(args.op, grid, args.tol, args.format, args.out)


def _emit(cfg: RunConfig, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2)


def _need_json(cfg: RunConfig, command: str):
    if cfg.fmt == "csv":
        raise UsageError(f"--format csv is only available for the kernel command, not {command}")


# commands -------------------------------------------------------------------

def cmd_check(cfg: RunConfig) -> int:
    _need_json(cfg, "check")
    op = resolve_op(cfg.op_spec)
    report = check_all(op, cfg.grid, cfg.tol)
    if cfg.fmt == "human":
        lines = [f"{report.op}: {'pseudo-multiplication on samples' if report.passed else 'REFUTED'}"]
        for e in report.entries:
            tag = " (heuristic)" if e.heuristic else ""
            lines.append(f"  {e.name:<26} {e.verdict.value}{tag}  violations={e.violations}")
            for w in e.witnesses[:3]:
                lines.append(f"      ({', '.join(str(a) for a in w.args)}): {w.observed}; wanted {w.required}"
                             + (f" [{w.error}]" if w.error else ""))
        _emit(cfg, "\n".join(lines))
    else:
        _emit(cfg, report.to_json())
    return EXIT_OK if report.passed else EXIT_REFUTED


def cmd_classify(cfg: RunConfig) -> int:
    _need_json(cfg, "classify")
    op = resolve_op(cfg.op_spec)
    try:
        cls = classify(op, grid=cfg.grid, tol=cfg.tol)
    except (IdentityUnknown, NonConvergence, InconsistentPredicate, EvalError) as exc:
        payload = {"op": op.name, "error": type(exc).__name__, "message": str(exc)}
        _emit(cfg, _dump(payload) if cfg.fmt == "json" else f"{op.name}: {exc}")
        return EXIT_REFUTED
    if cfg.fmt == "human":
        if cls.kind == "up-to":
            text = f"{op.name}: finite set [0, {cls.phi})  bracket {cls.phi_bracket[0]} .. {cls.phi_bracket[1]}"
        elif cls.kind == "all":
            text = f"{op.name}: finite set [0, inf]"
        else:
            text = f"{op.name}: finite set {{0}} (degenerate)"
        _emit(cfg, text + f"  identity {cls.identity_used}")
    else:
        _emit(cfg, _dump(cls.to_dict(op.name)))
    return EXIT_OK


def cmd_theorems(cfg: RunConfig) -> int:
    _need_json(cfg, "theorems")
    op = resolve_op(cfg.op_spec)
    try:
        report = run_suite(op, cfg.grid, cfg.tol)
    except AxiomGateFailed as exc:
        payload = {"op": op.name, "gate_failed": exc.failing, "axioms": exc.report.to_dict()}
        _emit(cfg, _dump(payload) if cfg.fmt == "json" else f"{op.name}: axiom gate failed: {', '.join(exc.failing)}")
        return EXIT_REFUTED
    except (IdentityUnknown, NonConvergence, InconsistentPredicate, EvalError) as exc:
        payload = {"op": op.name, "error": type(exc).__name__, "message": str(exc)}
        _emit(cfg, _dump(payload) if cfg.fmt == "json" else f"{op.name}: {exc}")
        return EXIT_REFUTED
    if cfg.fmt == "human":
        lines = [f"{report.op}: class {report.classification.kind}, identity {report.identity}"]
        lines += [f"  {e.result:<11} {e.verdict.value:<11} [{e.branch}]" for e in report.entries]
        _emit(cfg, "\n".join(lines))
    else:
        _emit(cfg, report.to_json())
    return EXIT_OK if report.consistent else EXIT_REFUTED


def _parse_t_list(text: Optional[str], cfg: RunConfig) -> List[XReal]:
    if text is None:
        return cfg.grid.points()
    try:
        return [XReal(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"--t: {exc}") from None


def cmd_kernel(cfg: RunConfig, t_list: Optional[str] = None) -> int:
    op = resolve_op(cfg.op_spec)
    ts = _parse_t_list(t_list, cfg)
    ker = Kernel(op)
    rows, failed = [], False
    for t in ts:
        try:
            o = ker.value(t)
            rows.append({"t": str(t), "O_t": str(o), "finite": o.is_zero})
        except (NonConvergence, EvalError) as exc:
            failed = True
            rows.append({"t": str(t), "O_t": None, "error": f"{type(exc).__name__}: {exc}"})
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "O_t"])
        for r in rows:
            w.writerow([r["t"], r["O_t"] if r["O_t"] is not None else "error"])
        _emit(cfg, buf.getvalue())
    elif cfg.fmt == "human":
        _emit(cfg, "\n".join(f"O({r['t']}) = {r['O_t'] if r['O_t'] is not None else r['error']}" for r in rows))
    else:
        _emit(cfg, _dump({"op": op.name, "kernel": rows}))
    return EXIT_REFUTED if failed else EXIT_OK


def cmd_integrate(cfg: RunConfig, instance_path: Optional[str]) -> int:
    _need_json(cfg, "integrate")
    if not instance_path:
        raise UsageError("integrate needs --instance FILE")
    op = resolve_op(cfg.op_spec)
    try:
        inst = load_instance(instance_path)
    except OSError as exc:
        raise UsageError(f"cannot read instance {instance_path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed instance {instance_path}: {exc}") from None
    report = check_all(op, cfg.grid, cfg.tol)
    if not report.passed:
        payload = {"op": op.name, "gate_failed": report.failing}
        _emit(cfg, _dump(payload) if cfg.fmt == "json" else f"{op.name}: axiom gate failed: {', '.join(report.failing)}")
        return EXIT_REFUTED
    try:
        value = integrate(op, inst.f, inst.space, inst.B)
    except EvalError as exc:
        payload = {"op": op.name, "error": "EvalError", "message": str(exc)}
        _emit(cfg, _dump(payload) if cfg.fmt == "json" else f"{op.name}: {exc}")
        return EXIT_REFUTED
    if cfg.fmt == "human":
        _emit(cfg, f"{op.name}: integral = {value}")
    else:
        _emit(cfg, _dump({"op": op.name, "value": str(value), "level_set": LEVEL_SET, "B": list(inst.B)}))
    return EXIT_OK


# argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--op", required=True,
                        help="builtin name (times, min, degenerate-right, tanh-phi:<phi>[:verbatim|:patched]) "
                             "or @path/to/file.odot")
    common.add_argument("--grid-points", type=int, default=33)
    common.add_argument("--grid-random", type=int, default=32)
    common.add_argument("--seed", type=int, default=None, help=f"default ${SEED_ENV} or {DEFAULT_SEED}")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--format", choices=("json", "csv", "human"), default="json")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="pseudomul", description="Pseudo-multiplication toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="sampled axiom check")
    sub.add_parser("classify", parents=[common], help="shape of the finite set")
    sub.add_parser("theorems", parents=[common], help="run the theorem suite")
    k = sub.add_parser("kernel", parents=[common], help="kernel values O(t)")
    k.add_argument("--t", default=None, help="comma separated values, e.g. 0,1,inf (default: the grid)")
    i = sub.add_parser("integrate", parents=[common], help="idempotent integral of an instance file")
    i.add_argument("--instance", default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "theorems":
            return cmd_theorems(cfg)
        if args.command == "kernel":
            return cmd_kernel(cfg, args.t)
        return cmd_integrate(cfg, args.instance)
    except UsageError as exc:
        print(f"pseudomul: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
