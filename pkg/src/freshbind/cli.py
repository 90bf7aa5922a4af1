"""Command-line front end.

Exit codes for `run`: 0 terminated, 2 fuel exhausted, 3 stuck, 1 static
errors.  Every command accepts --seed where sampling is involved and is
deterministic given its flags; --json emits a machine-readable report with
a versioned schema.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .concrete import parse_program, parse_type, print_expr, ProgramFile
from .derived import gen_aeq, gen_swap
from .errors import AtomEscape, CalcError
from .harness import (
    SuiteReport,
    check_affine_invariance,
    check_policy_irrelevance,
    check_safety,
    check_stack_apply_correspondence,
    check_termination_equivariance,
    ciu_test,
)
from .machine import FuelExhausted, Stuck, Terminated, run, trace
from .nominal import alpha_eq
from .observations import builtin, check_affine, check_equivariance
from .surface import desugar
from .syntax import (
    Atom,
    Configuration,
    Expr,
    ID,
    State,
    atoms_of,
)
from .typecheck import (
    EMPTY_ENV,
    Signature,
    check_expr,
    is_nominal_arity,
    type_to_str,
)

DEFAULT_FUEL = 10_000
DEFAULT_TRIALS = 500
SCHEMA = 1


def _parse_atoms(text: str) -> list[Atom]:
    out = []
    for part in text.split(","):
        part = part.strip().lstrip("#")
        if part.startswith("a"):
            part = part[1:]
        if not part.isdigit():
            raise CalcError(f"bad atom {part!r}; use forms like a0 or #a0")
        out.append(Atom(int(part)))
    return out


def _load_program(path: str) -> tuple[ProgramFile, Expr]:
    text = Path(path).read_text()
    program = parse_program(text)
    return program, desugar(program.body)


def _emit(payload: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps({"schema": SCHEMA, **payload}, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _state_json(state: State) -> list[str]:
    return [str(a) for a in state]


def cmd_run(args) -> int:
    program, body = _load_program(args.path)
    sig = program.signature
    check_expr(sig, EMPTY_ENV, body)
    if args.state:
        atoms = _parse_atoms(args.state)
    else:
        atoms = sorted(atoms_of(body))
    state = State(tuple(atoms))
    missing = atoms_of(body) - atoms_of(state)
    if missing:
        names = ",".join(sorted(str(a) for a in missing))
        raise AtomEscape(f"initial state must cover the program's atoms; missing {names}")
    cfg = Configuration(state, ID, body)
    if args.trace:
        for n, c in enumerate(trace(sig, cfg, args.fuel)):
            print(
                f"{n} | state={c.state} | stack_depth={len(c.stack)} "
                f"| expr={print_expr(c.expr)}"
            )
    outcome = run(sig, cfg, args.fuel)
    match outcome:
        case Terminated(steps, final_state, value):
            _emit(
                {
                    "outcome": "terminated",
                    "steps": steps,
                    "value": print_expr(value),
                    "state": _state_json(final_state),
                },
                args.json,
                [f"TERMINATED {steps} {print_expr(value)}"],
            )
            return 0
        case FuelExhausted(steps_run, _):
            _emit(
                {"outcome": "fuel", "steps": steps_run},
                args.json,
                [f"FUEL {steps_run}"],
            )
            return 2
        case Stuck(reason, _):
            _emit({"outcome": "stuck", "reason": reason}, args.json, [f"STUCK {reason}"])
            return 3
    return 1


def cmd_check(args) -> int:
    program, body = _load_program(args.path)
    sig = program.signature
    ty = check_expr(sig, EMPTY_ENV, body)
    nominal = is_nominal_arity(sig, ty)
    _emit(
        {"type": type_to_str(ty), "nominal": nominal},
        args.json,
        [type_to_str(ty), f"nominal: {'yes' if nominal else 'no'}"],
    )
    return 0


def cmd_alpha(args) -> int:
    program1, v1 = _load_program(args.path1)
    _, v2 = _load_program(args.path2)
    sig = program1.signature
    arity = parse_type(args.arity)
    if args.world:
        w = frozenset(_parse_atoms(args.world))
    else:
        w = atoms_of(v1) | atoms_of(v2)
    equal = alpha_eq(sig, w, v1, v2, arity)
    _emit(
        {"alpha_eq": equal, "arity": type_to_str(arity)},
        args.json,
        ["ALPHA-EQ" if equal else "NOT-ALPHA-EQ"],
    )
    return 0


def cmd_fuzz_equiv(args) -> int:
    program1, e1 = _load_program(args.path1)
    _, e2 = _load_program(args.path2)
    sig = program1.signature
    ty = parse_type(args.type)
    if args.world:
        w = frozenset(_parse_atoms(args.world))
    else:
        w = atoms_of(e1) | atoms_of(e2)
    records = [] if args.report_dir else None
    result = ciu_test(
        sig, w, e1, e2, ty, args.trials, args.fuel, seed=args.seed, record=records
    )
    payload = {
        "verdict": result.verdict,
        "trials": result.trials_run,
        "inconclusive": result.inconclusive,
        "fuel": result.fuel,
        "seed": result.seed,
    }
    lines = [
        f"VERDICT {result.verdict} trials={result.trials_run} "
        f"inconclusive={result.inconclusive}"
    ]
    if result.counterexample is not None:
        cex = result.counterexample
        payload["counterexample"] = {
            "trial": cex.trial,
            "state": _state_json(cex.state),
            "stack_depth": len(cex.stack),
            "left": type(cex.outcome_left).__name__,
            "right": type(cex.outcome_right).__name__,
        }
        lines.append(
            f"COUNTEREXAMPLE trial={cex.trial} state={cex.state} "
            f"stack_depth={len(cex.stack)}"
        )
    else:
        payload["counterexample"] = None
    if args.report_dir:
        from .report import write_equiv_report

        for path in write_equiv_report(result, records, args.report_dir):
            lines.append(f"WROTE {path}")
    _emit(payload, args.json, lines)
    return 0


def _safety_suites(sig: Signature, trials: int, steps: int, fuel: int, seed) -> list[SuiteReport]:
    return [
        check_safety(sig, trials, steps, seed),
        check_termination_equivariance(sig, max(1, trials // 2), fuel, seed),
        check_policy_irrelevance(sig, max(1, trials // 2), fuel, seed),
        check_stack_apply_correspondence(sig, max(1, trials // 2), fuel, seed),
    ]


def cmd_fuzz_safety(args) -> int:
    from .nominal import lambda_signature

    sig = lambda_signature()
    reports = _safety_suites(sig, args.trials, args.steps, args.fuel, args.seed)
    ok = all(r.ok for r in reports)
    lines = []
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{status} {r.name} {r.passed}/{r.total}")
    payload = {
        "suites": {
            r.name: {"passed": r.passed, "total": r.total, "failures": len(r.failures)}
            for r in reports
        },
        "ok": ok,
    }
    if args.report_dir:
        from .report import write_safety_report

        for path in write_safety_report(reports, args.report_dir):
            lines.append(f"WROTE {path}")
    _emit(payload, args.json, lines)
    return 0 if ok else 1


def cmd_obs_check(args) -> int:
    obs = builtin(args.name)
    equivariance = check_equivariance(obs, args.trials, args.seed)
    prepend = check_affine(obs, args.trials, args.seed)
    # affine means equivariant and insensitive to prepending a fresh atom
    affine = equivariance.passed and prepend.passed
    lines = []
    if equivariance.passed:
        lines.append(f"equivariance PASS ({equivariance.trials_run} trials)")
    else:
        s, pi, obs_args = equivariance.counterexample
        lines.append(
            f"equivariance FAIL witness: state={s} {pi} args="
            + ",".join(str(a) for a in obs_args)
        )
    if affine:
        lines.append(f"affine PASS ({prepend.trials_run} trials)")
    elif not prepend.passed:
        s, fresh, obs_args = prepend.counterexample
        lines.append(
            f"affine FAIL witness: state={s} prepended={fresh} args="
            + ",".join(str(a) for a in obs_args)
        )
    else:
        lines.append("affine FAIL (not equivariant)")
    consistent = (
        equivariance.passed == obs.declared_equivariant
        and affine == obs.declared_affine
    )
    payload = {
        "observation": obs.name,
        "equivariant": equivariance.passed,
        "prepend_invariant": prepend.passed,
        "affine": affine,
        "declared_equivariant": obs.declared_equivariant,
        "declared_affine": obs.declared_affine,
        "consistent": consistent,
    }
    _emit(payload, args.json, lines)
    return 0 if consistent else 1


def _sig_for_emit(args) -> Signature:
    if args.sig:
        program = parse_program(Path(args.sig).read_text() + "\n()")
        return program.signature
    from .nominal import lambda_signature

    return lambda_signature()


def cmd_emit_swap(args) -> int:
    sig = _sig_for_emit(args)
    text = print_expr(gen_swap(sig, parse_type(args.type)))
    _emit({"kind": "swap", "type": args.type, "program": text}, args.json, [text])
    return 0


def cmd_emit_aeq(args) -> int:
    sig = _sig_for_emit(args)
    text = print_expr(gen_aeq(sig, parse_type(args.type)))
    _emit({"kind": "aeq", "type": args.type, "program": text}, args.json, [text])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freshbind",
        description="Interpreter and equivalence-testing harness for a "
        "calculus with generative name unbinding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seed=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if seed:
            p.add_argument("--seed", default="0", help="sampling seed")

    p = sub.add_parser("run", help="evaluate a program file")
    p.add_argument("path")
    p.add_argument("--state", help="initial state atoms, e.g. a0,a1")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--trace", action="store_true", help="print each configuration")
    add_common(p, seed=False)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("check", help="type check a program file")
    p.add_argument("path")
    add_common(p, seed=False)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("alpha", help="decide alpha-equivalence of two value files")
    p.add_argument("path1")
    p.add_argument("path2")
    p.add_argument("--arity", required=True, help="nominal arity, e.g. 'atm bnd'")
    p.add_argument("--world", help="world atoms, e.g. a0,a1")
    add_common(p)
    p.set_defaults(fn=cmd_alpha)

    p = sub.add_parser("fuzz-equiv", help="search for a distinguishing context")
    p.add_argument("path1")
    p.add_argument("path2")
    p.add_argument("--type", required=True, help="common type of both expressions")
    p.add_argument("--world", help="world atoms, e.g. a0,a1")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--report-dir", help="write CSV and figures here")
    add_common(p)
    p.set_defaults(fn=cmd_fuzz_equiv)

    p = sub.add_parser("fuzz-safety", help="machine metatheory suites")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--steps", type=int, default=200, help="steps checked per sample")
    p.add_argument("--fuel", type=int, default=500)
    p.add_argument("--report-dir", help="write CSV and figures here")
    add_common(p)
    p.set_defaults(fn=cmd_fuzz_safety)

    p = sub.add_parser("obs-check", help="vet an observation's declared flags")
    p.add_argument("name")
    p.add_argument("--trials", type=int, default=1000)
    add_common(p)
    p.set_defaults(fn=cmd_obs_check)

    p = sub.add_parser("emit-swap", help="print the swap program for a type")
    p.add_argument("type")
    p.add_argument("--sig", help="file whose signature block to use")
    add_common(p)
    p.set_defaults(fn=cmd_emit_swap)

    p = sub.add_parser("emit-aeq", help="print the alpha tester for a nominal arity")
    p.add_argument("type")
    p.add_argument("--sig", help="file whose signature block to use")
    add_common(p)
    p.set_defaults(fn=cmd_emit_aeq)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CalcError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
