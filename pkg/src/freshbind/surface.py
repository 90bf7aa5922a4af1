"""Surface expression forms and their desugaring into reduced form.

The surface grammar allows compound subexpressions everywhere (pairs of
expressions, application of expressions, if/then/else, generative let over
a binding, ...).  Desugaring sequences compound parts through generated
``let`` bindings in left-to-right evaluation order; subexpressions that are
already values are used in place, so reduced-form input desugars to itself.
Generated variables live in the reserved ``%n`` namespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import UnknownFormError
from .syntax import (
    Arm,
    Atom,
    AtomLit,
    Bind,
    Con,
    Expr,
    Fresh,
    Fst,
    Fun,
    Let,
    Match,
    ObsApp,
    Pair,
    Snd,
    App,
    Unbind,
    Unit,
    Value,
    Var,
)


class SurfaceExpr:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class SVar(SurfaceExpr):
    name: str


@dataclass(frozen=True, slots=True)
class SUnit(SurfaceExpr):
    pass


@dataclass(frozen=True, slots=True)
class SAtom(SurfaceExpr):
    atom: Atom


@dataclass(frozen=True, slots=True)
class SPair(SurfaceExpr):
    first: SurfaceExpr
    second: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SFun(SurfaceExpr):
    fname: str
    param: str
    body: SurfaceExpr
    param_type: "object | None" = None
    result_type: "object | None" = None


@dataclass(frozen=True, slots=True)
class SLam(SurfaceExpr):
    """λparam. body, an anonymous non-recursive function."""

    param: str
    body: SurfaceExpr
    param_type: "object | None" = None


@dataclass(frozen=True, slots=True)
class SCon(SurfaceExpr):
    con: str
    arg: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SBind(SurfaceExpr):
    name_part: SurfaceExpr
    body_part: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SLet(SurfaceExpr):
    var: str
    bound: SurfaceExpr
    body: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SLetBind(SurfaceExpr):
    """let <name_var> body_var = bound in body: generative unbinding sugar."""

    name_var: str
    body_var: str
    bound: SurfaceExpr
    body: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SFst(SurfaceExpr):
    arg: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SSnd(SurfaceExpr):
    arg: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SApp(SurfaceExpr):
    fn: SurfaceExpr
    arg: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SArm:
    con: str
    var: Optional[str]
    body: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SMatch(SurfaceExpr):
    scrutinee: SurfaceExpr
    arms: tuple[SArm, ...]


@dataclass(frozen=True, slots=True)
class SIf(SurfaceExpr):
    """if cond then a else b over nat: 0 selects the then branch."""

    cond: SurfaceExpr
    then: SurfaceExpr
    els: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SFresh(SurfaceExpr):
    pass


@dataclass(frozen=True, slots=True)
class SFreshIn(SurfaceExpr):
    var: str
    body: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SUnbind(SurfaceExpr):
    arg: SurfaceExpr


@dataclass(frozen=True, slots=True)
class SObs(SurfaceExpr):
    obs: str
    args: tuple[SurfaceExpr, ...]


@dataclass(frozen=True, slots=True)
class SEmbed(SurfaceExpr):
    """An already-reduced expression spliced into a surface tree."""

    expr: Expr


_GEN_NAME = re.compile(r"%(\d+)$")


def _scan_gen_names(s: SurfaceExpr) -> int:
    """Largest %n index used anywhere in the input, so generated names are fresh."""
    best = -1
    todo: list[object] = [s]
    while todo:
        x = todo.pop()
        if isinstance(x, str):
            m = _GEN_NAME.match(x)
            if m:
                best = max(best, int(m.group(1)))
            continue
        if isinstance(x, (SurfaceExpr, SArm, Expr, Arm)):
            for slot in x.__slots__:
                v = getattr(x, slot)
                if isinstance(v, (str, SurfaceExpr, SArm, Expr, Arm, tuple)):
                    todo.append(v)
        elif isinstance(x, tuple):
            todo.extend(x)
    return best


class _Desugar:
    def __init__(self, start: int):
        self._next = start

    def fresh(self) -> str:
        name = f"%{self._next}"
        self._next += 1
        return name

    def seq(
        self, parts: list[SurfaceExpr], build: Callable[[list[Value]], Expr]
    ) -> Expr:
        """Evaluate parts left to right, let-binding any non-value."""
        values: list[Value] = []

        def go(i: int) -> Expr:
            if i == len(parts):
                return build(values)
            e = self.expr(parts[i])
            if isinstance(e, Value):
                values.append(e)
                return go(i + 1)
            x = self.fresh()
            values.append(Var(x))
            return Let(x, e, go(i + 1))

        return go(0)

    def expr(self, s: SurfaceExpr) -> Expr:
        match s:
            case SVar(x):
                return Var(x)
            case SUnit():
                return Unit()
            case SAtom(a):
                return AtomLit(a)
            case SFresh():
                return Fresh()
            case SEmbed(e):
                return e
            case SPair(a, b):
                return self.seq([a, b], lambda vs: Pair(vs[0], vs[1]))
            case SFun(f, x, body, pty, rty):
                return Fun(f, x, self.expr(body), pty, rty)
            case SLam(x, body, pty):
                return Fun(self.fresh(), x, self.expr(body), pty, None)
            case SCon(c, arg):
                return self.seq([arg], lambda vs: Con(c, vs[0]))
            case SBind(a, b):
                return self.seq([a, b], lambda vs: Bind(vs[0], vs[1]))
            case SLet(x, bound, body):
                return Let(x, self.expr(bound), self.expr(body))
            case SLetBind(x1, x2, bound, body):
                pair = self.fresh()
                return self.seq(
                    [bound],
                    lambda vs: Let(
                        pair,
                        Unbind(vs[0]),
                        Let(
                            x1,
                            Fst(Var(pair)),
                            Let(x2, Snd(Var(pair)), self.expr(body)),
                        ),
                    ),
                )
            case SFst(arg):
                return self.seq([arg], lambda vs: Fst(vs[0]))
            case SSnd(arg):
                return self.seq([arg], lambda vs: Snd(vs[0]))
            case SUnbind(arg):
                return self.seq([arg], lambda vs: Unbind(vs[0]))
            case SApp(fn, arg):
                return self.seq([fn, arg], lambda vs: App(vs[0], vs[1]))
            case SMatch(scrut, arms):
                return self.seq(
                    [scrut],
                    lambda vs: Match(
                        vs[0],
                        tuple(
                            Arm(a.con, a.var if a.var is not None else self.fresh(),
                                self.expr(a.body))
                            for a in arms
                        ),
                    ),
                )
            case SIf(cond, then, els):
                return self.seq(
                    [cond],
                    lambda vs: Match(
                        vs[0],
                        (
                            Arm("Zero", self.fresh(), self.expr(then)),
                            Arm("Succ", self.fresh(), self.expr(els)),
                        ),
                    ),
                )
            case SFreshIn(x, body):
                return Let(x, Fresh(), self.expr(body))
            case SObs(name, args):
                return self.seq(list(args), lambda vs: ObsApp(name, tuple(vs)))
            case _:
                raise UnknownFormError(
                    f"not a surface expression: {type(s).__name__}"
                )


def desugar(s: SurfaceExpr) -> Expr:
    """Translate a surface expression into reduced form."""
    return _Desugar(_scan_gen_names(s) + 1).expr(s)
