"""Type-directed program generation inside the calculus.

Rather than adding swapping or alpha-testing as primitives, both are
programmable: `gen_swap` emits a closed swap function atm -> atm -> t -> t
for any type (conjugation at function types, generative unbinding at
binding types, a recursive function per data type), and `gen_aeq` emits a
closed decider ar -> ar -> nat for any nominal arity that returns Zero() on
alpha-equivalent arguments and Succ(Zero()) otherwise.  Mutually recursive
data types are handled by nesting: a function needed but not in scope is
defined locally with itself bound by its own fun binder.
"""

from __future__ import annotations

import functools

from .errors import NotNominal
from .surface import (
    SApp,
    SArm,
    SBind,
    SCon,
    SFst,
    SFun,
    SIf,
    SLam,
    SLet,
    SLetBind,
    SMatch,
    SObs,
    SPair,
    SSnd,
    SUnit,
    SVar,
    SurfaceExpr,
    desugar,
)
from .syntax import App, Expr, Fun, Unit, Var
from .typecheck import (
    ATM,
    NAT,
    Signature,
    TAtm,
    TBnd,
    TData,
    TFun,
    TProd,
    TUnit,
    Type,
    is_nominal_arity,
    type_to_str,
)


def diverge_expr(ty: Type) -> Expr:
    """A closed expression of any type that never terminates."""
    loop = Fun("%f", "%x", App(Var("%f"), Var("%x")), TUnit(), ty)
    return App(loop, Unit())


class _Names:
    def __init__(self, prefix: str):
        self._prefix = prefix
        self._n = 0

    def fresh(self, hint: str) -> str:
        self._n += 1
        return f"{self._prefix}{hint}{self._n}"


def _as_var(builder, e: SurfaceExpr, k):
    """Bind e to a variable before duplicating it in a built body."""
    if isinstance(e, SVar):
        return k(e)
    x = builder.fresh("v")
    return SLet(x, e, k(SVar(x)))


class _SwapBuilder:
    def __init__(self, sig: Signature, names: _Names):
        self.sig = sig
        self.names = names

    def fresh(self, hint: str) -> str:
        return self.names.fresh(hint)

    def body(self, ty: Type, x: str, y: str, z: SurfaceExpr, scope: dict) -> SurfaceExpr:
        """Expression of type ty: z with the atoms x and y exchanged."""
        match ty:
            case TAtm():
                return SIf(
                    SObs("eq", (z, SVar(x))),
                    SVar(y),
                    SIf(SObs("eq", (z, SVar(y))), SVar(x), z),
                )
            case TUnit():
                return z
            case TProd(t1, t2):
                return _as_var(
                    self,
                    z,
                    lambda zv: SPair(
                        self.body(t1, x, y, SFst(zv), scope),
                        self.body(t2, x, y, SSnd(zv), scope),
                    ),
                )
            case TFun(t1, t2):
                arg = self.fresh("a")
                return _as_var(
                    self,
                    z,
                    lambda zv: SLam(
                        arg,
                        self.body(
                            t2,
                            x,
                            y,
                            SApp(zv, self.body(t1, x, y, SVar(arg), scope)),
                            scope,
                        ),
                        t1,
                    ),
                )
            case TBnd(t):
                z1 = self.fresh("b")
                z2 = self.fresh("c")
                return _as_var(
                    self,
                    z,
                    lambda zv: SLetBind(
                        z1,
                        z2,
                        zv,
                        SBind(
                            self.body(TAtm(), x, y, SVar(z1), scope),
                            self.body(t, x, y, SVar(z2), scope),
                        ),
                    ),
                )
            case TData(name):
                if name in scope:
                    return SApp(SVar(scope[name]), z)
                fname = self.fresh(f"swap_{name}_")
                zn = self.fresh("z")
                inner = dict(scope)
                inner[name] = fname
                arms = tuple(
                    SArm(
                        con,
                        (var := self.fresh("w")),
                        SCon(con, self.body(argty, x, y, SVar(var), inner)),
                    )
                    for con, argty in self.sig.constructors_of(name)
                )
                fn = SFun(fname, zn, SMatch(SVar(zn), arms), TData(name), TData(name))
                return SApp(fn, z)
            case _:
                raise TypeError(f"unknown type {ty!r}")


class _AeqBuilder:
    def __init__(self, sig: Signature, names: _Names):
        self.sig = sig
        self.names = names
        self.swap = _SwapBuilder(sig, names)

    def fresh(self, hint: str) -> str:
        return self.names.fresh(hint)

    def body(self, ar: Type, x: SurfaceExpr, y: SurfaceExpr, scope: dict) -> SurfaceExpr:
        """Expression of type nat: Zero() iff x and y are alpha-equivalent at ar."""
        match ar:
            case TUnit():
                return SCon("Zero", SUnit())
            case TAtm():
                return SObs("eq", (x, y))
            case TProd(a1, a2):
                return _as_var(
                    self,
                    x,
                    lambda xv: _as_var(
                        self,
                        y,
                        lambda yv: SIf(
                            self.body(a1, SFst(xv), SFst(yv), scope),
                            self.body(a2, SSnd(xv), SSnd(yv), scope),
                            SCon("Succ", SCon("Zero", SUnit())),
                        ),
                    ),
                )
            case TBnd(a):
                x1 = self.fresh("p")
                x2 = self.fresh("q")
                y1 = self.fresh("r")
                y2 = self.fresh("s")
                # Unbind both sides generatively, then move the right body to
                # the left fresh atom by swapping; the two fresh atoms never
                # occur in the opposite body, so the swap is a renaming.
                return SLetBind(
                    x1,
                    x2,
                    x,
                    SLetBind(
                        y1,
                        y2,
                        y,
                        self.body(
                            a,
                            SVar(x2),
                            self.swap.body(a, x1, y1, SVar(y2), {}),
                            scope,
                        ),
                    ),
                )
            case TData(name):
                if name in scope:
                    return SApp(SApp(SVar(scope[name]), x), y)
                fname = self.fresh(f"aeq_{name}_")
                px = self.fresh("m")
                py = self.fresh("n")
                inner = dict(scope)
                inner[name] = fname
                constructors = self.sig.constructors_of(name)
                outer_arms = []
                for con, argty in constructors:
                    xv = self.fresh("u")
                    inner_arms = []
                    for con2, _ in constructors:
                        yv = self.fresh("t")
                        if con2 == con:
                            branch = self.body(argty, SVar(xv), SVar(yv), inner)
                        else:
                            branch = SCon("Succ", SCon("Zero", SUnit()))
                        inner_arms.append(SArm(con2, yv, branch))
                    outer_arms.append(
                        SArm(con, xv, SMatch(SVar(py), tuple(inner_arms)))
                    )
                fn = SFun(
                    fname,
                    px,
                    SLam(py, SMatch(SVar(px), tuple(outer_arms)), TData(name)),
                    TData(name),
                    TFun(TData(name), NAT),
                )
                return SApp(SApp(fn, x), y)
            case _:
                raise NotNominal(f"{type_to_str(ar)} is not a nominal arity")


@functools.lru_cache(maxsize=None)
def gen_swap(sig: Signature, ty: Type) -> Expr:
    """Closed expression of type atm -> atm -> ty -> ty swapping two atoms."""
    names = _Names("%s_")
    builder = _SwapBuilder(sig, names)
    x = names.fresh("x")
    y = names.fresh("y")
    z = names.fresh("z")
    out = SLam(x, SLam(y, SLam(z, builder.body(ty, x, y, SVar(z), {}), ty), ATM), ATM)
    return desugar(out)


@functools.lru_cache(maxsize=None)
def gen_aeq(sig: Signature, ar: Type) -> Expr:
    """Closed expression of type ar -> ar -> nat deciding alpha-equivalence.

    Evaluates to Zero() on alpha-equivalent closed arguments and to
    Succ(Zero()) otherwise, from any state containing the arguments' atoms.
    """
    if not is_nominal_arity(sig, ar):
        raise NotNominal(f"{type_to_str(ar)} involves the function type")
    names = _Names("%a_")
    builder = _AeqBuilder(sig, names)
    x = names.fresh("x")
    y = names.fresh("y")
    out = SLam(x, SLam(y, builder.body(ar, SVar(x), SVar(y), {}), ar), ar)
    return desugar(out)
