"""Types, signatures and the syntax-directed typing relation.

A signature is a top-level declaration of (possibly mutually recursive) data
types together with the registry of observations on atoms.  Checking is pure
inference over annotated terms: each construct determines its type from the
types of its parts, with no unification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    ArityError,
    AtomEscape,
    DuplicateConstructor,
    DuplicateTypeName,
    NonExhaustiveMatch,
    ObsDeclarationError,
    TypingError,
    UnboundVariable,
    UndeclaredType,
)
from .observations import EQ, Observation, check_affine, check_equivariance
from .syntax import (
    App,
    AtomLit,
    Bind,
    Con,
    Configuration,
    Expr,
    FrameStack,
    Fresh,
    Fst,
    Fun,
    Let,
    Match,
    ObsApp,
    Pair,
    Snd,
    State,
    Unbind,
    Unit,
    Value,
    Var,
    World,
    atoms_of,
    free_vars,
    fresh_var,
    substitute,
)


class Type:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class TUnit(Type):
    pass


@dataclass(frozen=True, slots=True)
class TProd(Type):
    first: Type
    second: Type


@dataclass(frozen=True, slots=True)
class TFun(Type):
    arg: Type
    result: Type


@dataclass(frozen=True, slots=True)
class TData(Type):
    name: str


@dataclass(frozen=True, slots=True)
class TAtm(Type):
    pass


@dataclass(frozen=True, slots=True)
class TBnd(Type):
    body: Type


UNIT = TUnit()
ATM = TAtm()
NAT = TData("nat")


def type_to_str(ty: Type) -> str:
    """Concrete syntax for a type; `bnd` binds tightest, then `*`, then `->`."""

    def go(t: Type, prec: int) -> str:
        match t:
            case TUnit():
                return "unit"
            case TAtm():
                return "atm"
            case TData(name):
                return name
            case TBnd(body):
                return f"{go(body, 3)} bnd"
            case TProd(a, b):
                s = f"{go(a, 2)} * {go(b, 3)}"
                return f"({s})" if prec > 1 else s
            case TFun(a, b):
                s = f"{go(a, 1)} -> {go(b, 0)}"
                return f"({s})" if prec > 0 else s
            case _:
                raise TypeError(f"unknown type {t!r}")

    return go(ty, 0)


Datatypes = tuple[tuple[str, tuple[tuple[str, Type], ...]], ...]

_NAT_DECL = ("nat", (("Zero", UNIT), ("Succ", NAT)))


@dataclass(frozen=True)
class Signature:
    """Declared data types plus the observation registry."""

    datatypes: Datatypes
    observations: tuple[Observation, ...]
    is_nominal: bool = False
    _cons: dict = field(init=False, repr=False, compare=False, default=None)
    _obs: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        cons: dict[str, tuple[Type, str]] = {}
        for name, constructors in self.datatypes:
            for con, argty in constructors:
                cons[con] = (argty, name)
        object.__setattr__(self, "_cons", cons)
        object.__setattr__(self, "_obs", {o.name: o for o in self.observations})

    def has_datatype(self, name: str) -> bool:
        return any(d == name for d, _ in self.datatypes)

    def constructors_of(self, name: str) -> tuple[tuple[str, Type], ...]:
        for d, constructors in self.datatypes:
            if d == name:
                return constructors
        raise UndeclaredType(f"data type {name!r} is not declared")

    def constructor_type(self, con: str) -> tuple[Type, str]:
        """Argument type and result data type of a constructor."""
        try:
            return self._cons[con]
        except KeyError:
            raise TypingError(f"constructor {con!r} is not declared") from None

    def get_obs(self, name: str) -> Observation:
        try:
            return self._obs[name]
        except KeyError:
            raise TypingError(f"observation {name!r} is not registered") from None

    def obs_names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.observations)

    def with_observations(self, observations: Iterable[Observation]) -> "Signature":
        return make_signature(
            [d for d in self.datatypes if d[0] != "nat"],
            observations=tuple(observations),
            check_observations=False,
        )


def _check_type_wf(sig_names: set[str], ty: Type) -> None:
    match ty:
        case TUnit() | TAtm():
            pass
        case TData(name):
            if name not in sig_names:
                raise UndeclaredType(f"data type {name!r} is not declared")
        case TProd(a, b) | TFun(a, b):
            _check_type_wf(sig_names, a)
            _check_type_wf(sig_names, b)
        case TBnd(body):
            _check_type_wf(sig_names, body)
        case _:
            raise TypeError(f"unknown type {ty!r}")


def is_nominal_arity(sig: Signature, ty: Type) -> bool:
    """True iff ty avoids the function type entirely."""
    match ty:
        case TUnit() | TAtm():
            return True
        case TData(name):
            if not sig.has_datatype(name):
                raise UndeclaredType(f"data type {name!r} is not declared")
            return True
        case TProd(a, b):
            return is_nominal_arity(sig, a) and is_nominal_arity(sig, b)
        case TBnd(body):
            return is_nominal_arity(sig, body)
        case TFun(_, _):
            return False
        case _:
            raise TypeError(f"unknown type {ty!r}")


def make_signature(
    declarations: Sequence[tuple[str, Sequence[tuple[str, Type]]]] = (),
    observations: Iterable[Observation] = (EQ,),
    *,
    check_observations: bool = True,
    check_trials: int = 200,
    seed: int | str = 0,
) -> Signature:
    """Validate a declaration and build a signature.

    nat/Zero/Succ are always present and may not be redeclared.  The
    observation registry always contains eq.  Observations declared
    equivariant or affine are vetted by the sampled checkers; a declaration
    the checker refutes aborts registration.
    """
    decls: list[tuple[str, tuple[tuple[str, Type], ...]]] = [_NAT_DECL]
    seen_types = {"nat"}
    for name, constructors in declarations:
        if name in seen_types:
            raise DuplicateTypeName(f"data type {name!r} declared twice")
        seen_types.add(name)
        decls.append((name, tuple((c, t) for c, t in constructors)))

    seen_cons: set[str] = set()
    for name, constructors in decls:
        for con, _ in constructors:
            if con in seen_cons:
                raise DuplicateConstructor(f"constructor {con!r} declared twice")
            seen_cons.add(con)
    for name, constructors in decls:
        for _, argty in constructors:
            _check_type_wf(seen_types, argty)

    obs = tuple(observations)
    if not any(o.name == "eq" for o in obs):
        obs = (EQ,) + obs
    seen_obs: set[str] = set()
    for o in obs:
        if o.name in seen_obs:
            raise ObsDeclarationError(f"observation {o.name!r} registered twice")
        seen_obs.add(o.name)
    if check_observations:
        for o in obs:
            if o.declared_equivariant:
                verdict = check_equivariance(o, check_trials, seed)
                if not verdict:
                    raise ObsDeclarationError(
                        f"{o.name} is declared equivariant but a counterexample "
                        f"was found: {verdict.counterexample}"
                    )
            if o.declared_affine:
                verdict = check_affine(o, check_trials, seed)
                if not verdict:
                    raise ObsDeclarationError(
                        f"{o.name} is declared affine but a counterexample "
                        f"was found: {verdict.counterexample}"
                    )

    sig = Signature(tuple(decls), obs)
    nominal = all(
        is_nominal_arity(sig, argty)
        for _, constructors in decls
        for _, argty in constructors
    )
    return Signature(tuple(decls), obs, is_nominal=nominal)


def validate_signature(
    declarations: Sequence[tuple[str, Sequence[tuple[str, Type]]]],
    observations: Iterable[Observation] = (EQ,),
) -> Signature:
    return make_signature(declarations, observations)


class TypingEnv:
    """Immutable finite map from variables to types."""

    __slots__ = ("_m",)

    def __init__(self, bindings: dict[str, Type] | None = None):
        self._m = dict(bindings) if bindings else {}

    def lookup(self, var: str) -> Optional[Type]:
        return self._m.get(var)

    def extend(self, var: str, ty: Type) -> "TypingEnv":
        if var in self._m:
            raise TypingError(f"variable {var!r} is already bound in the environment")
        out = TypingEnv(self._m)
        out._m[var] = ty
        return out

    def names(self) -> frozenset[str]:
        return frozenset(self._m)

    def items(self):
        return self._m.items()


EMPTY_ENV = TypingEnv()


def _extend_fresh(env: TypingEnv, var: str, ty: Type, body: Expr) -> tuple[TypingEnv, Expr]:
    """Extend env, silently renaming the binder when it would shadow."""
    if env.lookup(var) is None:
        return env.extend(var, ty), body
    nv = fresh_var(var, env.names() | free_vars(body))
    return env.extend(nv, ty), substitute(body, {var: Var(nv)})


def _require_value(e: Expr, where: str) -> None:
    if not isinstance(e, Value):
        raise TypingError(f"{where} must be a value in reduced form")


def check_expr(sig: Signature, env: TypingEnv, e: Expr) -> Type:
    """The unique type of e under env, or a TypingError subclass."""
    match e:
        case Var(x):
            ty = env.lookup(x)
            if ty is None:
                raise UnboundVariable(f"unbound variable {x!r}")
            return ty
        case Unit():
            return UNIT
        case AtomLit(_):
            return ATM
        case Pair(v1, v2):
            _require_value(v1, "pair component")
            _require_value(v2, "pair component")
            return TProd(check_expr(sig, env, v1), check_expr(sig, env, v2))
        case Fun(f, x, body, pty, rty):
            if f == x:
                raise TypingError("fun binders must be distinct variables")
            if pty is None:
                raise TypingError(
                    "fun value needs a parameter type annotation to be checked"
                )
            names = {name for name, _ in sig.datatypes}
            _check_type_wf(names, pty)
            if rty is not None:
                _check_type_wf(names, rty)
            if rty is None:
                # f's type is unknown; only bodies that never consult it check.
                env1, body1 = _extend_fresh(env, x, pty, body)
                if f in free_vars(body1):
                    raise TypingError(
                        "recursive fun value needs a result type annotation"
                    )
                return TFun(pty, check_expr(sig, env1, body1))
            env1, body1 = _extend_fresh(env, f, TFun(pty, rty), body)
            env2, body2 = _extend_fresh(env1, x, pty, body1)
            actual = check_expr(sig, env2, body2)
            if actual != rty:
                raise TypingError(
                    f"fun body has type {type_to_str(actual)}, "
                    f"annotation says {type_to_str(rty)}"
                )
            return TFun(pty, rty)
        case Con(c, v):
            _require_value(v, "constructor argument")
            argty, delta = sig.constructor_type(c)
            actual = check_expr(sig, env, v)
            if actual != argty:
                raise TypingError(
                    f"constructor {c} expects {type_to_str(argty)}, "
                    f"got {type_to_str(actual)}"
                )
            return TData(delta)
        case Bind(v1, v2):
            _require_value(v1, "binding name part")
            _require_value(v2, "binding body part")
            t1 = check_expr(sig, env, v1)
            if t1 != ATM:
                raise TypingError(
                    f"binding name part must have type atm, got {type_to_str(t1)}"
                )
            return TBnd(check_expr(sig, env, v2))
        case Let(x, e1, e2):
            t1 = check_expr(sig, env, e1)
            env1, body = _extend_fresh(env, x, t1, e2)
            return check_expr(sig, env1, body)
        case Fst(v):
            _require_value(v, "fst argument")
            t = check_expr(sig, env, v)
            if not isinstance(t, TProd):
                raise TypingError(f"fst needs a pair, got {type_to_str(t)}")
            return t.first
        case Snd(v):
            _require_value(v, "snd argument")
            t = check_expr(sig, env, v)
            if not isinstance(t, TProd):
                raise TypingError(f"snd needs a pair, got {type_to_str(t)}")
            return t.second
        case App(v1, v2):
            _require_value(v1, "applied function")
            _require_value(v2, "application argument")
            t1 = check_expr(sig, env, v1)
            if not isinstance(t1, TFun):
                raise TypingError(f"application of non-function {type_to_str(t1)}")
            t2 = check_expr(sig, env, v2)
            if t2 != t1.arg:
                raise TypingError(
                    f"argument has type {type_to_str(t2)}, "
                    f"function expects {type_to_str(t1.arg)}"
                )
            return t1.result
        case Match(v, arms):
            _require_value(v, "match scrutinee")
            t = check_expr(sig, env, v)
            if not isinstance(t, TData):
                raise TypingError(f"match needs a data value, got {type_to_str(t)}")
            declared = dict(sig.constructors_of(t.name))
            seen = [arm.con for arm in arms]
            if sorted(seen) != sorted(declared):
                raise NonExhaustiveMatch(
                    f"match on {t.name} must have exactly one arm per constructor "
                    f"{sorted(declared)}, got {seen}"
                )
            result: Optional[Type] = None
            for arm in arms:
                env1, body = _extend_fresh(env, arm.var, declared[arm.con], arm.body)
                ty = check_expr(sig, env1, body)
                if result is None:
                    result = ty
                elif ty != result:
                    raise TypingError(
                        f"match arms disagree: {type_to_str(result)} vs "
                        f"{type_to_str(ty)} in arm {arm.con}"
                    )
            assert result is not None
            return result
        case Fresh():
            return ATM
        case Unbind(v):
            _require_value(v, "unbind argument")
            t = check_expr(sig, env, v)
            if not isinstance(t, TBnd):
                raise TypingError(f"unbind needs an atom binding, got {type_to_str(t)}")
            return TProd(ATM, t.body)
        case ObsApp(o, args):
            obs = sig.get_obs(o)
            if len(args) != obs.arity:
                raise ArityError(
                    f"observation {o} has arity {obs.arity}, got {len(args)} arguments"
                )
            for v in args:
                _require_value(v, "observation argument")
                t = check_expr(sig, env, v)
                if t != ATM:
                    raise TypingError(
                        f"observation arguments must be atoms, got {type_to_str(t)}"
                    )
            return NAT
        case _:
            raise TypingError(f"unknown expression form {type(e).__name__}")


def check_stack(sig: Signature, env: TypingEnv, stack: FrameStack, argument: Type) -> Type:
    """Result type of the stack when handed a value of the argument type."""
    current = argument
    for frame in reversed(stack.frames):
        env1, body = _extend_fresh(env, frame.var, current, frame.body)
        current = check_expr(sig, env1, body)
    return current


def check_config(sig: Signature, cfg: Configuration) -> tuple[World, Type]:
    """World and observable type of a well-formed, well-typed configuration."""
    world = atoms_of(cfg.state)
    escaped = atoms_of(cfg.stack, cfg.expr) - world
    if escaped:
        names = ",".join(sorted(str(a) for a in escaped))
        raise AtomEscape(f"atoms {names} occur in the configuration but not its state")
    ty = check_expr(sig, EMPTY_ENV, cfg.expr)
    return world, check_stack(sig, EMPTY_ENV, cfg.stack, ty)
