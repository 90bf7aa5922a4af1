"""Object-level alpha-equivalence over nominal signatures.

Nominal arities are types without function space; closed values at such
arities are exactly abstract syntax trees with binding structure, and carry
a notion of alpha-equivalence that renames bound atoms generatively.  The
untyped lambda-calculus encoding and an independent de-Bruijn-based decider
for it serve as a cross-oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .errors import IllTyped, NotNominal, Uninhabited
from .syntax import (
    Atom,
    AtomLit,
    Bind,
    Con,
    Pair,
    Unit,
    Value,
    World,
    atoms_of,
    free_vars,
    rename_atom,
)
from .typecheck import (
    ATM,
    EMPTY_ENV,
    Signature,
    TAtm,
    TBnd,
    TData,
    TFun,
    TProd,
    TUnit,
    Type,
    check_expr,
    is_nominal_arity,
    make_signature,
    type_to_str,
)

TERM = TData("term")


def lambda_signature(observations=None) -> Signature:
    """The data type of untyped lambda-terms with atom-valued variables."""
    decl = [
        (
            "term",
            (
                ("V", ATM),
                ("L", TBnd(TERM)),
                ("A", TProd(TERM, TERM)),
            ),
        )
    ]
    if observations is None:
        return make_signature(decl, check_observations=False)
    return make_signature(decl, observations, check_observations=False)


class LambdaTerm:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class LVar(LambdaTerm):
    atom: Atom


@dataclass(frozen=True, slots=True)
class LLam(LambdaTerm):
    binder: Atom
    body: LambdaTerm


@dataclass(frozen=True, slots=True)
class LApp(LambdaTerm):
    fn: LambdaTerm
    arg: LambdaTerm


def rep(t: LambdaTerm) -> Value:
    """Encode a lambda-term as a closed value of type term."""
    match t:
        case LVar(a):
            return Con("V", AtomLit(a))
        case LLam(a, body):
            return Con("L", Bind(AtomLit(a), rep(body)))
        case LApp(fn, arg):
            return Con("A", Pair(rep(fn), rep(arg)))
        case _:
            raise TypeError(f"not a lambda term: {type(t).__name__}")


def lambda_alpha(t1: LambdaTerm, t2: LambdaTerm) -> bool:
    """Textbook alpha-equivalence of lambda-terms via de Bruijn levels.

    Independent of alpha_eq: binders are resolved to nesting depths, free
    variables compared literally.
    """

    def go(a: LambdaTerm, b: LambdaTerm, env1: dict, env2: dict, depth: int) -> bool:
        match a, b:
            case LVar(x), LVar(y):
                return env1.get(x, ("free", x)) == env2.get(y, ("free", y))
            case LLam(x, body1), LLam(y, body2):
                e1 = dict(env1)
                e1[x] = depth
                e2 = dict(env2)
                e2[y] = depth
                return go(body1, body2, e1, e2, depth + 1)
            case LApp(f1, a1), LApp(f2, a2):
                return go(f1, f2, env1, env2, depth) and go(a1, a2, env1, env2, depth)
            case _:
                return False

    return go(t1, t2, {}, {}, 0)


def lambda_atoms(t: LambdaTerm) -> World:
    match t:
        case LVar(a):
            return frozenset((a,))
        case LLam(a, body):
            return frozenset((a,)) | lambda_atoms(body)
        case LApp(fn, arg):
            return lambda_atoms(fn) | lambda_atoms(arg)
        case _:
            raise TypeError(f"not a lambda term: {type(t).__name__}")


def least_fresh(w: World) -> Atom:
    used = {a.id for a in w}
    i = 0
    while i in used:
        i += 1
    return Atom(i)


PickFresh = Callable[[World], Atom]


@dataclass(frozen=True)
class AlphaJudgement:
    """A candidate judgement: two closed values of one nominal arity,
    compared at a world covering their atoms."""

    world: World
    left: Value
    right: Value
    arity: Type

    def decide(self, sig: Signature) -> bool:
        return alpha_eq(sig, self.world, self.left, self.right, self.arity)


def alpha_eq(
    sig: Signature,
    w: World,
    left: Value,
    right: Value,
    arity: Type,
    *,
    pick_fresh: PickFresh = least_fresh,
) -> bool:
    """Decide alpha-equivalence of two closed values at a nominal arity.

    The binding rule renames both bound atoms to one atom outside the world
    and compares the bodies at the enlarged world; the verdict does not
    depend on which outside atom is picked.
    """
    if not is_nominal_arity(sig, arity):
        raise NotNominal(f"{type_to_str(arity)} involves the function type")
    for v, side in ((left, "left"), (right, "right")):
        if free_vars(v):
            raise IllTyped(f"{side} value must be closed")
        if not atoms_of(v) <= w:
            raise IllTyped(f"{side} value uses atoms outside the world")
        actual = check_expr(sig, EMPTY_ENV, v)
        if actual != arity:
            raise IllTyped(
                f"{side} value has type {type_to_str(actual)}, "
                f"expected {type_to_str(arity)}"
            )
    return _alpha(sig, w, left, right, arity, pick_fresh)


def _alpha(sig, w, v1, v2, ar, pick: PickFresh) -> bool:
    match ar:
        case TUnit():
            return True
        case TAtm():
            return v1 == v2
        case TProd(a1, a2):
            assert isinstance(v1, Pair) and isinstance(v2, Pair)
            return _alpha(sig, w, v1.first, v2.first, a1, pick) and _alpha(
                sig, w, v1.second, v2.second, a2, pick
            )
        case TData(name):
            assert isinstance(v1, Con) and isinstance(v2, Con)
            if v1.con != v2.con:
                return False
            argty = dict(sig.constructors_of(name))[v1.con]
            return _alpha(sig, w, v1.arg, v2.arg, argty, pick)
        case TBnd(body_ar):
            assert isinstance(v1, Bind) and isinstance(v2, Bind)
            assert isinstance(v1.name_part, AtomLit) and isinstance(v2.name_part, AtomLit)
            fresh = pick(w)
            assert fresh not in w
            return _alpha(
                sig,
                w | {fresh},
                rename_atom(v1.body_part, v1.name_part.atom, fresh),
                rename_atom(v2.body_part, v2.name_part.atom, fresh),
                body_ar,
                pick,
            )
        case _:
            raise NotNominal(f"{type_to_str(ar)} is not a nominal arity")


def _min_depths(sig: Signature) -> dict[str, float]:
    """Least value depth per data type; inf when a type has no finite value."""
    depths: dict[str, float] = {name: float("inf") for name, _ in sig.datatypes}

    def type_depth(ty: Type) -> float:
        match ty:
            case TUnit() | TAtm():
                return 1
            case TProd(a, b):
                return 1 + max(type_depth(a), type_depth(b))
            case TBnd(body):
                return 1 + type_depth(body)
            case TData(name):
                return depths[name]
            case TFun(_, _):
                return 1
            case _:
                raise TypeError(f"unknown type {ty!r}")

    changed = True
    while changed:
        changed = False
        for name, constructors in sig.datatypes:
            best = min((1 + type_depth(argty) for _, argty in constructors), default=float("inf"))
            if best < depths[name]:
                depths[name] = best
                changed = True
    return depths


def gen_value(
    sig: Signature,
    arity: Type,
    w: World,
    size: int,
    seed: int | str | random.Random = 0,
) -> Value:
    """A random closed well-typed value of the arity, atoms drawn from w.

    `size` bounds the value depth; generation is deterministic in the seed
    and picks among the constructors that still fit the remaining budget, so
    it converges on base constructors as the budget shrinks.
    """
    if not is_nominal_arity(sig, arity):
        raise NotNominal(f"{type_to_str(arity)} involves the function type")
    rng = seed if isinstance(seed, random.Random) else random.Random(f"gen_value/{seed}")
    depths = _min_depths(sig)
    atom_pool = sorted(w)

    def type_depth(ty: Type) -> float:
        match ty:
            case TUnit() | TAtm():
                return 1
            case TProd(a, b):
                return 1 + max(type_depth(a), type_depth(b))
            case TBnd(body):
                return 1 + type_depth(body)
            case TData(name):
                return depths[name]
        raise TypeError(f"unknown type {ty!r}")

    def go(ty: Type, budget: int) -> Value:
        if type_depth(ty) > budget:
            raise Uninhabited(
                f"no value of {type_to_str(ty)} within depth {budget}"
            )
        match ty:
            case TUnit():
                return Unit()
            case TAtm():
                if not atom_pool:
                    raise Uninhabited("atm needs a non-empty world")
                return AtomLit(rng.choice(atom_pool))
            case TProd(a, b):
                return Pair(go(a, budget - 1), go(b, budget - 1))
            case TBnd(body):
                if not atom_pool:
                    raise Uninhabited("atm bnd needs a non-empty world")
                return Bind(AtomLit(rng.choice(atom_pool)), go(body, budget - 1))
            case TData(name):
                fitting = [
                    (con, argty)
                    for con, argty in sig.constructors_of(name)
                    if type_depth(argty) <= budget - 1
                ]
                if not fitting:
                    raise Uninhabited(
                        f"no constructor of {name} fits within depth {budget}"
                    )
                con, argty = rng.choice(fitting)
                return Con(con, go(argty, budget - 1))
        raise TypeError(f"unknown type {ty!r}")

    return go(arity, size)


def alpha_variant(
    sig: Signature, v: Value, arity: Type, w: World, rng: random.Random
) -> Value:
    """An alpha-equivalent variant of v with bound atoms renamed inside w."""
    match arity, v:
        case TBnd(body_ar), Bind(AtomLit(a), body):
            body = alpha_variant(sig, body, body_ar, w, rng)
            candidates = [b for b in sorted(w) if b not in atoms_of(body) or b == a]
            new = rng.choice(candidates) if candidates else a
            if new != a and new in atoms_of(body):
                new = a
            return Bind(AtomLit(new), rename_atom(body, a, new))
        case TProd(a1, a2), Pair(x, y):
            return Pair(
                alpha_variant(sig, x, a1, w, rng), alpha_variant(sig, y, a2, w, rng)
            )
        case TData(name), Con(c, arg):
            argty = dict(sig.constructors_of(name))[c]
            return Con(c, alpha_variant(sig, arg, argty, w, rng))
        case _:
            return v


def gen_lambda_term(w: World, size: int, rng: random.Random) -> LambdaTerm:
    """A random lambda-term with atoms from the given non-empty pool."""
    pool = sorted(w)
    if not pool:
        raise Uninhabited("lambda terms need a non-empty atom pool")
    if size <= 1:
        return LVar(rng.choice(pool))
    match rng.randint(0, 2):
        case 0:
            return LVar(rng.choice(pool))
        case 1:
            return LLam(rng.choice(pool), gen_lambda_term(w, size - 1, rng))
        case _:
            return LApp(
                gen_lambda_term(w, size - 1, rng), gen_lambda_term(w, size - 1, rng)
            )
