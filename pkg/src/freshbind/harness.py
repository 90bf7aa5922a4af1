"""Randomized testing of program equivalence and machine metatheory.

Contextual equivalence of closed expressions is characterised by
termination agreement under every state extending the world and every
well-typed frame stack.  The quantifier is sampled: states place the
world's atoms in random order inside a random superset, and stacks are
generated type-directed from destructors, observation applications,
alpha-testers and the known distinguishing patterns.  A verdict is always
relative to a (trials, fuel) budget and reproducible from its seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .derived import diverge_expr, gen_aeq
from .errors import IllTyped, Uninhabited
from .machine import (
    FuelExhausted,
    Outcome,
    Stuck,
    Terminated,
    fresh_atom,
    fresh_atom_largest,
    run,
    stack_apply,
    step,
    Next,
    Terminal,
)
from .nominal import alpha_eq, alpha_variant, gen_value, least_fresh
from .surface import SApp, SEmbed, SVar, desugar
from .syntax import (
    App,
    Arm,
    Atom,
    AtomLit,
    Bind,
    Con,
    Configuration,
    Expr,
    Frame,
    FrameStack,
    Fresh,
    Fst,
    Fun,
    ID,
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
    nat_value,
    perm_apply,
    Permutation,
    rename_atom,
    substitute,
    value_to_int,
)
from .typecheck import (
    ATM,
    EMPTY_ENV,
    NAT,
    Signature,
    TAtm,
    TBnd,
    TData,
    TFun,
    TProd,
    TUnit,
    Type,
    TypingEnv,
    UNIT,
    check_config,
    check_expr,
    is_nominal_arity,
    type_to_str,
)


def _rng(seed, *parts) -> random.Random:
    return random.Random("/".join(str(p) for p in (seed, *parts)))


class _Supply:
    def __init__(self, prefix: str = "%h"):
        self._n = 0
        self._prefix = prefix

    def fresh(self) -> str:
        self._n += 1
        return f"{self._prefix}{self._n}"


# -- random types, values, expressions, stacks --------------------------------


def rand_type(sig: Signature, rng: random.Random, depth: int = 2) -> Type:
    options: list[tuple[int, str]] = [(3, "atm"), (2, "nat"), (1, "unit")]
    options += [(2, f"data:{name}") for name, _ in sig.datatypes if name != "nat"]
    if depth > 0:
        options += [(2, "prod"), (2, "bnd"), (1, "fun")]
    total = sum(w for w, _ in options)
    pick = rng.randrange(total)
    for w, tag in options:
        pick -= w
        if pick < 0:
            break
    match tag:
        case "atm":
            return ATM
        case "nat":
            return NAT
        case "unit":
            return UNIT
        case "prod":
            return TProd(rand_type(sig, rng, depth - 1), rand_type(sig, rng, depth - 1))
        case "bnd":
            return TBnd(rand_type(sig, rng, depth - 1))
        case "fun":
            return TFun(rand_type(sig, rng, depth - 1), rand_type(sig, rng, depth - 1))
        case _:
            return TData(tag.split(":", 1)[1])


def gen_any_value(sig: Signature, ty: Type, w: World, rng: random.Random, depth: int = 4) -> Value:
    """A closed value of any type; function types draw from a small pool."""
    match ty:
        case TUnit():
            return Unit()
        case TAtm():
            pool = sorted(w)
            if not pool:
                raise Uninhabited("atm needs a non-empty world")
            return AtomLit(rng.choice(pool))
        case TProd(a, b):
            return Pair(
                gen_any_value(sig, a, w, rng, depth - 1),
                gen_any_value(sig, b, w, rng, depth - 1),
            )
        case TBnd(a):
            pool = sorted(w)
            if not pool:
                raise Uninhabited("atm bnd needs a non-empty world")
            return Bind(AtomLit(rng.choice(pool)), gen_any_value(sig, a, w, rng, depth - 1))
        case TData(_):
            return gen_value(sig, ty, w, max(2, depth + rng.randint(0, 2)), rng)
        case TFun(t1, t2):
            pool: list[Value] = [Fun("%f", "%x", App(Var("%f"), Var("%x")), t1, t2)]
            if t1 == t2:
                pool.append(Fun("%f", "%x", Var("%x"), t1, t2))
            try:
                const = gen_any_value(sig, t2, w, rng, depth - 1)
                pool.append(Fun("%f", "%x", const, t1, t2))
            except Uninhabited:
                pass
            return rng.choice(pool)
        case _:
            raise TypeError(f"unknown type {ty!r}")


def gen_expr(
    sig: Signature,
    env: tuple[tuple[str, Type], ...],
    ty: Type,
    w: World,
    size: int,
    rng: random.Random,
    supply: Optional[_Supply] = None,
) -> Expr:
    """A random closed (modulo env) well-typed expression of the given type."""
    supply = supply or _Supply()
    matching = [n for n, t in env if t == ty]
    atm_vars = [n for n, t in env if t == ATM]
    fun_vars = [(n, t) for n, t in env if isinstance(t, TFun) and t.result == ty]

    def value_opt() -> Expr:
        return gen_any_value(sig, ty, w, rng)

    if size <= 0:
        if matching and rng.random() < 0.7:
            return Var(rng.choice(matching))
        return value_opt()

    def obs_args(arity: int) -> Optional[tuple[Value, ...]]:
        out: list[Value] = []
        pool = sorted(w)
        for _ in range(arity):
            if atm_vars and (not pool or rng.random() < 0.3):
                out.append(Var(rng.choice(atm_vars)))
            elif pool:
                out.append(AtomLit(rng.choice(pool)))
            else:
                return None
        return tuple(out)

    options: list[tuple[int, str]] = [(2, "value"), (3, "let")]
    if matching:
        options.append((3, "var"))
    if fun_vars:
        options.append((3, "appvar"))
    options.append((2, "applit"))
    if ty == ATM:
        options.append((3, "fresh"))
    if ty == NAT:
        options.append((3, "obs"))
    options.append((2, "match"))
    options.append((2, "proj"))
    if isinstance(ty, TProd) and ty.first == ATM:
        options.append((2, "unbind"))
    if len(sig.observations) > 0:
        options.append((3, "obsbranch"))

    rng.shuffle(options)
    total = sum(wt for wt, _ in options)
    pick = rng.randrange(total)
    tag = options[-1][1]
    for wt, t in options:
        pick -= wt
        if pick < 0:
            tag = t
            break

    try:
        match tag:
            case "value":
                return value_opt()
            case "var":
                return Var(rng.choice(matching))
            case "let":
                bind_ty = rand_type(sig, rng, 1)
                x = supply.fresh()
                e1 = gen_expr(sig, env, bind_ty, w, size // 2, rng, supply)
                e2 = gen_expr(sig, env + ((x, bind_ty),), ty, w, size - 1, rng, supply)
                return Let(x, e1, e2)
            case "appvar":
                name, fty = rng.choice(fun_vars)
                return App(Var(name), gen_any_value(sig, fty.arg, w, rng))
            case "applit":
                arg_ty = rand_type(sig, rng, 1)
                f = supply.fresh()
                x = supply.fresh()
                body = gen_expr(
                    sig,
                    env + ((f, TFun(arg_ty, ty)), (x, arg_ty)),
                    ty,
                    w,
                    size - 1,
                    rng,
                    supply,
                )
                return App(Fun(f, x, body, arg_ty, ty), gen_any_value(sig, arg_ty, w, rng))
            case "fresh":
                return Fresh()
            case "obs":
                obs = rng.choice(sig.observations)
                args = obs_args(obs.arity)
                if args is None:
                    return value_opt()
                return ObsApp(obs.name, args)
            case "match":
                names = [name for name, _ in sig.datatypes]
                dname = rng.choice(names)
                scrut = gen_any_value(sig, TData(dname), w, rng)
                arms = []
                for con, argty in sig.constructors_of(dname):
                    x = supply.fresh()
                    body = gen_expr(
                        sig, env + ((x, argty),), ty, w, size // 2, rng, supply
                    )
                    arms.append(Arm(con, x, body))
                return Match(scrut, tuple(arms))
            case "proj":
                other = rand_type(sig, rng, 1)
                if rng.random() < 0.5:
                    return Fst(gen_any_value(sig, TProd(ty, other), w, rng))
                return Snd(gen_any_value(sig, TProd(other, ty), w, rng))
            case "unbind":
                assert isinstance(ty, TProd)
                return Unbind(gen_any_value(sig, TBnd(ty.second), w, rng))
            case "obsbranch":
                obs = rng.choice(sig.observations)
                args = obs_args(obs.arity)
                if args is None:
                    return value_opt()
                m = supply.fresh()
                u1 = supply.fresh()
                u2 = supply.fresh()
                u3 = supply.fresh()
                then_e = gen_any_value(sig, ty, w, rng)
                else_e = Let(u3, Unit(), gen_any_value(sig, ty, w, rng))
                return Let(
                    m,
                    ObsApp(obs.name, args),
                    Match(Var(m), (Arm("Zero", u1, then_e), Arm("Succ", u2, else_e))),
                )
            case _:
                return value_opt()
    except Uninhabited:
        return value_opt()


def _frame(
    sig: Signature, var: str, ty: Type, w: World, rng: random.Random
) -> tuple[Expr, Type]:
    """A well-typed frame body over `var` of the given type."""
    x = Var(var)
    pool = sorted(w)
    options: list[tuple[int, str]] = []
    match ty:
        case TProd(_, _):
            options += [(4, "fst"), (4, "snd")]
        case TBnd(_):
            options += [(6, "unbind")]
        case TAtm():
            options += [(4, "obs")]
            if pool:
                options += [(2, "eq_diverge")]
        case TData(_):
            options += [(4, "arms_numeral"), (2, "arms_proj")]
        case TFun(_, _):
            options += [(5, "apply")]
    if is_nominal_arity(sig, ty):
        options += [(1, "aeq")]
    options += [(1, "dup"), (1, "state_grow")]
    if pool:
        options += [(1, "bindwrap")]

    total = sum(wt for wt, _ in options)
    pick = rng.randrange(total)
    tag = options[-1][1]
    for wt, t in options:
        pick -= wt
        if pick < 0:
            tag = t
            break

    try:
        match tag:
            case "fst":
                assert isinstance(ty, TProd)
                return Fst(x), ty.first
            case "snd":
                assert isinstance(ty, TProd)
                return Snd(x), ty.second
            case "unbind":
                assert isinstance(ty, TBnd)
                return Unbind(x), TProd(ATM, ty.body)
            case "obs":
                binary = [o for o in sig.observations if o.arity == 2]
                unary = [o for o in sig.observations if o.arity == 1]
                if binary and (pool or rng.random() < 0.5):
                    obs = rng.choice(binary)
                    other: Value = AtomLit(rng.choice(pool)) if pool else x
                    args = (x, other) if rng.random() < 0.5 else (other, x)
                    return ObsApp(obs.name, args), NAT
                if unary:
                    return ObsApp(rng.choice(unary).name, (x,)), NAT
                return ObsApp("eq", (x, x)), NAT
            case "eq_diverge":
                # the atom-testing stack from the metatheory: terminate on
                # equality with a chosen atom, diverge otherwise
                a = rng.choice(pool)
                y = "%y"
                body = Let(
                    y,
                    ObsApp("eq", (x, AtomLit(a))),
                    Match(
                        Var(y),
                        (
                            Arm("Zero", "%u", Unit()),
                            Arm("Succ", "%z", diverge_expr(UNIT)),
                        ),
                    ),
                )
                return body, UNIT
            case "arms_numeral":
                assert isinstance(ty, TData)
                arms = tuple(
                    Arm(con, f"%w{i}", nat_value(i))
                    for i, (con, _) in enumerate(sig.constructors_of(ty.name))
                )
                return Match(x, arms), NAT
            case "arms_proj":
                assert isinstance(ty, TData)
                constructors = sig.constructors_of(ty.name)
                target, target_ty = constructors[rng.randrange(len(constructors))]
                arms = tuple(
                    Arm(con, f"%w{i}", Var(f"%w{i}") if con == target else diverge_expr(target_ty))
                    for i, (con, _) in enumerate(constructors)
                )
                return Match(x, arms), target_ty
            case "apply":
                assert isinstance(ty, TFun)
                arg = gen_any_value(sig, ty.arg, w, rng)
                return App(x, arg), ty.result
            case "aeq":
                other = gen_value(sig, ty, w, rng.randint(2, 4), rng)
                tester = gen_aeq(sig, ty)
                body = desugar(SApp(SApp(SEmbed(tester), SVar(var)), SEmbed(other)))
                return body, NAT
            case "dup":
                return Pair(x, x), TProd(ty, ty)
            case "state_grow":
                return Let("%y", Fresh(), x), ty
            case "bindwrap":
                return Bind(AtomLit(rng.choice(pool)), x), TBnd(ty)
            case _:
                return Pair(x, x), TProd(ty, ty)
    except Uninhabited:
        return Pair(x, x), TProd(ty, ty)


@dataclass(frozen=True)
class StackGenSpec:
    argument: Type
    world: World
    max_depth: int = 3
    seed: int | str = 0


def _gen_stack(
    sig: Signature, ty: Type, w: World, depth: int, rng: random.Random
) -> tuple[FrameStack, Type]:
    frames_top_first: list[Frame] = []
    current = ty
    for i in range(depth):
        var = f"%k{i}"
        body, current = _frame(sig, var, current, w, rng)
        frames_top_first.append(Frame(var, body))
    return FrameStack(tuple(reversed(frames_top_first))), current


def gen_stack(sig: Signature, spec: StackGenSpec) -> tuple[FrameStack, Type]:
    """A random frame stack accepting the argument type, atoms inside the world."""
    rng = _rng(spec.seed, "stack")
    return _gen_stack(sig, spec.argument, spec.world, rng.randint(0, spec.max_depth), rng)


def gen_config(
    sig: Signature,
    rng: random.Random,
    *,
    max_state: int = 6,
    max_expr_size: int = 6,
    max_stack_depth: int = 2,
    ty: Optional[Type] = None,
) -> Configuration:
    """A random well-formed, well-typed machine configuration."""
    n = rng.randint(1, max_state)
    ids = rng.sample(range(10), n)
    state = State(tuple(Atom(i) for i in ids))
    w = frozenset(state.atoms)
    ty = ty if ty is not None else rand_type(sig, rng, 2)
    e = gen_expr(sig, (), ty, w, rng.randint(1, max_expr_size), rng)
    stack, _ = _gen_stack(sig, ty, w, rng.randint(0, max_stack_depth), rng)
    return Configuration(state, stack, e)


# -- the CIU oracle -----------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    trial: int
    state: State
    stack: FrameStack
    outcome_left: Outcome
    outcome_right: Outcome


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    state_len: int
    stack_depth: int
    left_kind: str
    left_steps: int
    right_kind: str
    right_steps: int


@dataclass(frozen=True)
class CiuResult:
    verdict: str  # "no-counterexample" | "distinguished" | "inconclusive"
    trials_run: int
    inconclusive: int
    counterexample: Optional[Counterexample]
    trials_budget: int
    fuel: int
    seed: str

    @property
    def distinguished(self) -> bool:
        return self.verdict == "distinguished"


def _outcome_kind(o: Outcome) -> str:
    if isinstance(o, Terminated):
        return "terminated"
    if isinstance(o, FuelExhausted):
        return "fuel"
    return "stuck"


def _outcome_steps(o: Outcome) -> int:
    if isinstance(o, Terminated):
        return o.steps
    if isinstance(o, FuelExhausted):
        return o.steps_run
    return -1


def sample_state(w: World, rng: random.Random, max_extra: int = 4) -> State:
    """A random state whose atoms are a superset of w, in random order."""
    base = sorted(w)
    used = {a.id for a in base}
    top = (max(used) if used else 0) + max_extra + 4
    free_ids = [i for i in range(top) if i not in used]
    extras = [Atom(i) for i in rng.sample(free_ids, rng.randint(0, max_extra))]
    atoms = base + extras
    rng.shuffle(atoms)
    return State(tuple(atoms))


def _validate_ciu_inputs(sig, w, left, right, ty):
    for e, side in ((left, "left"), (right, "right")):
        if free_vars(e):
            raise IllTyped(f"{side} expression must be closed")
        if not atoms_of(e) <= w:
            raise IllTyped(f"{side} expression uses atoms outside the world")
        actual = check_expr(sig, EMPTY_ENV, e)
        if actual != ty:
            raise IllTyped(
                f"{side} expression has type {type_to_str(actual)}, "
                f"expected {type_to_str(ty)}"
            )


def ciu_test(
    sig: Signature,
    w: World,
    left: Expr,
    right: Expr,
    ty: Type,
    trials: int,
    fuel: int,
    seed: int | str = 0,
    *,
    max_stack_depth: int = 3,
    record: Optional[list] = None,
) -> CiuResult:
    """Search for a state and stack under which exactly one side terminates.

    Double fuel exhaustion counts as agreement for the trial but is tallied;
    a run dominated by such trials reports the verdict "inconclusive" so the
    caller can raise the fuel budget.
    """
    _validate_ciu_inputs(sig, w, left, right, ty)
    inconclusive = 0
    for t in range(trials):
        rng = _rng(seed, "ciu", t)
        s = sample_state(w, rng)
        stack, _ = _gen_stack(
            sig, ty, frozenset(s.atoms), rng.randint(0, max_stack_depth), rng
        )
        out_l = run(sig, Configuration(s, stack, left), fuel, recheck=False)
        out_r = run(sig, Configuration(s, stack, right), fuel, recheck=False)
        if isinstance(out_l, Stuck) or isinstance(out_r, Stuck):
            raise RuntimeError(f"well-typed trial got stuck: {out_l} / {out_r}")
        if record is not None:
            record.append(
                TrialRecord(
                    t,
                    len(s),
                    len(stack),
                    _outcome_kind(out_l),
                    _outcome_steps(out_l),
                    _outcome_kind(out_r),
                    _outcome_steps(out_r),
                )
            )
        l_done = isinstance(out_l, Terminated)
        r_done = isinstance(out_r, Terminated)
        if l_done != r_done:
            return CiuResult(
                "distinguished",
                t + 1,
                inconclusive,
                Counterexample(t, s, stack, out_l, out_r),
                trials,
                fuel,
                str(seed),
            )
        if not l_done:
            inconclusive += 1
    verdict = "inconclusive" if inconclusive > trials // 2 else "no-counterexample"
    return CiuResult(verdict, trials, inconclusive, None, trials, fuel, str(seed))


def replay_counterexample(
    sig: Signature, cex: Counterexample, left: Expr, right: Expr, fuel: int
) -> tuple[Outcome, Outcome]:
    out_l = run(sig, Configuration(cex.state, cex.stack, left), fuel, recheck=False)
    out_r = run(sig, Configuration(cex.state, cex.stack, right), fuel, recheck=False)
    return out_l, out_r


def open_ciu_test(
    sig: Signature,
    gamma: tuple[tuple[str, Type], ...],
    w: World,
    left: Expr,
    right: Expr,
    ty: Type,
    trials: int,
    fuel: int,
    seed: int | str = 0,
) -> CiuResult:
    """Equivalence of open expressions: close free variables with random
    values at enlarged worlds, then defer to the closed oracle."""
    env = TypingEnv(dict(gamma))
    for e, side in ((left, "left"), (right, "right")):
        actual = check_expr(sig, env, e)
        if actual != ty:
            raise IllTyped(f"{side} expression has type {type_to_str(actual)}")
    inner = min(25, trials)
    instantiations = max(1, trials // inner)
    total = 0
    inconclusive = 0
    for i in range(instantiations):
        rng = _rng(seed, "open", i)
        extra = frozenset(
            Atom(max((a.id for a in w), default=-1) + 1 + k)
            for k in range(rng.randint(0, 3))
        )
        w2 = w | extra
        try:
            values = {x: gen_any_value(sig, t, w2, rng) for x, t in gamma}
        except Uninhabited:
            continue
        closed_l = substitute(left, values)
        closed_r = substitute(right, values)
        result = ciu_test(
            sig, w2, closed_l, closed_r, ty, inner, fuel, seed=f"{seed}/open{i}"
        )
        total += result.trials_run
        inconclusive += result.inconclusive
        if result.distinguished:
            return CiuResult(
                "distinguished",
                total,
                inconclusive,
                result.counterexample,
                trials,
                fuel,
                str(seed),
            )
    verdict = "inconclusive" if total and inconclusive > total // 2 else "no-counterexample"
    return CiuResult(verdict, total, inconclusive, None, trials, fuel, str(seed))


# -- metatheory suites --------------------------------------------------------


@dataclass
class SuiteReport:
    name: str
    total: int
    passed: int
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed == self.total and not self.failures


def check_termination_equivariance(
    sig: Signature, samples: int, fuel: int, seed: int | str = 0
) -> SuiteReport:
    """Permuting the atoms of a configuration preserves verdict and step count."""
    report = SuiteReport("termination-equivariance", samples, 0)
    for i in range(samples):
        rng = _rng(seed, "equivar", i)
        cfg = gen_config(sig, rng)
        pool = sorted(atoms_of(cfg) | {Atom(j) for j in range(12)})
        swaps = tuple(
            tuple(rng.sample(pool, 2)) for _ in range(rng.randint(1, 3))
        )
        pi = Permutation(swaps)
        out1 = run(sig, cfg, fuel, recheck=False)
        out2 = run(sig, perm_apply(pi, cfg), fuel, recheck=False)
        same = _outcome_kind(out1) == _outcome_kind(out2) and _outcome_steps(
            out1
        ) == _outcome_steps(out2)
        if same and not isinstance(out1, Stuck):
            report.passed += 1
        else:
            report.failures.append(
                {"sample": i, "left": out1, "right": out2, "config": cfg, "perm": pi}
            )
    return report


def check_safety(
    sig: Signature, samples: int, steps: int, seed: int | str = 0
) -> SuiteReport:
    """Progress plus preservation along bounded traces: never stuck, type
    constant, worlds only grow, configuration atoms stay inside the state."""
    report = SuiteReport("preservation+progress", samples, 0)
    for i in range(samples):
        rng = _rng(seed, "safety", i)
        cfg = gen_config(sig, rng)
        try:
            world, ty = check_config(sig, cfg)
        except Exception as exc:  # generator bug, count as failure
            report.failures.append({"sample": i, "error": repr(exc)})
            continue
        ok = True
        cur = cfg
        for _ in range(steps):
            result = step(sig, cur)
            if isinstance(result, Terminal):
                break
            if isinstance(result, Stuck):
                report.failures.append({"sample": i, "stuck": result, "config": cur})
                ok = False
                break
            cur = result.config
            try:
                world2, ty2 = check_config(sig, cur)
            except Exception as exc:
                report.failures.append({"sample": i, "error": repr(exc), "config": cur})
                ok = False
                break
            if ty2 != ty or not world <= world2:
                report.failures.append(
                    {"sample": i, "type": (ty, ty2), "world": (world, world2)}
                )
                ok = False
                break
            world = world2
        if ok:
            report.passed += 1
    return report


def check_affine_invariance(
    sig: Signature, samples: int, fuel: int, seed: int | str = 0
) -> SuiteReport:
    """With only affine observations registered, prepending a fresh atom to
    the state changes neither the verdict nor the step count."""
    report = SuiteReport("affine-state-prepend", samples, 0)
    for i in range(samples):
        rng = _rng(seed, "affine", i)
        cfg = gen_config(sig, rng)
        top = max(a.id for a in cfg.state) + 1 + rng.randint(0, 3)
        fresh = Atom(top)
        shifted = Configuration(
            cfg.state.prepend(fresh), cfg.stack, cfg.expr, validate=False
        )
        out1 = run(sig, cfg, fuel, recheck=False)
        out2 = run(sig, shifted, fuel, recheck=False)
        same = _outcome_kind(out1) == _outcome_kind(out2) and _outcome_steps(
            out1
        ) == _outcome_steps(out2)
        if same and not isinstance(out1, Stuck):
            report.passed += 1
        else:
            report.failures.append(
                {"sample": i, "plain": out1, "prepended": out2, "config": cfg}
            )
    return report


def find_affine_violation(
    sig: Signature, max_samples: int, fuel: int, seed: int | str = 0
) -> Optional[dict]:
    """First sampled configuration whose behaviour changes under state
    prepending; expected to exist when a non-affine observation is registered."""
    probe = check_affine_invariance(sig, max_samples, fuel, seed)
    if probe.failures:
        return probe.failures[0]
    return None


def check_policy_irrelevance(
    sig: Signature, samples: int, fuel: int, seed: int | str = 0
) -> SuiteReport:
    """Least-unused-index and largest-plus-one allocation agree on verdicts
    and step counts."""
    report = SuiteReport("fresh-policy-irrelevance", samples, 0)
    for i in range(samples):
        rng = _rng(seed, "policy", i)
        cfg = gen_config(sig, rng)
        out1 = run(sig, cfg, fuel, recheck=False, policy=fresh_atom)
        out2 = run(sig, cfg, fuel, recheck=False, policy=fresh_atom_largest)
        same = _outcome_kind(out1) == _outcome_kind(out2) and _outcome_steps(
            out1
        ) == _outcome_steps(out2)
        if same and not isinstance(out1, Stuck):
            report.passed += 1
        else:
            report.failures.append({"sample": i, "least": out1, "largest": out2})
    return report


def check_stack_apply_correspondence(
    sig: Signature, samples: int, fuel: int, seed: int | str = 0
) -> SuiteReport:
    """Running <s,F,e> agrees with running <s,Id,F[e]>; the nested-let form
    takes exactly one extra administrative step per frame."""
    report = SuiteReport("stack-apply-correspondence", samples, 0)
    deltas = []
    for i in range(samples):
        rng = _rng(seed, "stackapply", i)
        cfg = gen_config(sig, rng, max_stack_depth=3)
        depth = len(cfg.stack)
        folded = Configuration(cfg.state, ID, stack_apply(cfg.stack, cfg.expr))
        out1 = run(sig, cfg, fuel, recheck=False)
        out2 = run(sig, folded, fuel + depth, recheck=False)
        kinds = (_outcome_kind(out1), _outcome_kind(out2))
        if kinds[0] != kinds[1] or "stuck" in kinds:
            report.failures.append({"sample": i, "direct": out1, "folded": out2})
            continue
        if isinstance(out1, Terminated):
            if out2.steps != out1.steps + depth:
                report.failures.append(
                    {"sample": i, "steps": (out1.steps, out2.steps, depth)}
                )
                continue
            deltas.append(out2.steps - out1.steps)
        report.passed += 1
    report.details["administrative_deltas"] = deltas
    return report


# -- named experiments from the metatheory ------------------------------------


@dataclass(frozen=True)
class ExtensionalityReport:
    premise: CiuResult
    conclusion: CiuResult
    affine_only: bool
    direction_a_ok: bool
    direction_b_ok: Optional[bool]


def test_extensionality_bind(
    sig: Signature,
    w: World,
    a: Atom,
    v: Value,
    a2: Atom,
    v2: Value,
    ty: Type,
    trials: int,
    fuel: int,
    seed: int | str = 0,
) -> ExtensionalityReport:
    """Bodies renamed to a common outside atom are indistinguishable iff the
    atom bindings are; the converse direction needs every registered
    observation to be affine."""
    fresh = least_fresh(w)
    premise = ciu_test(
        sig,
        w | {fresh},
        rename_atom(v, a, fresh),
        rename_atom(v2, a2, fresh),
        ty,
        trials,
        fuel,
        seed=f"{seed}/premise",
    )
    conclusion = ciu_test(
        sig,
        w,
        Bind(AtomLit(a), v),
        Bind(AtomLit(a2), v2),
        TBnd(ty),
        trials,
        fuel,
        seed=f"{seed}/conclusion",
    )
    affine_only = all(o.declared_affine for o in sig.observations)
    direction_a_ok = not (
        premise.verdict == "no-counterexample" and conclusion.distinguished
    )
    direction_b_ok = None
    if affine_only:
        direction_b_ok = not (
            conclusion.verdict == "no-counterexample" and premise.distinguished
        )
    return ExtensionalityReport(
        premise, conclusion, affine_only, direction_a_ok, direction_b_ok
    )


@dataclass(frozen=True)
class ConjectureReport:
    witness_loop_outcome: Outcome
    witness_guarded_outcome: Outcome
    witness_ok: bool
    binding_pair_verdict: CiuResult
    label: str = "CONJECTURE"


def test_example_conjecture(
    sig: Signature,
    trials: int = 200,
    fuel: int = 10_000,
    seed: int | str = 0,
) -> ConjectureReport:
    """The position-reading guard: renamed bodies are distinguishable at a
    state that moves the read atom off position zero, while the atom
    bindings themselves resist the sampled search (reported, not asserted)."""
    sig.get_obs("ord")
    a = Atom(0)
    a_prime = Atom(1)
    loop = Fun("f", "x", App(Var("f"), Var("x")), UNIT, UNIT)
    guard_body = Let(
        "%m",
        ObsApp("ord", (AtomLit(a),)),
        Match(
            Var("%m"),
            (Arm("Zero", "%u", Unit()), Arm("Succ", "%y", App(loop, Unit()))),
        ),
    )
    guarded = Fun("f", "x", guard_body, UNIT, UNIT)

    s = State((a_prime, a))
    stack = FrameStack((Frame("%x", App(Var("%x"), Unit())),))
    guarded_renamed = rename_atom(guarded, a, a_prime)
    out_guarded = run(sig, Configuration(s, stack, guarded_renamed), fuel, recheck=False)
    out_loop = run(sig, Configuration(s, stack, loop), fuel, recheck=False)
    witness_ok = isinstance(out_guarded, Terminated) and isinstance(
        out_loop, FuelExhausted
    )
    verdict = ciu_test(
        sig,
        frozenset((a,)),
        Bind(AtomLit(a), loop),
        Bind(AtomLit(a), guarded),
        TBnd(TFun(UNIT, UNIT)),
        trials,
        fuel,
        seed=f"{seed}/conjecture",
    )
    return ConjectureReport(out_loop, out_guarded, witness_ok, verdict)


@dataclass(frozen=True)
class CorrectnessReport:
    pairs: int
    alpha_equal: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def run_aeq(
    sig: Signature, ar: Type, v1: Value, v2: Value, state: State, fuel: int
) -> int:
    """Evaluate the generated alpha-tester on two values; 0 means equivalent."""
    tester = gen_aeq(sig, ar)
    e = desugar(SApp(SApp(SEmbed(tester), SEmbed(v1)), SEmbed(v2)))
    out = run(sig, Configuration(state, ID, e), fuel, recheck=False)
    if not isinstance(out, Terminated):
        raise RuntimeError(f"alpha tester did not terminate: {out}")
    n = value_to_int(out.value)
    if n is None:
        raise RuntimeError("alpha tester returned a non-numeral")
    return n


def test_correctness_of_representation(
    sig: Signature,
    ar: Type,
    pairs: int,
    trials: int,
    fuel: int,
    seed: int | str = 0,
) -> CorrectnessReport:
    """Sampled two-sided check that alpha-equivalence coincides with
    budgeted contextual indistinguishability at a nominal arity."""
    if not sig.is_nominal:
        raise IllTyped("signature must be nominal")
    violations = []
    alpha_count = 0
    for i in range(pairs):
        rng = _rng(seed, "corr", i)
        w = frozenset(Atom(j) for j in range(rng.randint(1, 3)))
        v1 = gen_value(sig, ar, w, rng.randint(2, 6), rng)
        mix = rng.random()
        if mix < 0.3:
            v2 = v1
        elif mix < 0.6:
            v2 = alpha_variant(sig, v1, ar, w, rng)
        else:
            v2 = gen_value(sig, ar, w, rng.randint(2, 6), rng)
        equal = alpha_eq(sig, w, v1, v2, ar)
        ordered = State(tuple(sorted(w)))
        shuffled_atoms = sorted(w)
        rng.shuffle(shuffled_atoms)
        shuffled = State(tuple(shuffled_atoms))
        expected = 0 if equal else 1
        for s in (ordered, shuffled):
            got = run_aeq(sig, ar, v1, v2, s, fuel)
            if got != expected:
                violations.append(
                    {"pair": i, "alpha_eq": equal, "aeq": got, "state": s}
                )
                break
        if equal:
            alpha_count += 1
            result = ciu_test(sig, w, v1, v2, ar, trials, fuel, seed=f"{seed}/corr{i}")
            if result.distinguished:
                violations.append(
                    {"pair": i, "alpha_eq": True, "counterexample": result.counterexample}
                )
    return CorrectnessReport(pairs, alpha_count, tuple(violations))


@dataclass(frozen=True)
class WorldSensitivityReport:
    narrow: CiuResult
    wide: CiuResult

    @property
    def differs(self) -> bool:
        return self.narrow.verdict != self.wide.verdict


def test_world_sensitivity(
    sig: Signature,
    left: Expr,
    right: Expr,
    w: World,
    w2: World,
    trials: int,
    fuel: int,
    seed: int | str = 0,
) -> WorldSensitivityReport:
    """Compare verdicts at a world and a superset world; the wider world can
    flip a verdict when state-size-reading observations are registered."""
    if not w <= w2:
        raise IllTyped("second world must contain the first")
    ty = check_expr(sig, EMPTY_ENV, left)
    narrow = ciu_test(sig, w, left, right, ty, trials, fuel, seed=f"{seed}/narrow")
    wide = ciu_test(sig, w2, left, right, ty, trials, fuel, seed=f"{seed}/wide")
    return WorldSensitivityReport(narrow, wide)
