"""The frame-stack abstract machine.

A step either pops a frame (substituting the value), pushes a let frame,
dispatches a match, projects a pair, unfolds a recursive function, allocates
a fresh atom, generatively unbinds an atom binding, or evaluates an
observation on atoms to a numeral.  Fresh atoms always append at the
right-hand (largest) end of the state; the allocation policy is pluggable
because termination behaviour is independent of the particular choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .syntax import (
    App,
    AtomLit,
    Atom,
    Bind,
    Con,
    Configuration,
    Expr,
    Frame,
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
    Value,
    nat_value,
    rename_atom,
    substitute,
)
from .typecheck import Signature, check_config


@dataclass(frozen=True, slots=True)
class Next:
    config: Configuration


@dataclass(frozen=True, slots=True)
class Terminal:
    value: Value


@dataclass(frozen=True)
class Stuck:
    reason: str
    config: Configuration | None = None


StepResult = Union[Next, Terminal, Stuck]


@dataclass(frozen=True)
class Terminated:
    steps: int
    final_state: State
    value: Value


@dataclass(frozen=True)
class FuelExhausted:
    """No terminal configuration within the fuel budget.

    When `cycle_detected` is set the machine found an exactly repeating
    configuration; determinism then proves the run can never terminate, so
    the full budget is reported without being executed step by step.
    """

    steps_run: int
    cycle_detected: bool = False


Outcome = Union[Terminated, FuelExhausted, Stuck]


FreshPolicy = Callable[[State], Atom]


def fresh_atom(s: State) -> Atom:
    """Default policy: the least-index atom not in the state (gaps reused)."""
    used = {a.id for a in s}
    i = 0
    while i in used:
        i += 1
    return Atom(i)


def fresh_atom_largest(s: State) -> Atom:
    """Alternative policy: one past the largest index in use."""
    return Atom(max((a.id for a in s), default=-1) + 1)


def step(sig: Signature, cfg: Configuration, policy: FreshPolicy = fresh_atom) -> StepResult:
    s, stack, e = cfg.state, cfg.stack, cfg.expr
    if isinstance(e, Value):
        if not stack.frames:
            return Terminal(e)
        rest, frame = stack.pop()
        body = substitute(frame.body, {frame.var: e})
        return Next(Configuration(s, rest, body, validate=False))
    match e:
        case Let(x, e1, e2):
            return Next(Configuration(s, stack.push(Frame(x, e2)), e1, validate=False))
        case Match(Con(c, v), arms):
            for arm in arms:
                if arm.con == c:
                    body = substitute(arm.body, {arm.var: v})
                    return Next(Configuration(s, stack, body, validate=False))
            return Stuck(f"match has no arm for constructor {c}", cfg)
        case Fst(Pair(v1, _)):
            return Next(Configuration(s, stack, v1, validate=False))
        case Snd(Pair(_, v2)):
            return Next(Configuration(s, stack, v2, validate=False))
        case App(Fun(f, x, body) as fn, v2):
            reduct = substitute(body, {f: fn, x: v2})
            return Next(Configuration(s, stack, reduct, validate=False))
        case Fresh():
            a = policy(s)
            return Next(Configuration(s.append(a), stack, AtomLit(a), validate=False))
        case Unbind(Bind(AtomLit(a), v)):
            a2 = policy(s)
            renamed = rename_atom(v, a, a2)
            pair = Pair(AtomLit(a2), renamed)
            return Next(Configuration(s.append(a2), stack, pair, validate=False))
        case ObsApp(name, args):
            atoms = []
            for v in args:
                if not isinstance(v, AtomLit):
                    return Stuck(f"observation {name} applied to non-atom", cfg)
                atoms.append(v.atom)
            try:
                obs = sig.get_obs(name)
            except Exception:
                return Stuck(f"observation {name} is not registered", cfg)
            if len(atoms) != obs.arity:
                return Stuck(f"observation {name} arity mismatch", cfg)
            if any(a not in s for a in atoms):
                return Stuck(f"E_ATOM_ESCAPE: observation argument outside state {s}", cfg)
            m = obs.fn(s, tuple(atoms))
            return Next(Configuration(s, stack, nat_value(m), validate=False))
        case _:
            return Stuck(f"no transition applies to {type(e).__name__}", cfg)


_CYCLE_WINDOW = 4


def run(
    sig: Signature,
    cfg: Configuration,
    fuel: int,
    *,
    policy: FreshPolicy = fresh_atom,
    recheck: bool = True,
) -> Outcome:
    """Iterate the machine for at most `fuel` steps.

    With `recheck`, the initial configuration is type checked and a
    terminated run is verified to preserve its type; the world-growth check
    is always performed.  Exact configuration repeats (same state and stack
    objects, equal expression) within a small window prove divergence and
    short-circuit to FuelExhausted.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    initial_type = None
    if recheck:
        _, initial_type = check_config(sig, cfg)
    cur = cfg
    n = 0
    history: list[tuple[State, FrameStack, Expr]] = [(cfg.state, cfg.stack, cfg.expr)]
    while True:
        result = step(sig, cur, policy)
        match result:
            case Terminal(v):
                k = len(cfg.state)
                assert cur.state.atoms[:k] == cfg.state.atoms, "state must grow monotonically"
                if recheck:
                    final = Configuration(cur.state, FrameStack(), v, validate=False)
                    _, final_type = check_config(sig, final)
                    assert final_type == initial_type, "type must be preserved"
                return Terminated(n, cur.state, v)
            case Stuck():
                return result
            case Next(nxt):
                if n == fuel:
                    return FuelExhausted(fuel)
                n += 1
                for ps, pk, pe in history:
                    if nxt.state is ps and nxt.stack is pk and nxt.expr == pe:
                        return FuelExhausted(fuel, cycle_detected=True)
                history.append((nxt.state, nxt.stack, nxt.expr))
                if len(history) > _CYCLE_WINDOW:
                    history.pop(0)
                cur = nxt


def trace(
    sig: Signature,
    cfg: Configuration,
    fuel: int,
    policy: FreshPolicy = fresh_atom,
) -> list[Configuration]:
    """Step-by-step transcript, including the initial configuration."""
    out = [cfg]
    cur = cfg
    for _ in range(fuel):
        result = step(sig, cur, policy)
        if not isinstance(result, Next):
            break
        cur = result.config
        out.append(cur)
    return out


def stack_apply(stack: FrameStack, e: Expr) -> Expr:
    """Convert a stack into nested lets around e, innermost frame first."""
    out = e
    for frame in reversed(stack.frames):
        out = Let(frame.var, out, frame.body)
    return out
