"""State-dependent observations on atoms.

An observation is a family of total functions from tuples of state atoms to
naturals, one per state.  Well-behaved observations are equivariant: their
value depends only on the relative positions of atoms in the state, never on
atom identities.  Affine observations are additionally insensitive to a
fresh atom being prepended at the least end of the state.

Most observations are written in a tiny combinator language over state
positions, state length and atom equality, which makes equivariance
syntactic; arbitrary host functions are accepted as an escape hatch and are
vetted by the sampled checker at registration time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import ArityError, AtomEscape
from .syntax import Atom, Permutation, State, perm_apply


class ObsTerm:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Const(ObsTerm):
    value: int


@dataclass(frozen=True, slots=True)
class StateLen(ObsTerm):
    pass


@dataclass(frozen=True, slots=True)
class ArgPos(ObsTerm):
    """Position of the i-th argument atom in the state (leftmost is 0)."""

    index: int


@dataclass(frozen=True, slots=True)
class ArgsEqual(ObsTerm):
    """0 if the two argument atoms are equal, 1 otherwise."""

    left: int
    right: int


@dataclass(frozen=True, slots=True)
class Less(ObsTerm):
    """0 if left evaluates below right, 1 otherwise."""

    left: ObsTerm
    right: ObsTerm


@dataclass(frozen=True, slots=True)
class Add(ObsTerm):
    left: ObsTerm
    right: ObsTerm


def eval_term(term: ObsTerm, s: State, args: tuple[Atom, ...]) -> int:
    match term:
        case Const(n):
            return n
        case StateLen():
            return len(s)
        case ArgPos(i):
            return s.index(args[i])
        case ArgsEqual(i, j):
            return 0 if args[i] == args[j] else 1
        case Less(l, r):
            return 0 if eval_term(l, s, args) < eval_term(r, s, args) else 1
        case Add(l, r):
            return eval_term(l, s, args) + eval_term(r, s, args)
        case _:
            raise TypeError(f"unknown observation term {type(term).__name__}")


@dataclass(frozen=True)
class Observation:
    """A named k-ary numeric function on atoms, parameterised by the state."""

    name: str
    arity: int
    fn: Callable[[State, tuple[Atom, ...]], int] = field(compare=False)
    declared_equivariant: bool = True
    declared_affine: bool = False
    doc: str = field(default="", compare=False)

    @classmethod
    def from_term(
        cls,
        name: str,
        arity: int,
        term: ObsTerm,
        *,
        affine: bool = False,
        doc: str = "",
    ) -> "Observation":
        """Build from a combinator term; equivariance holds by construction
        since every primitive reads only positions, length and equality."""
        return cls(
            name,
            arity,
            lambda s, args: eval_term(term, s, args),
            declared_equivariant=True,
            declared_affine=affine,
            doc=doc,
        )


def eval_obs(obs: Observation, s: State, args: tuple[Atom, ...]) -> int:
    if len(args) != obs.arity:
        raise ArityError(f"{obs.name} expects {obs.arity} arguments, got {len(args)}")
    for a in args:
        if a not in s:
            raise AtomEscape(f"argument {a} is not in the state {s}")
    return obs.fn(s, tuple(args))


EQ = Observation.from_term(
    "eq", 2, ArgsEqual(0, 1), affine=True,
    doc="0 if the atoms are equal, 1 otherwise; state-independent, so affine.",
)
LT = Observation.from_term(
    "lt", 2, Less(ArgPos(0), ArgPos(1)), affine=True,
    doc="0 if the first atom occurs to the left of the second in the state; "
        "prepending shifts both positions by one, so the comparison is affine.",
)
ORD = Observation.from_term(
    "ord", 1, ArgPos(0), affine=False,
    doc="Position of the atom in the state, 0 for the leftmost element; "
        "prepending shifts every position, so not affine.",
)
CARD = Observation.from_term(
    "card", 0, StateLen(), affine=False,
    doc="Number of atoms allocated so far; grows under prepending, so not affine.",
)

# Deliberately ill-behaved: reads the global enumeration index of the atom,
# which no permutation-invariant client could observe.  Excluded from
# default registries; used as the negative control for the checkers.
RAW_INDEX = Observation(
    "raw_index", 1, lambda s, args: args[0].id,
    declared_equivariant=False, declared_affine=False,
    doc="Enumeration index of the atom; not equivariant.",
)


def builtin_registry() -> tuple[Observation, ...]:
    return (EQ, LT, ORD, CARD, RAW_INDEX)


def builtin(name: str) -> Observation:
    for obs in builtin_registry():
        if obs.name == name:
            return obs
    raise KeyError(f"no builtin observation named {name!r}")


@dataclass(frozen=True)
class ObsVerdict:
    passed: bool
    trials_run: int
    counterexample: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.passed


_POOL = [Atom(i) for i in range(16)]


def _sample_state(rng: random.Random, min_len: int) -> State:
    n = rng.randint(min_len, 8)
    return State(tuple(rng.sample(_POOL, n)))


def _sample_args(rng: random.Random, s: State, arity: int) -> tuple[Atom, ...]:
    return tuple(rng.choice(s.atoms) for _ in range(arity))


def check_equivariance(obs: Observation, trials: int, seed: int | str = 0) -> ObsVerdict:
    """Sampled check that the observation commutes with atom permutations
    applied simultaneously to the state and the arguments."""
    rng = random.Random(f"{seed}/equivariance/{obs.name}")
    for t in range(trials):
        s = _sample_state(rng, min_len=obs.arity)
        args = _sample_args(rng, s, obs.arity)
        swaps = tuple(
            tuple(rng.sample(_POOL, 2)) for _ in range(rng.randint(1, 3))
        )
        pi = Permutation(swaps)
        lhs = obs.fn(s, args)
        rhs = obs.fn(perm_apply(pi, s), tuple(pi(a) for a in args))
        if lhs != rhs:
            return ObsVerdict(False, t + 1, (s, pi, args))
    return ObsVerdict(True, trials)


def check_affine(obs: Observation, trials: int, seed: int | str = 0) -> ObsVerdict:
    """Sampled check that prepending a fresh atom at the least end of the
    state leaves the observation's value unchanged."""
    rng = random.Random(f"{seed}/affine/{obs.name}")
    for t in range(trials):
        s = _sample_state(rng, min_len=max(1, obs.arity))
        args = _sample_args(rng, s, obs.arity)
        unused = [a for a in _POOL if a not in s] or [Atom(len(_POOL))]
        fresh = rng.choice(unused)
        if obs.fn(s.prepend(fresh), args) != obs.fn(s, args):
            return ObsVerdict(False, t + 1, (s, fresh, args))
    return ObsVerdict(True, trials)
