"""Core abstract syntax: atoms, values, expressions, frame stacks, states,
and the permutation action on all of them.

Expressions are kept in reduced (A-normal) form: every destructor and
application argument is a value.  Variable binders (``fun``, ``let``, match
arms, stack frames) are meta-level binders and expressions are compared up
to renaming of them; atoms in ``<a> v`` are *not* meta-level binders and are
always compared literally.
"""

from __future__ import annotations

import itertools
from dataclasses import InitVar, dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union


@dataclass(frozen=True, slots=True, order=True)
class Atom:
    """A dynamically creatable name, identified by its enumeration index."""

    id: int

    def __str__(self) -> str:
        return f"#a{self.id}"


World = frozenset  # finite set of Atom


class Expr:
    """Base class for expressions in reduced form."""

    __slots__ = ()


class Value(Expr):
    """Marker base for the value sub-grammar of expressions."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Value):
    name: str


@dataclass(frozen=True, slots=True)
class Unit(Value):
    pass


@dataclass(frozen=True, slots=True)
class Pair(Value):
    first: Value
    second: Value


@dataclass(frozen=True, slots=True)
class Fun(Value):
    """Recursive function value ``fun(f x = body)``.

    The optional type annotations are consulted only by the type checker;
    they are needed because the type of a recursive function is not
    derivable from its body alone.
    """

    fname: str
    param: str
    body: Expr
    param_type: "object | None" = None
    result_type: "object | None" = None


@dataclass(frozen=True, slots=True)
class Con(Value):
    con: str
    arg: Value


@dataclass(frozen=True, slots=True)
class AtomLit(Value):
    atom: Atom


@dataclass(frozen=True, slots=True)
class Bind(Value):
    """Atom-binding value ``<name_part> body_part``; name_part has type atm."""

    name_part: Value
    body_part: Value


@dataclass(frozen=True, slots=True)
class Let(Expr):
    var: str
    bound: Expr
    body: Expr


@dataclass(frozen=True, slots=True)
class Fst(Expr):
    arg: Value


@dataclass(frozen=True, slots=True)
class Snd(Expr):
    arg: Value


@dataclass(frozen=True, slots=True)
class App(Expr):
    fn: Value
    arg: Value


@dataclass(frozen=True, slots=True)
class Arm:
    con: str
    var: str
    body: Expr


@dataclass(frozen=True, slots=True)
class Match(Expr):
    scrutinee: Value
    arms: tuple[Arm, ...]


@dataclass(frozen=True, slots=True)
class Fresh(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Unbind(Expr):
    arg: Value


@dataclass(frozen=True, slots=True)
class ObsApp(Expr):
    obs: str
    args: tuple[Value, ...]


@dataclass(frozen=True, slots=True)
class Frame:
    """One let-continuation frame ``(var. body)``; var is bound in body."""

    var: str
    body: Expr


@dataclass(frozen=True, slots=True)
class FrameStack:
    """Stack of frames; the rightmost (last) frame receives the value first."""

    frames: tuple[Frame, ...] = ()

    def push(self, frame: Frame) -> "FrameStack":
        return FrameStack(self.frames + (frame,))

    def pop(self) -> tuple["FrameStack", Frame]:
        return FrameStack(self.frames[:-1]), self.frames[-1]

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)


ID = FrameStack()


@dataclass(frozen=True, slots=True)
class State:
    """Ordered list of the distinct atoms allocated so far."""

    atoms: tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError(f"state atoms must be pairwise distinct: {self}")

    @classmethod
    def of_ids(cls, *ids: int) -> "State":
        return cls(tuple(Atom(i) for i in ids))

    def append(self, atom: Atom) -> "State":
        """s (+) a: add a fresh atom at the right-hand (largest) end."""
        return State(self.atoms + (atom,))

    def prepend(self, atom: Atom) -> "State":
        """a (<) s: add a fresh atom at the left-hand (least) end."""
        return State((atom,) + self.atoms)

    def index(self, atom: Atom) -> int:
        return self.atoms.index(atom)

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.atoms) + "]"


@dataclass(frozen=True)
class Configuration:
    """Machine configuration <state, stack, expr>.

    Well-formedness (all atoms of the stack and expression occur in the
    state) is checked at construction unless ``validate=False``; the machine
    preserves it along transitions.
    """

    state: State
    stack: FrameStack
    expr: Expr
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        if validate:
            escaped = atoms_of(self.stack, self.expr) - atoms_of(self.state)
            if escaped:
                names = ",".join(sorted(str(a) for a in escaped))
                raise ValueError(f"configuration atoms escape the state: {names}")


@dataclass(frozen=True, slots=True)
class Permutation:
    """Finite permutation of atoms, stored as transpositions applied in order."""

    swaps: tuple[tuple[Atom, Atom], ...] = ()

    def __call__(self, atom: Atom) -> Atom:
        for a, b in self.swaps:
            if atom == a:
                atom = b
            elif atom == b:
                atom = a
        return atom

    @classmethod
    def swap(cls, a: Atom, b: Atom) -> "Permutation":
        return cls(((a, b),))

    def inverse(self) -> "Permutation":
        return Permutation(tuple(reversed(self.swaps)))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(a) == self(other(a))."""
        return Permutation(other.swaps + self.swaps)

    def support(self) -> World:
        touched = {a for pair in self.swaps for a in pair}
        return frozenset(a for a in touched if self(a) != a)


IDENTITY = Permutation()


Term = Union[Expr, Frame, FrameStack, State, Configuration]


def atoms_of(*items: object) -> World:
    """The set of atoms occurring syntactically in the given pieces."""
    out: set[Atom] = set()
    todo: list[object] = list(items)
    while todo:
        x = todo.pop()
        match x:
            case Atom():
                out.add(x)
            case AtomLit(a):
                out.add(a)
            case Var(_) | Unit() | Fresh():
                pass
            case Pair(a, b) | Bind(a, b):
                todo += (a, b)
            case Fun(_, _, body):
                todo.append(body)
            case Con(_, v) | Fst(v) | Snd(v) | Unbind(v):
                todo.append(v)
            case Let(_, e1, e2):
                todo += (e1, e2)
            case App(f, a):
                todo += (f, a)
            case Match(v, arms):
                todo.append(v)
                todo += [arm.body for arm in arms]
            case ObsApp(_, args):
                todo += args
            case Frame(_, body):
                todo.append(body)
            case FrameStack(frames):
                todo += frames
            case State(atoms):
                out.update(atoms)
            case Configuration():
                todo += (x.state, x.stack, x.expr)
            case tuple() | list() | set() | frozenset():
                todo += x
            case _:
                raise TypeError(f"cannot collect atoms from {type(x).__name__}")
    return frozenset(out)


def free_vars(e: object) -> frozenset[str]:
    """Free variables, respecting the four variable-binding constructs."""
    match e:
        case Var(x):
            return frozenset((x,))
        case Unit() | AtomLit(_) | Fresh():
            return frozenset()
        case Pair(a, b) | Bind(a, b):
            return free_vars(a) | free_vars(b)
        case Fun(f, x, body):
            return free_vars(body) - {f, x}
        case Con(_, v) | Fst(v) | Snd(v) | Unbind(v):
            return free_vars(v)
        case Let(x, e1, e2):
            return free_vars(e1) | (free_vars(e2) - {x})
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Match(v, arms):
            out = set(free_vars(v))
            for arm in arms:
                out |= free_vars(arm.body) - {arm.var}
            return frozenset(out)
        case ObsApp(_, args):
            out = set()
            for v in args:
                out |= free_vars(v)
            return frozenset(out)
        case Frame(x, body):
            return free_vars(body) - {x}
        case FrameStack(frames):
            out = set()
            for fr in frames:
                out |= free_vars(fr)
            return frozenset(out)
        case _:
            raise TypeError(f"cannot collect variables from {type(e).__name__}")


def fresh_var(base: str, used: Iterable[str]) -> str:
    """A variable name not in `used`, derived from `base`."""
    taken = set(used)
    if base not in taken:
        return base
    for i in itertools.count(1):
        cand = f"{base}_{i}"
        if cand not in taken:
            return cand
    raise AssertionError("unreachable")


def substitute(e: Expr, bindings: Mapping[str, Value] | Iterable[tuple[str, Value]]) -> Expr:
    """Simultaneous, capture-avoiding substitution of values for variables.

    Capture avoidance applies to variable binders only; atoms are copied
    verbatim, so substitution under ``<a> -`` may capture atoms by design.
    """
    subst = dict(bindings)
    if not subst:
        return e
    avoid: frozenset[str] = frozenset()
    for v in subst.values():
        avoid |= free_vars(v)
    return _subst(e, subst, avoid)


def _subst_binder(
    binders: tuple[str, ...],
    body: Expr,
    subst: dict[str, Value],
    avoid: frozenset[str],
) -> tuple[tuple[str, ...], Expr]:
    inner = {k: v for k, v in subst.items() if k not in binders}
    renames: dict[str, Value] = {}
    new_binders: list[str] = []
    for b in binders:
        if inner and b in avoid:
            nb = fresh_var(b, avoid | free_vars(body) | set(inner) | set(new_binders))
            renames[b] = Var(nb)
            new_binders.append(nb)
        else:
            new_binders.append(b)
    if renames:
        body = _subst(body, renames, frozenset(v.name for v in renames.values()))
    if inner:
        body = _subst(body, inner, avoid)
    return tuple(new_binders), body


def _subst(e: Expr, subst: dict[str, Value], avoid: frozenset[str]) -> Expr:
    match e:
        case Var(x):
            return subst.get(x, e)
        case Unit() | AtomLit(_) | Fresh():
            return e
        case Pair(a, b):
            return Pair(_subst(a, subst, avoid), _subst(b, subst, avoid))
        case Bind(a, b):
            return Bind(_subst(a, subst, avoid), _subst(b, subst, avoid))
        case Fun(f, x, body, pty, rty):
            (nf, nx), nbody = _subst_binder((f, x), body, subst, avoid)
            return Fun(nf, nx, nbody, pty, rty)
        case Con(c, v):
            return Con(c, _subst(v, subst, avoid))
        case Fst(v):
            return Fst(_subst(v, subst, avoid))
        case Snd(v):
            return Snd(_subst(v, subst, avoid))
        case Unbind(v):
            return Unbind(_subst(v, subst, avoid))
        case Let(x, e1, e2):
            ne1 = _subst(e1, subst, avoid)
            (nx,), ne2 = _subst_binder((x,), e2, subst, avoid)
            return Let(nx, ne1, ne2)
        case App(f, a):
            return App(_subst(f, subst, avoid), _subst(a, subst, avoid))
        case Match(v, arms):
            nv = _subst(v, subst, avoid)
            new_arms = []
            for arm in arms:
                (nx,), nbody = _subst_binder((arm.var,), arm.body, subst, avoid)
                new_arms.append(Arm(arm.con, nx, nbody))
            return Match(nv, tuple(new_arms))
        case ObsApp(o, args):
            return ObsApp(o, tuple(_subst(v, subst, avoid) for v in args))
        case _:
            raise TypeError(f"cannot substitute in {type(e).__name__}")


def map_atoms(e, fn: Callable[[Atom], Atom]):
    """Rebuild a term applying `fn` to every atom occurrence."""
    match e:
        case AtomLit(a):
            return AtomLit(fn(a))
        case Var(_) | Unit() | Fresh():
            return e
        case Pair(a, b):
            return Pair(map_atoms(a, fn), map_atoms(b, fn))
        case Bind(a, b):
            return Bind(map_atoms(a, fn), map_atoms(b, fn))
        case Fun(f, x, body, pty, rty):
            return Fun(f, x, map_atoms(body, fn), pty, rty)
        case Con(c, v):
            return Con(c, map_atoms(v, fn))
        case Fst(v):
            return Fst(map_atoms(v, fn))
        case Snd(v):
            return Snd(map_atoms(v, fn))
        case Unbind(v):
            return Unbind(map_atoms(v, fn))
        case Let(x, e1, e2):
            return Let(x, map_atoms(e1, fn), map_atoms(e2, fn))
        case App(f, a):
            return App(map_atoms(f, fn), map_atoms(a, fn))
        case Match(v, arms):
            return Match(
                map_atoms(v, fn),
                tuple(Arm(a.con, a.var, map_atoms(a.body, fn)) for a in arms),
            )
        case ObsApp(o, args):
            return ObsApp(o, tuple(map_atoms(v, fn) for v in args))
        case Frame(x, body):
            return Frame(x, map_atoms(body, fn))
        case FrameStack(frames):
            return FrameStack(tuple(map_atoms(fr, fn) for fr in frames))
        case _:
            raise TypeError(f"cannot map atoms over {type(e).__name__}")


def rename_atom(v, old: Atom, new: Atom):
    """Replace every literal occurrence of `old` by `new`."""
    return map_atoms(v, lambda a: new if a == old else a)


def perm_apply(pi: Permutation, x):
    """Apply a permutation to every atom occurrence in `x`."""
    if isinstance(x, Atom):
        return pi(x)
    if isinstance(x, State):
        return State(tuple(pi(a) for a in x.atoms))
    if isinstance(x, (frozenset, set)):
        return frozenset(pi(a) for a in x)
    if isinstance(x, Configuration):
        return Configuration(
            perm_apply(pi, x.state),
            perm_apply(pi, x.stack),
            perm_apply(pi, x.expr),
            validate=False,
        )
    if isinstance(x, (Expr, Frame, FrameStack)):
        return map_atoms(x, pi)
    if isinstance(x, tuple):
        return tuple(perm_apply(pi, y) for y in x)
    raise TypeError(f"cannot permute {type(x).__name__}")


def nat_value(n: int) -> Value:
    """The closed numeral of type nat for n."""
    if n < 0:
        raise ValueError("numerals are non-negative")
    v: Value = Con("Zero", Unit())
    for _ in range(n):
        v = Con("Succ", v)
    return v


def value_to_int(v: Value) -> int | None:
    """Decode a numeral; None if v is not one."""
    n = 0
    while True:
        match v:
            case Con("Zero", Unit()):
                return n
            case Con("Succ", inner):
                n += 1
                v = inner
            case _:
                return None


def canonical(e):
    """Rename bound variables to a canonical numbering (atoms untouched)."""
    counter = itertools.count()

    def bind(env: dict[str, str], names: tuple[str, ...]) -> tuple[dict[str, str], tuple[str, ...]]:
        new = dict(env)
        out = []
        for n in names:
            c = f"%c{next(counter)}"
            new[n] = c
            out.append(c)
        return new, tuple(out)

    def go(e, env: dict[str, str]):
        match e:
            case Var(x):
                return Var(env.get(x, x))
            case Unit() | AtomLit(_) | Fresh():
                return e
            case Pair(a, b):
                return Pair(go(a, env), go(b, env))
            case Bind(a, b):
                return Bind(go(a, env), go(b, env))
            case Fun(f, x, body, pty, rty):
                env2, (nf, nx) = bind(env, (f, x))
                return Fun(nf, nx, go(body, env2), pty, rty)
            case Con(c, v):
                return Con(c, go(v, env))
            case Fst(v):
                return Fst(go(v, env))
            case Snd(v):
                return Snd(go(v, env))
            case Unbind(v):
                return Unbind(go(v, env))
            case Let(x, e1, e2):
                ne1 = go(e1, env)
                env2, (nx,) = bind(env, (x,))
                return Let(nx, ne1, go(e2, env2))
            case App(f, a):
                return App(go(f, env), go(a, env))
            case Match(v, arms):
                nv = go(v, env)
                out = []
                for arm in arms:
                    env2, (nx,) = bind(env, (arm.var,))
                    out.append(Arm(arm.con, nx, go(arm.body, env2)))
                return Match(nv, tuple(out))
            case ObsApp(o, args):
                return ObsApp(o, tuple(go(v, env) for v in args))
            case Frame(x, body):
                env2, (nx,) = bind(env, (x,))
                return Frame(nx, go(body, env2))
            case FrameStack(frames):
                return FrameStack(tuple(go(fr, env) for fr in frames))
            case _:
                raise TypeError(f"cannot canonicalise {type(e).__name__}")

    return go(e, {})


def expr_alpha_eq(e1, e2) -> bool:
    """Structural equality up to renaming of bound variables."""
    return canonical(e1) == canonical(e2)


def is_reduced(e: Expr) -> bool:
    """The reduced-grammar predicate: every value position holds a value."""
    match e:
        case Var(_) | Unit() | AtomLit(_) | Fresh():
            return True
        case Pair(a, b) | Bind(a, b):
            return all(isinstance(v, Value) and is_reduced(v) for v in (a, b))
        case Fun(_, _, body):
            return is_reduced(body)
        case Con(_, v) | Fst(v) | Snd(v) | Unbind(v):
            return isinstance(v, Value) and is_reduced(v)
        case Let(_, e1, e2):
            return is_reduced(e1) and is_reduced(e2)
        case App(f, a):
            return all(isinstance(v, Value) and is_reduced(v) for v in (f, a))
        case Match(v, arms):
            return (
                isinstance(v, Value)
                and is_reduced(v)
                and all(is_reduced(arm.body) for arm in arms)
            )
        case ObsApp(_, args):
            return all(isinstance(v, Value) and is_reduced(v) for v in args)
        case _:
            return False
