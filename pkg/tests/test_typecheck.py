import random

import pytest

from freshbind import (
    App,
    Atom,
    AtomLit,
    Bind,
    Con,
    Configuration,
    Frame,
    FrameStack,
    Fresh,
    Fun,
    ID,
    ObsApp,
    Pair,
    Permutation,
    State,
    Unbind,
    Unit,
    Var,
    check_config,
    check_expr,
    check_stack,
    is_nominal_arity,
    make_signature,
    perm_apply,
    substitute,
)
from freshbind.errors import (
    ArityError,
    AtomEscape,
    DuplicateConstructor,
    NonExhaustiveMatch,
    TypingError,
    UnboundVariable,
    UndeclaredType,
)
from freshbind.nominal import TERM
from freshbind.typecheck import (
    ATM,
    EMPTY_ENV,
    NAT,
    TBnd,
    TData,
    TFun,
    TProd,
    TUnit,
    UNIT,
    TypingEnv,
)


def test_fresh_types_as_atm(lamsig):
    assert check_expr(lamsig, EMPTY_ENV, Fresh()) == ATM


def test_binding_types_as_bnd(lamsig):
    v = Bind(AtomLit(Atom(0)), Unit())
    assert check_expr(lamsig, EMPTY_ENV, v) == TBnd(UNIT)


def test_observation_arity_mismatch(lamsig):
    with pytest.raises(ArityError):
        check_expr(lamsig, EMPTY_ENV, ObsApp("eq", (AtomLit(Atom(0)),)))


def test_unbound_variable(lamsig):
    with pytest.raises(UnboundVariable):
        check_expr(lamsig, EMPTY_ENV, Var("nope"))


def test_match_requires_all_constructors(lamsig):
    from freshbind.syntax import Arm, Match

    v = Con("Zero", Unit())
    with pytest.raises(NonExhaustiveMatch):
        check_expr(lamsig, EMPTY_ENV, Match(v, (Arm("Zero", "x", Unit()),)))


def test_match_arms_any_order(lamsig):
    from freshbind.syntax import Arm, Match

    v = Con("Zero", Unit())
    e = Match(v, (Arm("Succ", "x", Unit()), Arm("Zero", "y", Unit())))
    assert check_expr(lamsig, EMPTY_ENV, e) == UNIT


def test_match_arms_must_agree(lamsig):
    from freshbind.syntax import Arm, Match

    v = Con("Zero", Unit())
    e = Match(v, (Arm("Zero", "x", Unit()), Arm("Succ", "y", AtomLit(Atom(0)))))
    with pytest.raises(TypingError):
        check_expr(lamsig, EMPTY_ENV, e)


def test_fun_needs_annotations_only_when_recursive(lamsig):
    lam = Fun("%f", "x", Var("x"), ATM, None)
    assert check_expr(lamsig, EMPTY_ENV, lam) == TFun(ATM, ATM)
    recursive = Fun("f", "x", App(Var("f"), Var("x")), ATM, None)
    with pytest.raises(TypingError):
        check_expr(lamsig, EMPTY_ENV, recursive)
    annotated = Fun("f", "x", App(Var("f"), Var("x")), ATM, NAT)
    assert check_expr(lamsig, EMPTY_ENV, annotated) == TFun(ATM, NAT)


def test_check_stack_id_is_polymorphic(lamsig):
    assert check_stack(lamsig, EMPTY_ENV, ID, NAT) == NAT


def test_check_stack_frame_rule(lamsig):
    stack = FrameStack((Frame("x", Pair(Var("x"), Var("x"))),))
    assert check_stack(lamsig, EMPTY_ENV, stack, ATM) == TProd(ATM, ATM)


def test_check_stack_unbound(lamsig):
    stack = FrameStack((Frame("x", Var("y")),))
    with pytest.raises(UnboundVariable):
        check_stack(lamsig, EMPTY_ENV, stack, ATM)


def test_check_config_empty(lamsig):
    w, ty = check_config(lamsig, Configuration(State(()), ID, Unit()))
    assert w == frozenset() and ty == UNIT


def test_check_config_unbind(lamsig):
    cfg = Configuration(
        State((Atom(0),)), ID, Unbind(Bind(AtomLit(Atom(0)), Con("V", AtomLit(Atom(0)))))
    )
    w, ty = check_config(lamsig, cfg)
    assert w == {Atom(0)}
    assert ty == TProd(ATM, TERM)


def test_check_config_atom_escape(lamsig):
    cfg = Configuration(State(()), ID, AtomLit(Atom(0)), validate=False)
    with pytest.raises(AtomEscape):
        check_config(lamsig, cfg)


def test_nominal_arity_grammar(lamsig):
    assert is_nominal_arity(lamsig, TProd(TBnd(ATM), NAT))
    assert not is_nominal_arity(lamsig, TFun(ATM, ATM))
    assert is_nominal_arity(lamsig, UNIT)


def test_signature_lambda_terms_is_nominal(lamsig):
    assert lamsig.is_nominal
    assert dict(lamsig.constructors_of("term"))["L"] == TBnd(TERM)


def test_signature_function_argument_not_nominal():
    sig = make_signature(
        [("odd", (("Mk", TFun(ATM, ATM)),))], check_observations=False
    )
    assert not sig.is_nominal


def test_signature_duplicate_constructor():
    with pytest.raises(DuplicateConstructor):
        make_signature(
            [("t", (("C", UNIT), ("C", ATM)))], check_observations=False
        )


def test_signature_undeclared_type():
    with pytest.raises(UndeclaredType):
        make_signature([("t", (("C", TData("ghost")),))], check_observations=False)


def test_signature_always_has_nat_and_eq(lamsig):
    assert lamsig.has_datatype("nat")
    assert dict(lamsig.constructors_of("nat")) == {"Zero": UNIT, "Succ": NAT}
    assert "eq" in lamsig.obs_names()


def test_env_extension_rejects_shadowing():
    env = TypingEnv({"x": ATM})
    with pytest.raises(TypingError):
        env.extend("x", NAT)


def test_checker_renames_shadowed_binders(lamsig):
    from freshbind.syntax import Let

    e = Let("x", Unit(), Let("x", Fresh(), Var("x")))
    assert check_expr(lamsig, EMPTY_ENV, e) == ATM


def test_value_positions_must_hold_values(lamsig):
    # Fresh() inside a pair violates reduced form and is rejected
    e = Bind(AtomLit(Atom(0)), Pair(Unit(), Fresh()))
    with pytest.raises(TypingError):
        check_expr(lamsig, EMPTY_ENV, e)


def test_rechecking_returns_same_type(lamsig):
    e = Unbind(Bind(AtomLit(Atom(0)), Con("V", AtomLit(Atom(0)))))
    first = check_expr(lamsig, EMPTY_ENV, e)
    assert check_expr(lamsig, EMPTY_ENV, e) == first


def test_typing_weakening_sampled(lamsig):
    from freshbind.harness import gen_expr, rand_type

    for i in range(100):
        rng = random.Random(f"weaken{i}")
        w = frozenset(Atom(j) for j in range(3))
        ty = rand_type(lamsig, rng, 1)
        e = gen_expr(lamsig, (), ty, w, rng.randint(1, 4), rng)
        assert check_expr(lamsig, EMPTY_ENV, e) == ty
        extended = TypingEnv({"%unused": rand_type(lamsig, rng, 1)})
        assert check_expr(lamsig, extended, e) == ty


def test_typing_substitution_sampled(lamsig):
    from freshbind.harness import gen_any_value, gen_expr, rand_type

    for i in range(100):
        rng = random.Random(f"tysub{i}")
        w = frozenset(Atom(j) for j in range(3))
        vty = rand_type(lamsig, rng, 1)
        ty = rand_type(lamsig, rng, 1)
        v = gen_any_value(lamsig, vty, w, rng)
        e = gen_expr(lamsig, (("x", vty),), ty, w, rng.randint(1, 4), rng)
        assert check_expr(lamsig, TypingEnv({"x": vty}), e) == ty
        assert check_expr(lamsig, EMPTY_ENV, substitute(e, {"x": v})) == ty


def test_typing_equivariance_sampled(lamsig):
    from freshbind.harness import gen_expr, rand_type

    pool = [Atom(j) for j in range(8)]
    for i in range(100):
        rng = random.Random(f"tyequi{i}")
        w = frozenset(pool[:4])
        ty = rand_type(lamsig, rng, 1)
        e = gen_expr(lamsig, (), ty, w, rng.randint(1, 4), rng)
        pi = Permutation(tuple(tuple(rng.sample(pool, 2)) for _ in range(2)))
        assert check_expr(lamsig, EMPTY_ENV, perm_apply(pi, e)) == ty
