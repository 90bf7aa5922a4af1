import pytest

from freshbind import (
    Atom,
    State,
    check_affine,
    check_equivariance,
    eval_obs,
)
from freshbind.errors import ArityError, AtomEscape, ObsDeclarationError
from freshbind.observations import (
    CARD,
    EQ,
    LT,
    ORD,
    RAW_INDEX,
    Observation,
    builtin_registry,
)
from freshbind.typecheck import make_signature


def a(i):
    return Atom(i)


def s(*ids):
    return State(tuple(Atom(i) for i in ids))


def test_eq_zero_means_equal():
    assert eval_obs(EQ, s(0, 1), (a(0), a(0))) == 0
    assert eval_obs(EQ, s(0, 1), (a(0), a(1))) == 1


def test_lt_uses_state_positions():
    assert eval_obs(LT, s(0, 1), (a(0), a(1))) == 0
    assert eval_obs(LT, s(0, 1), (a(1), a(0))) == 1


def test_ord_is_zero_indexed():
    assert eval_obs(ORD, s(5, 2), (a(2),)) == 1
    assert eval_obs(ORD, s(5, 2), (a(5),)) == 0


def test_card_counts_state():
    assert eval_obs(CARD, s(0, 1), ()) == 2
    assert eval_obs(CARD, s(), ()) == 0


def test_raw_index_reads_enumeration():
    assert eval_obs(RAW_INDEX, s(7), (a(7),)) == 7


def test_eval_obs_arity_and_escape_errors():
    with pytest.raises(ArityError):
        eval_obs(EQ, s(0), (a(0),))
    with pytest.raises(AtomEscape):
        eval_obs(EQ, s(0), (a(0), a(9)))


def test_builtin_registry_contents_and_flags():
    flags = {
        o.name: (o.declared_equivariant, o.declared_affine) for o in builtin_registry()
    }
    assert flags == {
        "eq": (True, True),
        "lt": (True, True),
        "ord": (True, False),
        "card": (True, False),
        "raw_index": (False, False),
    }
    arities = {o.name: o.arity for o in builtin_registry()}
    assert arities == {"eq": 2, "lt": 2, "ord": 1, "card": 0, "raw_index": 1}


def test_equivariance_passes_for_builtins():
    for obs in (EQ, LT, ORD, CARD):
        assert check_equivariance(obs, 1000, seed=5).passed


def test_equivariance_fails_for_raw_index():
    verdict = check_equivariance(RAW_INDEX, 1000, seed=5)
    assert not verdict.passed
    state, pi, args = verdict.counterexample
    assert RAW_INDEX.fn(state, args) != RAW_INDEX.fn(
        State(tuple(pi(x) for x in state)), tuple(pi(x) for x in args)
    )


def test_affine_flags_match_sampled_checks():
    assert check_affine(EQ, 1000, seed=5).passed
    assert check_affine(LT, 1000, seed=5).passed
    assert not check_affine(ORD, 100, seed=5).passed
    assert not check_affine(CARD, 1, seed=5).passed


def test_registration_aborts_on_false_equivariance_claim():
    bogus = Observation(
        "bogus", 1, lambda st, args: args[0].id, declared_equivariant=True
    )
    with pytest.raises(ObsDeclarationError):
        make_signature(observations=(bogus,))


def test_registration_aborts_on_false_affine_claim():
    bogus = Observation(
        "bogus2", 0, lambda st, args: len(st),
        declared_equivariant=True, declared_affine=True,
    )
    with pytest.raises(ObsDeclarationError):
        make_signature(observations=(bogus,))


def test_registry_always_contains_eq():
    sig = make_signature(observations=(LT,), check_observations=False)
    assert "eq" in sig.obs_names()
