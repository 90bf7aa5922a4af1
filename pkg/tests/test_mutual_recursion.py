import random

import pytest

from freshbind import (
    Atom,
    AtomLit,
    Bind,
    Con,
    Configuration,
    ID,
    Pair,
    State,
    Terminated,
    Unit,
    alpha_eq,
    check_expr,
    desugar,
    gen_aeq,
    gen_swap,
    gen_value,
    parse_program,
    run,
)
from freshbind.errors import UndeclaredType
from freshbind.harness import run_aeq
from freshbind.nominal import alpha_variant
from freshbind.surface import SApp, SEmbed
from freshbind.syntax import Fun, Var, atoms_of
from freshbind.typecheck import (
    ATM,
    EMPTY_ENV,
    NAT,
    TBnd,
    TData,
    TFun,
    TProd,
    TUnit,
    make_signature,
)

TREE = TData("tree")
FOREST = TData("forest")


@pytest.fixture(scope="module")
def mutual_sig():
    # two data types referring to each other; binding inside one of them
    return make_signature(
        [
            ("tree", (("Leaf", ATM), ("Node", TBnd(FOREST)))),
            ("forest", (("Stop", TUnit()), ("Grow", TProd(TREE, FOREST)))),
        ],
        check_observations=False,
    )


def test_mutual_signature_is_nominal(mutual_sig):
    assert mutual_sig.is_nominal


def test_parse_and_joined_declaration():
    program = parse_program(
        "type tree = Leaf of atm | Node of forest bnd "
        "and forest = Stop of unit | Grow of tree * forest ;\n"
        "Leaf #a0"
    )
    assert program.signature.has_datatype("tree")
    assert program.signature.has_datatype("forest")
    assert check_expr(program.signature, EMPTY_ENV, desugar(program.body)) == TREE


def test_swap_type_checks_on_mutual_recursion(mutual_sig):
    for ty in (TREE, FOREST):
        e = gen_swap(mutual_sig, ty)
        assert check_expr(mutual_sig, EMPTY_ENV, e) == TFun(
            ATM, TFun(ATM, TFun(ty, ty))
        )


def test_aeq_type_checks_on_mutual_recursion(mutual_sig):
    for ty in (TREE, FOREST):
        e = gen_aeq(mutual_sig, ty)
        assert check_expr(mutual_sig, EMPTY_ENV, e) == TFun(ty, TFun(ty, NAT))


def test_swap_evaluates_through_both_types(mutual_sig):
    # swapping atoms inside a tree that nests a forest that nests a tree
    v = Con(
        "Node",
        Bind(
            AtomLit(Atom(0)),
            Con("Grow", Pair(Con("Leaf", AtomLit(Atom(1))), Con("Stop", Unit()))),
        ),
    )
    swap = gen_swap(mutual_sig, TREE)
    e = desugar(
        SApp(
            SApp(SApp(SEmbed(swap), SEmbed(AtomLit(Atom(0)))), SEmbed(AtomLit(Atom(1)))),
            SEmbed(v),
        )
    )
    out = run(mutual_sig, Configuration(State.of_ids(0, 1), ID, e), 10_000)
    assert isinstance(out, Terminated)
    # bound atom is freshened on the way through; compare up to alpha
    expected = Con(
        "Node",
        Bind(
            AtomLit(Atom(1)),
            Con("Grow", Pair(Con("Leaf", AtomLit(Atom(0))), Con("Stop", Unit()))),
        ),
    )
    assert alpha_eq(
        mutual_sig, atoms_of(out.final_state), out.value, expected, TREE
    )


def test_aeq_agrees_with_alpha_eq_on_mutual_recursion(mutual_sig):
    w = frozenset((Atom(0), Atom(1)))
    for i in range(60):
        rng = random.Random(f"mut{i}")
        ty = TREE if rng.random() < 0.5 else FOREST
        v1 = gen_value(mutual_sig, ty, w, rng.randint(2, 7), rng)
        if rng.random() < 0.5:
            v2 = alpha_variant(mutual_sig, v1, ty, w, rng)
        else:
            v2 = gen_value(mutual_sig, ty, w, rng.randint(2, 7), rng)
        expected = 0 if alpha_eq(mutual_sig, w, v1, v2, ty) else 1
        assert run_aeq(mutual_sig, ty, v1, v2, State.of_ids(0, 1), 50_000) == expected


def test_annotations_must_use_declared_types(mutual_sig):
    ghost = Fun("f", "x", Var("x"), TData("ghost"), None)
    with pytest.raises(UndeclaredType):
        check_expr(mutual_sig, EMPTY_ENV, ghost)


def test_correctness_of_representation_on_mutual_signature(mutual_sig):
    from freshbind import test_correctness_of_representation as correctness_suite

    report = correctness_suite(
        mutual_sig, TREE, pairs=30, trials=120, fuel=5000, seed=17
    )
    assert report.ok, report.violations[:3]
    assert 0 < report.alpha_equal < report.pairs
