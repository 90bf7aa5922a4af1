"""Acceptance suite: one test per criterion, each printing a PASS line with
its sampled budget and elapsed time.  Run with `pytest -s tests/test_acceptance.py`
to see the lines as they complete."""

import random
import time

import pytest

from freshbind import (
    Atom,
    AtomLit,
    Bind,
    Configuration,
    Fun,
    FuelExhausted,
    ID,
    State,
    Terminated,
    Var,
    alpha_eq,
    ciu_test,
    desugar,
    gen_swap,
    gen_value,
    lambda_alpha,
    lambda_signature,
    nat_value,
    parse,
    rep,
    run,
    substitute,
)
from freshbind.harness import (
    check_affine_invariance,
    check_policy_irrelevance,
    check_safety,
    check_stack_apply_correspondence,
    check_termination_equivariance,
    find_affine_violation,
    run_aeq,
    test_example_conjecture as conjecture_suite,
)
from freshbind.nominal import TERM, alpha_variant, gen_lambda_term, lambda_atoms
from freshbind.observations import (
    CARD,
    EQ,
    LT,
    ORD,
    RAW_INDEX,
    check_affine,
    check_equivariance,
)
from freshbind.surface import SApp, SEmbed
from freshbind.syntax import atoms_of
from freshbind.typecheck import ATM, TBnd, is_nominal_arity

FUEL = 10_000


def _report(name: str, detail: str, started: float) -> None:
    print(f"ACCEPTANCE {name} PASS — {detail} [{time.monotonic() - started:.2f}s]")


@pytest.fixture(scope="module")
def lamsig():
    return lambda_signature()


@pytest.fixture(scope="module")
def lamsig_affine():
    return lambda_signature(observations=(EQ, LT))


@pytest.fixture(scope="module")
def lamsig_ord():
    return lambda_signature(observations=(EQ, LT, ORD))


@pytest.fixture(scope="module")
def lamsig_all():
    return lambda_signature(observations=(EQ, LT, ORD, CARD))


def test_c01_object_binding_distinguisher(lamsig):
    started = time.monotonic()
    context = desugar(parse("let <x1>x2 = %hole #a0 in @eq x1 x2"))
    state = State((Atom(0), Atom(1)))
    results = []
    for bound_id in (0, 1):
        hole = Fun("f", "x", Bind(AtomLit(Atom(bound_id)), Var("x")), ATM, TBnd(ATM))
        out = run(lamsig, Configuration(state, ID, substitute(context, {"%hole": hole})), FUEL)
        assert isinstance(out, Terminated)
        results.append(out.value)
    assert results[0] == nat_value(0)
    assert results[1] == nat_value(1)
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    _report("C1", "capture/no-capture evaluate to 0 and 1", started)


def test_c02_position_guard_witness(lamsig_ord):
    started = time.monotonic()
    report = conjecture_suite(lamsig_ord, trials=0, fuel=FUEL, seed=0)
    assert isinstance(report.witness_guarded_outcome, Terminated)
    assert isinstance(report.witness_loop_outcome, FuelExhausted)
    assert report.witness_loop_outcome.steps_run == FUEL
    assert report.witness_ok
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    _report("C2", "state [#a1,#a0] separates the guarded value from the loop", started)


def test_c03_termination_equivariance(lamsig_all):
    started = time.monotonic()
    report = check_termination_equivariance(lamsig_all, 1000, 300, seed=101)
    assert report.ok, report.failures[:3]
    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    _report("C3", f"{report.passed}/{report.total} permuted runs step-identical", started)


def test_c04_type_safety(lamsig_all):
    started = time.monotonic()
    report = check_safety(lamsig_all, 1000, 200, seed=102)
    assert report.ok, report.failures[:3]
    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    _report(
        "C4",
        f"{report.passed}/{report.total} traces: no stuck, type constant, worlds grow",
        started,
    )


def test_c05_affine_state_prepend(lamsig_affine, lamsig_ord):
    started = time.monotonic()
    report = check_affine_invariance(lamsig_affine, 1000, 300, seed=103)
    assert report.ok, report.failures[:3]
    witness = find_affine_violation(lamsig_ord, 200, 300, seed=103)
    assert witness is not None, "ord should break prepend invariance within 200 samples"
    _report(
        "C5",
        f"{report.passed}/{report.total} invariant with eq,lt; "
        f"ord breaks at sample {witness['sample']}",
        started,
    )


def test_c06_observation_checkers():
    started = time.monotonic()
    for obs in (EQ, LT, ORD, CARD):
        assert check_equivariance(obs, 1000, seed=104).passed, obs.name
    raw = check_equivariance(RAW_INDEX, 1000, seed=104)
    assert not raw.passed and raw.trials_run <= 1000
    for obs in (EQ, LT):
        assert check_affine(obs, 100, seed=104).passed, obs.name
    for obs in (ORD, CARD):
        verdict = check_affine(obs, 100, seed=104)
        assert not verdict.passed and verdict.trials_run <= 100, obs.name
    _report("C6", "equivariance eq/lt/ord/card, raw_index refuted; affine eq/lt only", started)


def test_c07_correctness_of_representation(lamsig):
    started = time.monotonic()
    pairs = 200
    trials = 2000
    alpha_pairs = 0
    for i in range(pairs):
        rng = random.Random(f"c7/{i}")
        w = frozenset(Atom(j) for j in range(rng.randint(1, 3)))
        v1 = gen_value(lamsig, TERM, w, rng.randint(2, 6), rng)
        mix = rng.random()
        if mix < 0.3:
            v2 = v1
        elif mix < 0.6:
            v2 = alpha_variant(lamsig, v1, TERM, w, rng)
        else:
            v2 = gen_value(lamsig, TERM, w, rng.randint(2, 6), rng)
        equal = alpha_eq(lamsig, w, v1, v2, TERM)
        if equal:
            alpha_pairs += 1
            result = ciu_test(lamsig, w, v1, v2, TERM, trials, FUEL, seed=f"c7/{i}")
            assert not result.distinguished, (i, result.counterexample)
        else:
            atoms = sorted(w)
            rng.shuffle(atoms)
            got = run_aeq(lamsig, TERM, v1, v2, State(tuple(atoms)), FUEL)
            assert got == 1, (i, got)
    elapsed = time.monotonic() - started
    assert elapsed < 600.0
    _report(
        "C7",
        f"{pairs} pairs at term ({alpha_pairs} alpha-equal, {trials} trials each): "
        "zero violations",
        started,
    )


def test_c08_cross_oracle_agreement(lamsig):
    started = time.monotonic()
    pool = frozenset(Atom(i) for i in range(4))
    agreements = 0
    for i in range(500):
        rng = random.Random(f"c8/{i}")
        t1 = gen_lambda_term(pool, rng.randint(1, 7), rng)
        t2 = (
            gen_lambda_term(pool, rng.randint(1, 7), rng)
            if rng.random() < 0.5
            else t1
        )
        world = lambda_atoms(t1) | lambda_atoms(t2)
        assert lambda_alpha(t1, t2) == alpha_eq(lamsig, world, rep(t1), rep(t2), TERM)
        agreements += 1
    elapsed = time.monotonic() - started
    assert agreements == 500
    assert elapsed < 30.0
    _report("C8", "500/500 lambda-term pairs agree with the de Bruijn oracle", started)


def test_c09_fresh_policy_irrelevance(lamsig_all):
    started = time.monotonic()
    report = check_policy_irrelevance(lamsig_all, 500, 300, seed=109)
    assert report.ok, report.failures[:3]
    _report("C9", f"{report.passed}/{report.total} runs agree across policies", started)


def test_c10_stack_context_correspondence(lamsig_all):
    started = time.monotonic()
    report = check_stack_apply_correspondence(lamsig_all, 200, 2000, seed=110)
    assert report.ok, report.failures[:3]
    deltas = report.details["administrative_deltas"]
    mean = sum(deltas) / len(deltas) if deltas else 0.0
    _report(
        "C10",
        f"{report.passed}/{report.total} verdicts agree; "
        f"mean administrative delta {mean:.2f} steps",
        started,
    )


def test_c11_swap_involution(lamsig):
    from freshbind.harness import rand_type

    started = time.monotonic()
    done = 0
    attempt = 0
    while done < 300:
        rng = random.Random(f"c11/{attempt}")
        attempt += 1
        ty = rand_type(lamsig, rng, 2)
        if not is_nominal_arity(lamsig, ty):
            continue
        w = frozenset(Atom(j) for j in range(3))
        try:
            v = gen_value(lamsig, ty, w, rng.randint(2, 5), rng)
        except Exception:
            continue
        swap = gen_swap(lamsig, ty)
        a, b = AtomLit(Atom(0)), AtomLit(Atom(1))
        once = desugar(
            SApp(SApp(SApp(SEmbed(swap), SEmbed(a)), SEmbed(b)), SEmbed(v))
        )
        state = State((Atom(0), Atom(1), Atom(2)))
        mid = run(lamsig, Configuration(state, ID, once), FUEL, recheck=False)
        assert isinstance(mid, Terminated)
        twice = desugar(
            SApp(SApp(SApp(SEmbed(swap), SEmbed(a)), SEmbed(b)), SEmbed(mid.value))
        )
        out = run(
            lamsig, Configuration(mid.final_state, ID, twice), FUEL, recheck=False
        )
        assert isinstance(out, Terminated)
        assert alpha_eq(lamsig, atoms_of(out.final_state), out.value, v, ty)
        done += 1
    _report("C11", f"{done} double swaps alpha-equal to the original value", started)
