import random

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
    FuelExhausted,
    Fun,
    ID,
    Let,
    ObsApp,
    Pair,
    State,
    Stuck,
    Terminated,
    Unbind,
    Unit,
    Var,
    desugar,
    expr_alpha_eq,
    fresh_atom,
    fresh_atom_largest,
    nat_value,
    parse,
    run,
    stack_apply,
    step,
    substitute,
    trace,
)
from freshbind.derived import diverge_expr
from freshbind.machine import Next, Terminal
from freshbind.typecheck import ATM, TBnd, UNIT


def a(i):
    return Atom(i)


def al(i):
    return AtomLit(Atom(i))


def test_fresh_atom_least_unused():
    assert fresh_atom(State(())) == a(0)
    assert fresh_atom(State((a(0), a(1)))) == a(2)
    assert fresh_atom(State((a(1),))) == a(0)


def test_fresh_atom_largest():
    assert fresh_atom_largest(State((a(1),))) == a(2)
    assert fresh_atom_largest(State(())) == a(0)


def test_step_unbind_allocates_and_renames(lamsig):
    cfg = Configuration(
        State((a(0),)), ID, Unbind(Bind(al(0), Con("V", al(0))))
    )
    result = step(lamsig, cfg)
    assert isinstance(result, Next)
    after = result.config
    assert after.state == State((a(0), a(1)))
    assert after.expr == Pair(al(1), Con("V", al(1)))
    assert len(after.stack) == 0


def test_step_frame_pop(lamsig):
    cfg = Configuration(State(()), FrameStack((Frame("x", Var("x")),)), Unit())
    result = step(lamsig, cfg)
    assert isinstance(result, Next)
    assert result.config.expr == Unit()
    assert len(result.config.stack) == 0


def test_step_observation_lt(lamsig_affine):
    cfg = Configuration(State((a(0), a(1))), ID, ObsApp("lt", (al(0), al(1))))
    result = step(lamsig_affine, cfg)
    assert isinstance(result, Next)
    assert result.config.expr == nat_value(0)


def test_step_terminal(lamsig):
    assert isinstance(step(lamsig, Configuration(State(()), ID, Unit())), Terminal)


def test_run_value_terminates_in_zero_steps(lamsig):
    out = run(lamsig, Configuration(State(()), ID, Unit()), 10)
    assert out == Terminated(0, State(()), Unit())


def test_run_diverges_on_fuel(lamsig):
    out = run(lamsig, Configuration(State(()), ID, diverge_expr(UNIT)), 100)
    assert isinstance(out, FuelExhausted)
    assert out.steps_run == 100


def test_run_reports_cycle_without_spinning(lamsig):
    out = run(lamsig, Configuration(State(()), ID, diverge_expr(UNIT)), 10_000_000)
    assert isinstance(out, FuelExhausted)
    assert out.cycle_detected


def test_capture_experiment(lamsig):
    # the object-level binding distinguisher: capture gives 0, no capture 1
    context = desugar(parse("let <x1>x2 = %hole #a0 in @eq x1 x2"))
    state = State((a(0), a(1)))
    for bound, expected in ((0, 0), (1, 1)):
        hole = Fun("f", "x", Bind(al(bound), Var("x")), ATM, TBnd(ATM))
        program = substitute(context, {"%hole": hole})
        out = run(lamsig, Configuration(state, ID, program), 100)
        assert isinstance(out, Terminated)
        assert out.value == nat_value(expected)


def test_trace_of_terminal_is_singleton(lamsig):
    cfg = Configuration(State(()), ID, Unit())
    assert trace(lamsig, cfg, 10) == [cfg]


def test_trace_length_matches_step_count(lamsig):
    context = desugar(parse("let <x1>x2 = %hole #a0 in @eq x1 x2"))
    hole = Fun("f", "x", Bind(al(0), Var("x")), ATM, TBnd(ATM))
    program = substitute(context, {"%hole": hole})
    cfg = Configuration(State((a(0), a(1))), ID, program)
    out = run(lamsig, cfg, 100)
    assert len(trace(lamsig, cfg, 100)) == out.steps + 1


def test_trace_of_unbind_step():
    from freshbind import lambda_signature

    sig = lambda_signature()
    cfg = Configuration(State((a(0),)), ID, Unbind(Bind(al(0), Con("V", al(0)))))
    assert len(trace(sig, cfg, 10)) == 2


def test_stack_apply_identity():
    e = Fresh()
    assert stack_apply(ID, e) == e


def test_stack_apply_single_frame():
    stack = FrameStack((Frame("x", Var("x")),))
    assert stack_apply(stack, Fresh()) == Let("x", Fresh(), Var("x"))


def test_stack_apply_order():
    stack = FrameStack((Frame("x1", Var("e1")), Frame("x2", Var("e2"))))
    # the top (rightmost) frame is the innermost let
    assert stack_apply(stack, Unit()) == Let(
        "x1", Let("x2", Unit(), Var("e2")), Var("e1")
    )


def test_stack_apply_termination_correspondence(lamsig):
    from freshbind.harness import check_stack_apply_correspondence

    report = check_stack_apply_correspondence(lamsig, 200, 2000, seed=11)
    assert report.ok, report.failures[:3]


def test_run_rechecks_preserved_type(lamsig):
    cfg = Configuration(State((a(0),)), ID, Unbind(Bind(al(0), Con("V", al(0)))))
    out = run(lamsig, cfg, 10, recheck=True)
    assert isinstance(out, Terminated)
    assert out.final_state == State((a(0), a(1)))


def test_machine_determinism(lamsig):
    from freshbind.harness import gen_config

    for i in range(30):
        cfg = gen_config(lamsig, random.Random(f"det{i}"))
        out1 = run(lamsig, cfg, 300, recheck=False)
        out2 = run(lamsig, cfg, 300, recheck=False)
        assert out1 == out2


def test_stuck_unreachable_from_well_typed(lamsig):
    from freshbind.harness import gen_config

    for i in range(100):
        cfg = gen_config(lamsig, random.Random(f"stuck{i}"))
        assert not isinstance(run(lamsig, cfg, 300, recheck=False), Stuck)


def test_machine_preserves_reduced_form(lamsig):
    from freshbind.harness import gen_config
    from freshbind.syntax import is_reduced

    for i in range(30):
        cfg = gen_config(lamsig, random.Random(f"redmach{i}"))
        for point in trace(lamsig, cfg, 100):
            assert is_reduced(point.expr)
            assert all(is_reduced(fr.body) for fr in point.stack)
