"""A calculus with generative name unbinding: interpreter, type system,
state-dependent observations on names, object-level alpha-equivalence, and
a randomized contextual-equivalence testing harness."""

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
    Permutation,
    Snd,
    State,
    Unbind,
    Unit,
    Value,
    Var,
    World,
    atoms_of,
    expr_alpha_eq,
    free_vars,
    nat_value,
    perm_apply,
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
    check_stack,
    is_nominal_arity,
    make_signature,
    type_to_str,
    validate_signature,
)
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
    trace,
)
from .observations import (
    CARD,
    EQ,
    LT,
    ORD,
    RAW_INDEX,
    Observation,
    builtin_registry,
    check_affine,
    check_equivariance,
    eval_obs,
)
from .surface import desugar
from .concrete import parse, parse_program, parse_type, print_expr
from .nominal import (
    AlphaJudgement,
    LambdaTerm,
    LApp,
    LLam,
    LVar,
    TERM,
    alpha_eq,
    gen_value,
    lambda_alpha,
    lambda_signature,
    rep,
)
from .derived import diverge_expr, gen_aeq, gen_swap
from .harness import (
    CiuResult,
    StackGenSpec,
    ciu_test,
    gen_stack,
    open_ciu_test,
    test_correctness_of_representation,
    test_example_conjecture,
    test_extensionality_bind,
    test_world_sensitivity,
)

__version__ = "0.1.0"
