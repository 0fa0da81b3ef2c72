"""Compositional model-based testing for labelled transition systems."""

from .composition import NotComposable, collect_tuple, compose, composable, split
from .conformance import (
    AlphabetMismatch,
    ConformanceVerdict,
    Counterexample,
    check_mutual_acceptance,
    check_uioco,
    decide_eco,
    is_utrace_closed,
    ma_oracle,
    utrace_depth,
)
from .io import ParseError, parse_lts, parse_test_case, serialize_lts, serialize_test_case
from .lts import (
    DELTA,
    TAU,
    THETA,
    THETA_S,
    Lts,
    LtsError,
    NotInputEnabled,
    after,
    epsilon_closure,
    in_set,
    is_input_enabled,
    out_set,
    project,
    quiescent,
    show_trace,
    substitute,
    validate,
)
from .otf import OtfConfig, RunLog, SimulatedAdapter, otf_cioco, otf_eco, otf_uioco, simulate_adapter
from .testgen import (
    EmptyChoice,
    GenPolicy,
    TestCase,
    Verdict,
    combined_exhaustive,
    combined_suite,
    eco_exhaustive,
    eco_suite,
    gen_combined_test,
    gen_eco_test,
    run_suite,
    run_test,
    test_exec,
    validate_test_case,
)

__version__ = "0.1.0"
