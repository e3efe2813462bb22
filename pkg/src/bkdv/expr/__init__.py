"""Small exact computer-algebra core: expression trees over the variables
t, x (plus the reduction bookkeeping variables u, w, phi...), named real
parameters, exact rational constants, a text grammar, symbolic
differentiation, canonical simplification and probe-based zero testing."""

from .calculus import (
    Zeroness,
    check_time_fn,
    diff,
    evaluate,
    is_time_fn,
    is_zero,
    probe_points,
    probe_seed,
    subst,
)
from .nodes import (
    Add,
    Const,
    Div,
    Expr,
    FN_NAMES,
    Fn,
    Mul,
    Neg,
    ONE,
    PHI,
    Param,
    Pow,
    T,
    U,
    Var,
    W,
    X,
    ZERO,
    as_const,
    con,
    contains_var,
    free_params,
    free_vars,
    to_text,
)
from .parser import parse, parse_raw
from .simplify import clear_cache, is_nonneg, simplify

__all__ = [
    "Add", "Const", "Div", "Expr", "FN_NAMES", "Fn", "Mul", "Neg", "ONE",
    "PHI", "Param", "Pow", "T", "U", "Var", "W", "X", "ZERO", "Zeroness",
    "as_const", "check_time_fn", "clear_cache", "con", "contains_var",
    "diff", "evaluate", "free_params", "free_vars", "is_nonneg",
    "is_time_fn", "is_zero", "parse", "parse_raw", "probe_points",
    "probe_seed", "simplify", "subst", "to_text",
]
