"""Differentiation, substitution, numeric evaluation and zero testing."""

from __future__ import annotations

import math
import os
import random
from enum import Enum
from fractions import Fraction

from ..errors import DomainError, NotTimeFunction, UnboundParameter
from .nodes import (
    Add,
    Const,
    Div,
    Expr,
    Fn,
    Mul,
    Neg,
    ONE,
    Param,
    Pow,
    Var,
    ZERO,
    con,
    free_vars,
)
from .simplify import simplify

_DEFAULT_SEED = 0x42
_PROBE_NAMES = ("t", "x", "u", "w", "phi", "phi1", "phi2", "phi3", "phi4", "phi5", "phi6")


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

def diff(e: Expr, v, chain=None) -> Expr:
    """Exact partial derivative of `e` with respect to variable `v`.

    `chain`, when given, maps the *name* of any other variable to its
    derivative expression (or None); it is how jet variables such as phi,
    phi1, ... are differentiated through their argument.
    """
    name = v.name if isinstance(v, Var) else v
    return simplify(_diff(simplify(e), name, chain))


def _diff(e: Expr, name: str, chain) -> Expr:
    if isinstance(e, (Const, Param)):
        return ZERO
    if isinstance(e, Var):
        if e.name == name:
            return ONE
        if chain is not None:
            d = chain(e.name)
            if d is not None:
                return d
        return ZERO
    if isinstance(e, Add):
        return Add(*[_diff(a, name, chain) for a in e.args])
    if isinstance(e, Mul):
        terms = []
        for i, a in enumerate(e.args):
            da = _diff(a, name, chain)
            if da == ZERO:
                continue
            rest = e.args[:i] + e.args[i + 1 :]
            terms.append(Mul(da, *rest) if rest else da)
        return Add(*terms) if terms else ZERO
    if isinstance(e, Pow):
        db = _diff(e.base, name, chain)
        if db == ZERO:
            return ZERO
        return Mul(Const(e.exponent), Pow(e.base, e.exponent - 1), db)
    if isinstance(e, Neg):
        return Neg(_diff(e.arg, name, chain))
    if isinstance(e, Div):
        du = _diff(e.num, name, chain)
        dv = _diff(e.den, name, chain)
        return Div(Add(Mul(du, e.den), Neg(Mul(e.num, dv))), Pow(e.den, 2))
    if isinstance(e, Fn):
        da = _diff(e.arg, name, chain)
        if da == ZERO:
            return ZERO
        u = e.arg
        if e.name == "exp":
            outer = e
        elif e.name == "ln":
            outer = Pow(u, -1)
        elif e.name == "abs":
            outer = Fn("sign", u)  # distributional point at 0 ignored
        elif e.name == "sign":
            return ZERO
        elif e.name == "sin":
            outer = Fn("cos", u)
        elif e.name == "cos":
            outer = Neg(Fn("sin", u))
        elif e.name == "arctan":
            outer = Pow(Add(ONE, Pow(u, 2)), -1)
        elif e.name == "sqrt":
            outer = Mul(Const(Fraction(1, 2)), Pow(u, Fraction(-1, 2)))
        else:
            raise ValueError(e.name)
        return Mul(outer, da)
    raise TypeError(f"cannot differentiate {e!r}")


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------

def subst(e: Expr, mapping) -> Expr:
    """Simultaneous replacement of Var/Param leaves, then simplification."""
    m = {}
    for k, v in mapping.items():
        if isinstance(k, (Var, Param)):
            k = k.name
        m[k] = v if isinstance(v, Expr) else con(v)
    return simplify(_subst(e, m))


def _subst(e: Expr, m: dict) -> Expr:
    if isinstance(e, (Var, Param)):
        return m.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return Add(*[_subst(a, m) for a in e.args])
    if isinstance(e, Mul):
        return Mul(*[_subst(a, m) for a in e.args])
    if isinstance(e, Pow):
        return Pow(_subst(e.base, m), e.exponent)
    if isinstance(e, Fn):
        return Fn(e.name, _subst(e.arg, m))
    if isinstance(e, Neg):
        return Neg(_subst(e.arg, m))
    if isinstance(e, Div):
        return Div(_subst(e.num, m), _subst(e.den, m))
    raise TypeError(f"cannot substitute into {e!r}")


# ---------------------------------------------------------------------------
# numeric evaluation
# ---------------------------------------------------------------------------

def evaluate(e: Expr, t=None, x=None, params=None, variables=None) -> float:
    """IEEE-double value of `e`.  All parameters must be bound."""
    env = {}
    if t is not None:
        env["t"] = float(t)
    if x is not None:
        env["x"] = float(x)
    if variables:
        for k, v in variables.items():
            env[k] = float(v)
    pmap = {k: float(v) for k, v in (params or {}).items()}
    try:
        return _eval(e, env, pmap)
    except (OverflowError, ValueError) as exc:
        raise DomainError(str(exc)) from exc


def _eval(e: Expr, env: dict, params: dict) -> float:
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        if e.name not in env:
            raise DomainError(f"variable {e.name} has no value at this point")
        return env[e.name]
    if isinstance(e, Param):
        if e.name not in params:
            raise UnboundParameter(e.name)
        return params[e.name]
    if isinstance(e, Add):
        return math.fsum(_eval(a, env, params) for a in e.args)
    if isinstance(e, Mul):
        out = 1.0
        for a in e.args:
            out *= _eval(a, env, params)
        return out
    if isinstance(e, Pow):
        return _eval_pow(_eval(e.base, env, params), e.exponent)
    if isinstance(e, Neg):
        return -_eval(e.arg, env, params)
    if isinstance(e, Div):
        den = _eval(e.den, env, params)
        if den == 0.0:
            raise DomainError("division by zero")
        return _eval(e.num, env, params) / den
    if isinstance(e, Fn):
        v = _eval(e.arg, env, params)
        if e.name == "exp":
            if v > 709.0:
                raise DomainError("exp overflow")
            return math.exp(v)
        if e.name == "ln":
            if v <= 0.0:
                raise DomainError("ln of nonpositive value")
            return math.log(v)
        if e.name == "abs":
            return abs(v)
        if e.name == "sign":
            return 0.0 if v == 0.0 else math.copysign(1.0, v)
        if e.name == "sin":
            return math.sin(v)
        if e.name == "cos":
            return math.cos(v)
        if e.name == "arctan":
            return math.atan(v)
        if e.name == "sqrt":
            if v < 0.0:
                raise DomainError("sqrt of negative value")
            return math.sqrt(v)
    raise TypeError(f"cannot evaluate {e!r}")


def _eval_pow(base: float, q: Fraction) -> float:
    if base == 0.0:
        if q > 0:
            return 0.0
        raise DomainError("zero raised to a nonpositive power")
    if q.denominator == 1:
        n = q.numerator
        try:
            return base ** n
        except ZeroDivisionError as exc:  # pragma: no cover
            raise DomainError(str(exc)) from exc
    if base < 0.0:
        if q.denominator % 2 == 0:
            raise DomainError("even root of negative value")
        sign = -1.0 if q.numerator % 2 else 1.0
        return sign * (-base) ** float(q)
    return base ** float(q)


# ---------------------------------------------------------------------------
# zero testing
# ---------------------------------------------------------------------------

class Zeroness(Enum):
    ZERO = "Zero"
    NONZERO = "NonZero"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


_probe_cache = {"seed": None, "points": None}


def probe_seed() -> int:
    raw = os.environ.get("BKDV_PROBE_SEED")
    return _DEFAULT_SEED if raw is None else int(raw, 0)


def probe_points():
    """32 deterministic probe points with coordinates in [-2,-0.1] u [0.1,2]."""
    seed = probe_seed()
    if _probe_cache["seed"] != seed:
        rng = random.Random(seed)
        pts = []
        for _ in range(32):
            pt = {}
            for name in _PROBE_NAMES:
                mag = rng.uniform(0.1, 2.0)
                pt[name] = -mag if rng.random() < 0.5 else mag
            pts.append(pt)
        _probe_cache["seed"] = seed
        _probe_cache["points"] = tuple(pts)
    return _probe_cache["points"]


_REL_TOL = 1e-7


def is_zero(e: Expr, params=None) -> Zeroness:
    """Tri-state zero test: symbolic Zero, probe-refuted NonZero, else Unknown.

    Probe points where evaluation fails (domain errors, unbound parameters)
    are skipped.
    """
    s = simplify(e)
    if s == ZERO:
        return Zeroness.ZERO
    if isinstance(s, Const):
        return Zeroness.NONZERO
    terms = s.args if isinstance(s, Add) else (s,)
    for pt in probe_points():
        env = dict(pt)
        try:
            vals = [_eval_guarded(term, env, params) for term in terms]
        except _SkipPoint:
            continue
        total = math.fsum(vals)
        scale = math.fsum(abs(v) for v in vals)
        if abs(total) > _REL_TOL * (1.0 + scale):
            return Zeroness.NONZERO
    return Zeroness.UNKNOWN


class _SkipPoint(Exception):
    pass


def _eval_guarded(term: Expr, env: dict, params) -> float:
    try:
        v = _eval(term, env, {k: float(v) for k, v in (params or {}).items()})
    except (DomainError, UnboundParameter, OverflowError, ValueError) as exc:
        raise _SkipPoint from exc
    if math.isnan(v) or math.isinf(v):
        raise _SkipPoint
    return v


# ---------------------------------------------------------------------------
# time functions
# ---------------------------------------------------------------------------

def check_time_fn(e: Expr, what: str = "expression") -> Expr:
    """Validate that `e` depends on no variable other than t."""
    extra = free_vars(e) - {"t"}
    if extra:
        raise NotTimeFunction(f"{what} must depend on t only, found {sorted(extra)}")
    return e


def is_time_fn(e: Expr) -> bool:
    return not (free_vars(e) - {"t"})
