"""Equivalence transformations of the gauged class, the two gauge steps
C -> 1 and A^1 -> 0, the equivalence-algebra generators, and solution
mapping.

A transformation is the tuple (T, X1, X0) of functions of t acting by

    t~ = T(t),  x~ = X1(t) x + X0(t),
    u~ = (X1/T_t) u + (X1_t/T_t) x + (X0_t/T_t),

with T_t X1 != 0.  Gauged coefficients transport as

    A~^j = (X1)^j / T_t A^j,
    A~^0 = (A^0 + 2 X1_t/X1 - T_tt/T_t) / T_t,
    B~   = X1/T_t^2 B + (X1_t/T_t)_t x / T_t + (X0_t/T_t)_t / T_t
           - (X1_t x + X0_t)/T_t * A~^0,

re-expressed in the new variables through t = T^(-1)(t~),
x = (x~ - X0)/X1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    AnalyticIntegrationUnsupported,
    Degenerate,
    DomainError,
    InverseUnavailable,
    NonMonotoneT,
    NotGauged,
    UnboundParameter,
)
from .expr import (
    Add,
    Const,
    Div,
    Expr,
    Fn,
    Mul,
    ONE,
    Param,
    Pow,
    Var,
    X,
    ZERO,
    Zeroness,
    as_const,
    check_time_fn,
    con,
    contains_var,
    diff,
    evaluate,
    is_zero,
    probe_points,
    simplify,
    subst,
    to_text,
)
from .model import Equation, GaugedEquation, GridSolution, is_gauged, to_gauged
from .numerics import bilinear
from .symmetry import VectorField

_T = Var("t")


def _nondegenerate(T: Expr, X1: Expr, params=None):
    prod = simplify(Mul(diff(T, "t"), X1))
    if is_zero(prod, params) is Zeroness.ZERO:
        raise Degenerate("T_t * X1 vanishes identically")
    for pt in probe_points():
        try:
            v = evaluate(prod, t=pt["t"], params=params)
        except (DomainError, UnboundParameter):
            continue
        if abs(v) <= 1e-12:
            raise Degenerate(f"T_t * X1 vanishes near t = {pt['t']:.3f}")


@dataclass(frozen=True)
class EquivTransformation:
    """A transformation of the gauged class; `t_inverse`, when given, is the
    expression of T^(-1) (as a function named t) and overrides catalog
    recognition."""

    T: Expr
    X1: Expr
    X0: Expr
    t_inverse: Expr = None

    def __post_init__(self):
        object.__setattr__(self, "T", check_time_fn(simplify(self.T), "T"))
        object.__setattr__(self, "X1", check_time_fn(simplify(self.X1), "X1"))
        object.__setattr__(self, "X0", check_time_fn(simplify(self.X0), "X0"))
        if self.t_inverse is not None:
            object.__setattr__(self, "t_inverse", simplify(self.t_inverse))
        _nondegenerate(self.T, self.X1)

    def inverse_expr(self) -> Expr:
        """T^(-1) as an expression in t, from the explicit override or the
        symbolic catalog."""
        if self.t_inverse is not None:
            return self.t_inverse
        inv = invert_time_expr(self.T)
        if inv is None:
            raise InverseUnavailable(f"T = {to_text(self.T)} is outside the inversion catalog")
        return inv

    def to_json(self) -> dict:
        return {"T": to_text(self.T), "X1": to_text(self.X1), "X0": to_text(self.X0)}


@dataclass(frozen=True)
class C1Transformation:
    """Transformation of the C=1 subclass; U0 may depend on (t, x)."""

    T: Expr
    X1: Expr
    X0: Expr
    U0: Expr

    def __post_init__(self):
        object.__setattr__(self, "T", check_time_fn(simplify(self.T), "T"))
        object.__setattr__(self, "X1", check_time_fn(simplify(self.X1), "X1"))
        object.__setattr__(self, "X0", check_time_fn(simplify(self.X0), "X0"))
        object.__setattr__(self, "U0", simplify(self.U0))
        _nondegenerate(self.T, self.X1)

    def to_json(self) -> dict:
        return {
            "T": to_text(self.T),
            "X1": to_text(self.X1),
            "X0": to_text(self.X0),
            "U0": to_text(self.U0),
        }


def identity() -> EquivTransformation:
    return EquivTransformation(_T, ONE, ZERO, t_inverse=_T)


# ---------------------------------------------------------------------------
# symbolic inversion catalog: affine, Mobius, exp, power (+ explicit override)
# ---------------------------------------------------------------------------

def _poly_coeffs(e: Expr, maxdeg: int):
    """Coefficients [c0..cmaxdeg] of e as a polynomial in t (coefficients free
    of t), or None."""
    coeffs = [ZERO] * (maxdeg + 1)
    terms = e.args if isinstance(e, Add) else (e,)
    for term in terms:
        deg = 0
        rest = []
        factors = term.args if isinstance(term, Mul) else (term,)
        for f in factors:
            base = f.base if isinstance(f, Pow) else f
            q = f.exponent if isinstance(f, Pow) else Fraction(1)
            if base == _T:
                if q.denominator != 1 or q < 0:
                    return None
                deg += q.numerator
            elif contains_var(f, "t"):
                return None
            else:
                rest.append(f)
        if deg > maxdeg:
            return None
        coeff = simplify(Mul(*rest)) if rest else ONE
        coeffs[deg] = simplify(Add(coeffs[deg], coeff))
    return coeffs


def _as_linear_fraction(e: Expr):
    """(a, b, c, d) with e = (a t + b) / (c t + d), entries t-free, or None."""
    lin = _poly_coeffs(e, 1)
    if lin is not None:
        return lin[1], lin[0], ZERO, ONE
    factors = e.args if isinstance(e, Mul) else (e,)
    den = None
    num_factors = []
    for f in factors:
        if (
            isinstance(f, Pow)
            and f.exponent == -1
            and isinstance(f.base, Add)
            and contains_var(f.base, "t")
        ):
            if den is not None:
                return None
            den = f.base
        else:
            num_factors.append(f)
    if den is None:
        return None
    dc = _poly_coeffs(den, 1)
    if dc is None or dc[1] == ZERO:
        return None
    num = simplify(Mul(*num_factors)) if num_factors else ONE
    nc = _poly_coeffs(num, 1)
    if nc is None:
        return None
    return nc[1], nc[0], dc[1], dc[0]


def _single_term_shape(e: Expr):
    """Split e = m + k * core into (m, k, core) with a single non-constant
    term, or None."""
    terms = list(e.args) if isinstance(e, Add) else [e]
    m = ZERO
    core = None
    k = None
    for term in terms:
        if not contains_var(term, "t"):
            m = simplify(Add(m, term))
            continue
        if core is not None:
            return None
        factors = list(term.args) if isinstance(term, Mul) else [term]
        consts = [f for f in factors if not contains_var(f, "t")]
        living = [f for f in factors if contains_var(f, "t")]
        if len(living) != 1:
            return None
        core = living[0]
        k = simplify(Mul(*consts)) if consts else ONE
    if core is None:
        return None
    return m, k, core


def invert_time_expr(T: Expr):
    """Expression of T^(-1) (in the variable t) for catalog shapes, else None."""
    T = simplify(T)
    frac = _as_linear_fraction(T)
    if frac is not None:
        a, b, c, d = frac
        if c == ZERO and d == ONE:
            if a == ZERO:
                return None
            return simplify(Div(Add(_T, Mul(Const(-1), b)), a))
        num = Add(Mul(d, _T), Mul(Const(-1), b))
        den = Add(Mul(Const(-1), c, _T), a)
        return simplify(Div(num, den))
    shape = _single_term_shape(T)
    if shape is None:
        return None
    m, k, core = shape
    shifted = simplify(Div(Add(_T, Mul(Const(-1), m)), k))  # (t - m)/k
    if isinstance(core, Fn) and core.name == "exp":
        lam = _poly_coeffs(core.arg, 1)
        if lam is None or lam[1] == ZERO:
            return None
        # core = exp(lam*t + mu)  ->  t = (ln(shifted) - mu)/lam
        return simplify(Div(Add(Fn("ln", shifted), Mul(Const(-1), lam[0])), lam[1]))
    base, q = (core.base, core.exponent) if isinstance(core, Pow) else (core, Fraction(1))
    lin = _poly_coeffs(base, 1)
    if lin is None or lin[1] == ZERO or q == 0:
        return None
    # core = (a1 t + a0)^q  ->  t = (shifted^(1/q) - a0)/a1
    root = Pow(shifted, Fraction(1) / q) if q != 1 else shifted
    return simplify(Div(Add(root, Mul(Const(-1), lin[0])), lin[1]))


# ---------------------------------------------------------------------------
# group operations
# ---------------------------------------------------------------------------

def compose(g2: EquivTransformation, g1: EquivTransformation) -> EquivTransformation:
    """The transformation applying g1 first, then g2."""
    at_t1 = lambda e: subst(e, {"t": g1.T})
    T = at_t1(g2.T)
    X1 = simplify(Mul(at_t1(g2.X1), g1.X1))
    X0 = simplify(Add(Mul(at_t1(g2.X1), g1.X0), at_t1(g2.X0)))
    inv = None
    try:
        i1, i2 = g1.inverse_expr(), g2.inverse_expr()
        inv = subst(i1, {"t": i2})
    except InverseUnavailable:
        inv = None
    return EquivTransformation(T, X1, X0, t_inverse=inv)


def invert(g: EquivTransformation) -> EquivTransformation:
    tinv = g.inverse_expr()
    X1i = simplify(Pow(subst(g.X1, {"t": tinv}), Fraction(-1)))
    X0i = simplify(Mul(Const(-1), subst(g.X0, {"t": tinv}), X1i))
    return EquivTransformation(tinv, X1i, X0i, t_inverse=g.T)


def apply_gauged(g: EquivTransformation, eq: GaugedEquation) -> GaugedEquation:
    """Transport of the reduced coefficient tuple along g."""
    eq = to_gauged(eq)
    tinv = g.inverse_expr()
    Tt = diff(g.T, "t")
    Ttt = diff(Tt, "t")
    X1t = diff(g.X1, "t")
    X0t = diff(g.X0, "t")

    def into_new_vars(e: Expr) -> Expr:
        e = subst(e, {"x": Div(Add(X, Mul(Const(-1), g.X0)), g.X1)})
        return subst(e, {"t": tinv})

    a_new = []
    for j in range(2, eq.r + 1):
        pre = Mul(Pow(g.X1, Fraction(j)), Pow(Tt, Fraction(-1)), eq.coeff(j))
        a_new.append(into_new_vars(simplify(pre)))
    a0_pre = simplify(
        Mul(
            Pow(Tt, Fraction(-1)),
            Add(eq.A0, Mul(Const(2), X1t, Pow(g.X1, Fraction(-1))), Mul(Const(-1), Ttt, Pow(Tt, Fraction(-1)))),
        )
    )
    shift = Add(Mul(X1t, X), X0t)  # X1_t x + X0_t
    b_pre = simplify(
        Add(
            Mul(g.X1, Pow(Tt, Fraction(-2)), eq.B),
            Mul(Pow(Tt, Fraction(-1)), diff(simplify(Div(X1t, Tt)), "t"), X),
            Mul(Pow(Tt, Fraction(-1)), diff(simplify(Div(X0t, Tt)), "t")),
            Mul(Const(-1), shift, Pow(Tt, Fraction(-1)), a0_pre),
        )
    )
    return GaugedEquation(
        eq.r,
        into_new_vars(a0_pre),
        tuple(a_new),
        into_new_vars(b_pre),
        dict(eq.params),
    )


def pushforward(g: EquivTransformation, q: VectorField) -> VectorField:
    """Image of Q = D(tau)+S(zeta)+P(chi), by chaining the elementary rules
    for time reparameterization, space scaling and space shift."""
    tinv = g.inverse_expr()
    Tt = diff(g.T, "t")
    tau1 = simplify(Mul(q.tau, Tt))
    zeta1 = simplify(Add(q.zeta, Mul(q.tau, diff(g.X1, "t"), Pow(g.X1, Fraction(-1)))))
    chi1 = simplify(
        Add(
            Mul(q.chi, g.X1),
            Mul(q.tau, diff(g.X0, "t")),
            Mul(Const(-1), zeta1, g.X0),
        )
    )
    re = lambda e: subst(e, {"t": tinv})
    return VectorField(re(tau1), re(zeta1), re(chi1))


# ---------------------------------------------------------------------------
# gauge step 1: C -> 1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CGaugeRecord:
    """Record of the change x~ = X(t, x) that normalizes C to 1; `x_forward`
    maps x to x~ (an expression in t, x), `x_inverse` maps back (in t, x)."""

    x_forward: Expr
    x_inverse: Expr

    def to_json(self) -> dict:
        return {"kind": "normalize-C", "X": to_text(self.x_forward), "Xinv": to_text(self.x_inverse)}


def _split_separable(C: Expr):
    """C = gamma(t) * f(x); returns (gamma, f) or raises."""
    factors = C.args if isinstance(C, Mul) else (C,)
    tpart, xpart = [], []
    for f in factors:
        has_t = contains_var(f, "t")
        has_x = contains_var(f, "x")
        if has_t and has_x:
            raise AnalyticIntegrationUnsupported(
                f"C factor {to_text(f)} mixes t and x; only separable C is supported"
            )
        (tpart if has_t else xpart).append(f)
    gamma = simplify(Mul(*tpart)) if tpart else ONE
    f = simplify(Mul(*xpart)) if xpart else ONE
    return gamma, f


def _linear_power_shape(f: Expr):
    """f = k * (a1 x + a0)^n with rational constants; returns
    (k, a1, a0, n) or None.  Recognizes expanded perfect powers."""
    coeffs = _poly_coeffs_x(f, 8)
    if coeffs is None:
        return None
    vals = [as_const(c) for c in coeffs]
    if any(v is None for v in vals):
        return None
    n = max((i for i, v in enumerate(vals) if v != 0), default=0)
    if n < 1 or vals[n] == 0:
        return None
    a0 = vals[n - 1] / (n * vals[n])
    k = vals[n]
    candidate = simplify(Mul(Const(k), Pow(Add(X, Const(a0)), Fraction(n))))
    if candidate != simplify(f):
        return None
    return Const(k), ONE, Const(a0), Fraction(n)


def _antiderivative_of_reciprocal(f: Expr):
    """(F, Finv) with F'(x) = 1/f(x) and Finv(F(x)) = x, for catalog shapes.

    Catalog: constants, c*e^(lambda*x), c*(a1*x + a0)^n.
    """
    c = as_const(f)
    if c is not None:
        if c == 0:
            raise AnalyticIntegrationUnsupported("C vanishes")
        return simplify(Div(X, Const(c))), simplify(Mul(Const(c), X))

    k = a1 = a0 = q = None
    shape = _single_term_shape_x(f)
    if shape is not None:
        kk, core = shape
        if isinstance(core, Fn) and core.name == "exp":
            lam_c = _poly_coeffs_x(core.arg, 1)
            if lam_c is None or as_const(lam_c[1]) in (None, Fraction(0)) or lam_c[0] != ZERO:
                raise AnalyticIntegrationUnsupported("exponent of C must be lambda*x")
            lam = lam_c[1]
            # F = (1 - e^(-lambda x)) / (k lambda), Finv = -ln(1 - k lambda y)/lambda
            F = simplify(
                Div(Add(ONE, Mul(Const(-1), Fn("exp", Mul(Const(-1), lam, X)))), Mul(kk, lam))
            )
            Finv = simplify(
                Mul(Const(-1), Pow(lam, Fraction(-1)), Fn("ln", Add(ONE, Mul(Const(-1), kk, lam, X))))
            )
            return F, Finv
        base, qq = (core.base, core.exponent) if isinstance(core, Pow) else (core, Fraction(1))
        lin = _poly_coeffs_x(base, 1)
        if lin is not None and lin[1] != ZERO:
            k, a1, a0, q = kk, lin[1], lin[0], qq
    if k is None:
        lin_pow = _linear_power_shape(f)
        if lin_pow is None:
            raise AnalyticIntegrationUnsupported(f"1/C of {to_text(f)} is outside the catalog")
        k, a1, a0, q = lin_pow

    base = simplify(Add(Mul(a1, X), a0))
    if q == 1:
        # f = k (a1 x + a0): F = ln(a1 x + a0)/(k a1), Finv = (exp(k a1 y) - a0)/a1
        F = simplify(Div(Fn("ln", base), Mul(k, a1)))
        Finv = simplify(Div(Add(Fn("exp", Mul(k, a1, X)), Mul(Const(-1), a0)), a1))
        return F, Finv
    # f = k (a1 x + a0)^q, q != 1:
    # F = (a1 x + a0)^(1-q) / (k a1 (1-q)), Finv = ((k a1 (1-q) y)^(1/(1-q)) - a0)/a1
    one_minus_q = Fraction(1) - q
    F = simplify(Div(Pow(base, one_minus_q), Mul(k, a1, Const(one_minus_q))))
    Finv = simplify(
        Div(
            Add(
                Pow(Mul(k, a1, Const(one_minus_q), X), Fraction(1) / one_minus_q),
                Mul(Const(-1), a0),
            ),
            a1,
        )
    )
    return F, Finv


def _poly_coeffs_x(e: Expr, maxdeg: int):
    swapped = subst(e, {"x": Var("t"), "t": Var("x")})
    coeffs = _poly_coeffs(swapped, maxdeg)
    if coeffs is None:
        return None
    return [subst(c, {"x": Var("t"), "t": Var("x")}) for c in coeffs]


def _single_term_shape_x(e: Expr):
    shape = _single_term_shape(subst(e, {"x": Var("t"), "t": Var("x")}))
    if shape is None:
        return None
    m, k, core = shape
    if m != ZERO:
        return None
    back = lambda w: subst(w, {"x": Var("t"), "t": Var("x")})
    return back(k), back(core)


def gauge_c_to_1(eq: Equation):
    """Normalize C to 1 by the change x~ = integral dx / C(t, x).

    Returns (Equation with C = 1, CGaugeRecord).  The transported
    coefficients solve the triangular system obtained by expanding the new
    derivative operator (1/X_x) d_x applied m times, m = r down to 1, with
    the advection remainder -X_t/X_x u_x absorbed into the first-order
    coefficient.
    """
    eq = eq.bound() if eq.params else eq
    C = simplify(eq.C)
    if C == ONE:
        return eq, CGaugeRecord(X, X)
    _check_one_signed(C)
    gamma, f = _split_separable(C)
    F, Finv = _antiderivative_of_reciprocal(f)
    gamma_inv = simplify(Pow(gamma, Fraction(-1)))
    Xfull = simplify(Mul(F, gamma_inv))  # X(t,x), with X_x = 1/C
    Xinv = simplify(subst(Finv, {"x": Mul(gamma, X)}))  # x = Finv(gamma * x~)
    X_x = simplify(Pow(C, Fraction(-1)))
    X_t = diff(Xfull, "t")

    # c[m][k]: the k-th original-derivative coefficient of the m-fold new
    # derivative of u; c[m][m] = C^m
    r = eq.r
    c = {1: {1: C}}
    for m in range(1, r):
        nxt = {}
        for k, cmk in c[m].items():
            nxt[k] = simplify(Add(nxt.get(k, ZERO), Mul(C, diff(cmk, "x"))))
            nxt[k + 1] = simplify(Add(nxt.get(k + 1, ZERO), Mul(C, cmk)))
        c[m + 1] = nxt

    new_a = {}
    for k in range(r, 0, -1):
        rhs = eq.A[k] if k >= 2 else Add(eq.A[1], Mul(Const(-1), X_t, C))
        acc = simplify(rhs)
        for m in range(k + 1, r + 1):
            cmk = c[m].get(k, ZERO)
            if cmk != ZERO:
                acc = simplify(Add(acc, Mul(Const(-1), new_a[m], cmk)))
        new_a[k] = simplify(Mul(acc, Pow(C, Fraction(-k))))

    def into_new_x(e: Expr) -> Expr:
        return subst(e, {"x": Xinv})

    coeffs = [into_new_x(eq.A[0])]
    for k in range(1, r + 1):
        coeffs.append(into_new_x(new_a[k]))
    out = Equation(r, ONE, tuple(coeffs), into_new_x(eq.B), {})
    return out, CGaugeRecord(Xfull, Xinv)


def _check_one_signed(C: Expr):
    signs = set()
    for pt in probe_points():
        try:
            v = evaluate(C, variables=pt)
        except (DomainError, UnboundParameter):
            continue
        if abs(v) <= 1e-12:
            raise Degenerate("C vanishes at a probe point")
        signs.add(v > 0)
    if len(signs) > 1:
        raise Degenerate("C changes sign on the working window")


# ---------------------------------------------------------------------------
# gauge step 2: A^1 -> 0
# ---------------------------------------------------------------------------

def gauge_a1_to_0(eq: Equation):
    """Remove A^1 by u~ = u - A^1 (T = t, X1 = 1, X0 = 0, U0 = -A^1).

    A~^0 = A^0 - A^1_x and B~ = B - A^1_t + A^1 A^0 + sum_k A^k d_x^k A^1.
    """
    if simplify(eq.C) != ONE:
        raise NotGauged("A^1 gauge requires C = 1; run the C gauge first")
    eq = eq.bound() if eq.params else eq
    a1 = simplify(eq.A[1])
    trans = C1Transformation(_T, ONE, ZERO, Mul(Const(-1), a1))
    if a1 == ZERO:
        gauged = to_gauged(eq)
        return gauged, trans
    a0_new = simplify(Add(eq.A[0], Mul(Const(-1), diff(a1, "x"))))
    b_new = Add(eq.B, Mul(Const(-1), diff(a1, "t")), Mul(a1, eq.A[0]))
    dk = a1
    for k in range(1, eq.r + 1):
        dk = diff(dk, "x")
        if k >= 2 and dk != ZERO:
            b_new = Add(b_new, Mul(eq.A[k], dk))
    gauged = GaugedEquation(eq.r, a0_new, tuple(eq.A[2:]), simplify(b_new), {})
    return gauged, trans


def gauge_pipeline(eq):
    """Full normalization C -> 1 then A^1 -> 0.  Returns (GaugedEquation,
    list of transformation records)."""
    records = []
    if isinstance(eq, GaugedEquation):
        return eq, records
    if simplify(eq.C) != ONE:
        eq, rec = gauge_c_to_1(eq)
        records.append(rec)
    gauged, trans = gauge_a1_to_0(eq)
    records.append(trans)
    return gauged, records


# ---------------------------------------------------------------------------
# equivalence algebra generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivAlgebraField:
    """Coefficient tuple of one equivalence-algebra generator; the
    coefficient-direction components use the placeholders A0, A2.., B, u."""

    kind: str
    tau: Expr
    xi: Expr
    eta: Expr
    phi0: Expr
    phi: dict  # j -> Expr, j = 2..r
    psi: Expr

    def on_equation(self, eq: GaugedEquation):
        """Coefficient components with the placeholders replaced by the
        equation's actual coefficients."""
        m = {"A0": eq.coeff(0), "B": eq.B}
        for j in range(2, eq.r + 1):
            m[f"A{j}"] = eq.coeff(j)
        out = {"phi0": subst(self.phi0, m), "psi": subst(self.psi, m)}
        for j, e in self.phi.items():
            out[f"phi{j}"] = subst(e, m)
        return out


def equivalence_algebra_field(kind: str, param: Expr, r: int) -> EquivAlgebraField:
    """Generators of the equivalence algebra: kind in {'D', 'S', 'P'} with a
    time-dependent parameter function."""
    w = check_time_fn(simplify(param), "parameter")
    wt = diff(w, "t")
    wtt = diff(wt, "t")
    u = Param("u")
    a0 = Param("A0")
    b = Param("B")
    if kind == "D":
        phi = {j: simplify(Mul(Const(-1), wt, Param(f"A{j}"))) for j in range(2, r + 1)}
        return EquivAlgebraField(
            "D",
            w,
            ZERO,
            simplify(Mul(Const(-1), wt, u)),
            simplify(Add(Mul(Const(-1), wt, a0), Mul(Const(-1), wtt))),
            phi,
            simplify(Mul(Const(-2), wt, b)),
        )
    if kind == "S":
        phi = {j: simplify(Mul(Const(j), w, Param(f"A{j}"))) for j in range(2, r + 1)}
        return EquivAlgebraField(
            "S",
            ZERO,
            simplify(Mul(w, X)),
            simplify(Add(Mul(w, u), Mul(wt, X))),
            simplify(Mul(Const(2), wt)),
            phi,
            simplify(Add(Mul(w, b), Mul(wtt, X), Mul(Const(-1), wt, X, a0))),
        )
    if kind == "P":
        phi = {j: ZERO for j in range(2, r + 1)}
        return EquivAlgebraField(
            "P",
            ZERO,
            w,
            wt,
            ZERO,
            phi,
            simplify(Add(wtt, Mul(Const(-1), wt, a0))),
        )
    raise ValueError(f"kind must be D, S or P, got {kind!r}")


# ---------------------------------------------------------------------------
# solution mapping
# ---------------------------------------------------------------------------

def map_solution(g: EquivTransformation, sol: GridSolution, params=None) -> GridSolution:
    """Push a sampled solution through g, resampling on a uniform target grid
    by bilinear interpolation.  The target rectangle is the largest one
    inside the image of the source rectangle."""
    params = params or {}
    tfun = lambda tv: evaluate(g.T, t=tv, params=params)
    tt_vals = np.linspace(sol.t0, sol.t1, 33)
    tders = np.diff([tfun(v) for v in tt_vals])
    if np.any(tders == 0) or (np.any(tders > 0) and np.any(tders < 0)):
        raise NonMonotoneT("T is not monotone on the source time range")

    ta, tb = tfun(sol.t0), tfun(sol.t1)
    t_lo, t_hi = (ta, tb) if ta < tb else (tb, ta)

    tinv = None
    try:
        tinv_expr = g.inverse_expr()
        tinv = lambda v: evaluate(tinv_expr, t=v, params=params)
    except InverseUnavailable:
        increasing = tb > ta

        def tinv(v, _inc=increasing):
            lo, hi = sol.t0, sol.t1
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if (tfun(mid) < v) == _inc:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

    nt, nx = sol.nt, sol.nx
    tgrid = np.linspace(t_lo, t_hi, nt)
    x1 = lambda tv: evaluate(g.X1, t=tv, params=params)
    x0 = lambda tv: evaluate(g.X0, t=tv, params=params)
    x_lo, x_hi = -np.inf, np.inf
    src_t = []
    for tv in tgrid:
        ts = tinv(tv)
        src_t.append(ts)
        lo = x1(ts) * sol.x0 + x0(ts)
        hi = x1(ts) * sol.x1 + x0(ts)
        if lo > hi:
            lo, hi = hi, lo
        x_lo, x_hi = max(x_lo, lo), min(x_hi, hi)
    if not x_hi > x_lo:
        raise Degenerate("image slabs have empty common x-range")
    xgrid = np.linspace(x_lo, x_hi, nx)

    X1t = diff(g.X1, "t")
    X0t = diff(g.X0, "t")
    Tt = diff(g.T, "t")
    out = np.empty((nt, nx))
    for i, (tv, ts) in enumerate(zip(tgrid, src_t)):
        x1v = x1(ts)
        x0v = x0(ts)
        ttv = evaluate(Tt, t=ts, params=params)
        x1tv = evaluate(X1t, t=ts, params=params)
        x0tv = evaluate(X0t, t=ts, params=params)
        for j, xv in enumerate(xgrid):
            xs = (xv - x0v) / x1v
            xs = min(max(xs, sol.x0), sol.x1)
            uval = bilinear(sol, ts, xs)
            out[i, j] = (x1v * uval + x1tv * xs + x0tv) / ttv
    return GridSolution(t_lo, t_hi, x_lo, x_hi, out)
