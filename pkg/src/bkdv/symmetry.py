"""Lie symmetry machinery for gauged equations.

Vector fields are stored through the components (tau, zeta, chi) of
Q = D(tau) + S(zeta) + P(chi), where

    D(tau) = tau d_t - tau_t u d_u,
    S(zeta) = zeta x d_x + (zeta u + zeta_t x) d_u,
    P(chi) = chi d_x + chi_t d_u,

and tau, zeta, chi are functions of t alone.  Q is a symmetry of a gauged
equation exactly when the residuals of the classifying system

    R_j = tau A^j_t + (zeta x + chi) A^j_x + (tau_t - j zeta) A^j,  j = 2..r,
    R_0 = tau A^0_t + (zeta x + chi) A^0_x + tau_t A^0 - 2 zeta_t + tau_tt,
    R_B = tau B_t + (zeta x + chi) B_x - (zeta - 2 tau_t) B
          + (zeta_t x + chi_t) A^0 - zeta_tt x - chi_tt

all vanish.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import DependentBasis, DomainError, InvariantViolation, ParseError, UnboundParameter
from .expr import (
    Add,
    Const,
    Expr,
    Mul,
    ONE,
    Var,
    X,
    ZERO,
    Zeroness,
    check_time_fn,
    con,
    diff,
    evaluate,
    is_zero,
    parse,
    simplify,
    to_text,
)

_T = Var("t")


@dataclass(frozen=True)
class VectorField:
    tau: Expr
    zeta: Expr
    chi: Expr

    def __post_init__(self):
        object.__setattr__(self, "tau", check_time_fn(simplify(self.tau), "tau"))
        object.__setattr__(self, "zeta", check_time_fn(simplify(self.zeta), "zeta"))
        object.__setattr__(self, "chi", check_time_fn(simplify(self.chi), "chi"))

    def is_zero_field(self) -> bool:
        return self.tau == ZERO and self.zeta == ZERO and self.chi == ZERO

    def scaled(self, c) -> "VectorField":
        c = c if isinstance(c, Expr) else con(c)
        return VectorField(
            simplify(Mul(c, self.tau)), simplify(Mul(c, self.zeta)), simplify(Mul(c, self.chi))
        )

    def plus(self, other: "VectorField") -> "VectorField":
        return VectorField(
            simplify(Add(self.tau, other.tau)),
            simplify(Add(self.zeta, other.zeta)),
            simplify(Add(self.chi, other.chi)),
        )

    def coordinate_components(self):
        """(t, x, u)-components of Q as expressions in t, x, u."""
        u = Var("u")
        xi_t = self.tau
        xi_x = simplify(Add(Mul(self.zeta, X), self.chi))
        tau_t = diff(self.tau, "t")
        xi_u = simplify(
            Add(
                Mul(Add(self.zeta, Mul(Const(-1), tau_t)), u),
                Mul(diff(self.zeta, "t"), X),
                diff(self.chi, "t"),
            )
        )
        return xi_t, xi_x, xi_u

    def to_json(self) -> dict:
        return {
            "tau": to_text(self.tau),
            "zeta": to_text(self.zeta),
            "chi": to_text(self.chi),
        }

    def label(self) -> str:
        parts = []
        for name, comp in (("D", self.tau), ("S", self.zeta), ("P", self.chi)):
            if comp == ZERO:
                continue
            neg = simplify(Mul(Const(-1), comp))
            if isinstance(comp, (Const, Mul)) and str(neg).count("-") < str(comp).count("-"):
                parts.append(("-", f"{name}({to_text(neg)})"))
            else:
                parts.append(("+", f"{name}({to_text(comp)})"))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        out = first if first_sign == "+" else f"-{first}"
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.label()


def D(tau) -> VectorField:
    return VectorField(_as_expr(tau), ZERO, ZERO)


def S(zeta) -> VectorField:
    return VectorField(ZERO, _as_expr(zeta), ZERO)


def P(chi) -> VectorField:
    return VectorField(ZERO, ZERO, _as_expr(chi))


def _as_expr(v) -> Expr:
    return v if isinstance(v, Expr) else con(v)


def commutator(q1: VectorField, q2: VectorField) -> VectorField:
    """Lie bracket, from the bilinear extension of
    [D,D'] = D(tau tau'_t - tau' tau_t), [D,S] = S(tau zeta_t),
    [D,P] = P(tau chi_t), [S,P] = -P(zeta chi)."""
    t1, z1, c1 = q1.tau, q1.zeta, q1.chi
    t2, z2, c2 = q2.tau, q2.zeta, q2.chi
    dt1, dz1, dc1 = diff(t1, "t"), diff(z1, "t"), diff(c1, "t")
    dt2, dz2, dc2 = diff(t2, "t"), diff(z2, "t"), diff(c2, "t")
    tau = Add(Mul(t1, dt2), Mul(Const(-1), t2, dt1))
    zeta = Add(Mul(t1, dz2), Mul(Const(-1), t2, dz1))
    chi = Add(
        Mul(t1, dc2),
        Mul(Const(-1), t2, dc1),
        Mul(z2, c1),
        Mul(Const(-1), z1, c2),
    )
    return VectorField(simplify(tau), simplify(zeta), simplify(chi))


# ---------------------------------------------------------------------------
# classifying residuals
# ---------------------------------------------------------------------------

def determining_residuals(q: VectorField, eq) -> dict:
    """Residuals of the classifying system, keyed 'R2'..'Rr', 'R0', 'RB'."""
    tau, zeta, chi = q.tau, q.zeta, q.chi
    tau_t = diff(tau, "t")
    tau_tt = diff(tau_t, "t")
    zeta_t = diff(zeta, "t")
    zeta_tt = diff(zeta_t, "t")
    chi_t = diff(chi, "t")
    chi_tt = diff(chi_t, "t")
    xi_x = Add(Mul(zeta, X), chi)

    out = {}
    for j in range(2, eq.r + 1):
        aj = eq.coeff(j)
        rj = Add(
            Mul(tau, diff(aj, "t")),
            Mul(xi_x, diff(aj, "x")),
            Mul(Add(tau_t, Mul(Const(-j), zeta)), aj),
        )
        out[f"R{j}"] = simplify(rj)
    a0 = eq.coeff(0)
    r0 = Add(
        Mul(tau, diff(a0, "t")),
        Mul(xi_x, diff(a0, "x")),
        Mul(tau_t, a0),
        Mul(Const(-2), zeta_t),
        tau_tt,
    )
    out["R0"] = simplify(r0)
    b = eq.B
    rb = Add(
        Mul(tau, diff(b, "t")),
        Mul(xi_x, diff(b, "x")),
        Mul(Const(-1), Add(zeta, Mul(Const(-2), tau_t)), b),
        Mul(Add(Mul(zeta_t, X), chi_t), a0),
        Mul(Const(-1), zeta_tt, X),
        Mul(Const(-1), chi_tt),
    )
    out["RB"] = simplify(rb)
    return out


class SymmetryStatus(Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


def is_symmetry(q: VectorField, eq) -> SymmetryStatus:
    """Yes iff every residual tests Zero, No on any NonZero, else Unknown."""
    saw_unknown = False
    for res in determining_residuals(q, eq).values():
        z = is_zero(res, eq.params)
        if z is Zeroness.NONZERO:
            return SymmetryStatus.NO
        if z is Zeroness.UNKNOWN:
            saw_unknown = True
    return SymmetryStatus.UNKNOWN if saw_unknown else SymmetryStatus.YES


# ---------------------------------------------------------------------------
# k-invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KInvariants:
    k1: int
    k2: int
    k3: int

    def as_tuple(self):
        return (self.k1, self.k2, self.k3)

    def check(self, r: int):
        """Enforce the admissible range of (k1, k2, k3) for order r."""
        k1, k2, k3 = self.as_tuple()
        if (k1, k2) not in ((0, 0), (0, 1), (2, 0)):
            raise InvariantViolation(f"(k1,k2)=({k1},{k2}) is not admissible")
        if k3 > 3 or k1 + k2 + k3 > 5:
            raise InvariantViolation(f"k=({k1},{k2},{k3}) exceeds the dimension bounds")
        if k2 == 1 and k3 > 1:
            raise InvariantViolation(f"k3={k3} not allowed when k2=1")
        if k1 == 2:
            allowed = (0, 1, 2) if r > 2 else (0, 1, 3)
            if k3 not in allowed:
                raise InvariantViolation(f"k3={k3} not allowed when k1=2 and r={r}")
        return self


_CHEB_N = 8


def _sample_times(shift: float = 0.0):
    a, b = 0.15 + shift, 1.85 + shift
    return [
        0.5 * (a + b) + 0.5 * (b - a) * math.cos(math.pi * (2 * i + 1) / (2 * _CHEB_N))
        for i in range(_CHEB_N)
    ]


def _component_matrix(basis, comps, params, shift=0.0):
    times = _sample_times(shift)
    rows = []
    for q in basis:
        row = []
        for comp in comps:
            e = getattr(q, comp)
            for tv in times:
                row.append(evaluate(e, t=tv, params=params))
        rows.append(row)
    return np.array(rows, dtype=float)


def _rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if len(s) == 0:
        return 0
    return int(np.sum(s > 1e-9 * max(1.0, s[0])))


def k_invariants(basis, params=None) -> KInvariants:
    """k1 = dim of the pure-P part, k1+k2 = dim of the tau=0 part,
    k3 = dim of the tau-projection; decided by sampled ranks."""
    basis = list(basis)
    n = len(basis)
    if n == 0:
        return KInvariants(0, 0, 0)
    params = params or {}
    for shift in (0.0, 0.4, 1.1):
        try:
            m_full = _component_matrix(basis, ("tau", "zeta", "chi"), params, shift)
            m_tz = _component_matrix(basis, ("tau", "zeta"), params, shift)
            m_t = _component_matrix(basis, ("tau",), params, shift)
        except (DomainError, UnboundParameter):
            continue
        if _rank(m_full) < n:
            raise DependentBasis("basis fields are linearly dependent")
        k1 = n - _rank(m_tz)
        k12 = n - _rank(m_t)
        return KInvariants(k1, k12 - k1, _rank(m_t))
    raise DomainError("could not sample basis components at any probe window")


# ---------------------------------------------------------------------------
# shorthand parser:  "D(t^2) + S(t) - P(1)"
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^\s*([DSP])\s*\((.*)\)\s*$")


def parse_vector_field(text: str) -> VectorField:
    pieces = _split_signed(text)
    tau, zeta, chi = ZERO, ZERO, ZERO
    for sign, piece in pieces:
        m = _TERM_RE.match(piece)
        if not m:
            raise ParseError(f"expected D(...), S(...) or P(...), found {piece.strip()!r}")
        kind, inner = m.group(1), m.group(2)
        arg = parse(inner)
        if sign < 0:
            arg = simplify(Mul(Const(-1), arg))
        if kind == "D":
            tau = simplify(Add(tau, arg))
        elif kind == "S":
            zeta = simplify(Add(zeta, arg))
        else:
            chi = simplify(Add(chi, arg))
    return VectorField(tau, zeta, chi)


def _split_signed(text: str):
    out = []
    depth = 0
    sign = 1
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and current and "".join(current).strip():
            out.append((sign, "".join(current)))
            sign = 1 if ch == "+" else -1
            current = []
            continue
        if depth == 0 and ch in "+-" and not "".join(current).strip():
            sign = sign if ch == "+" else -sign
            continue
        current.append(ch)
    if "".join(current).strip():
        out.append((sign, "".join(current)))
    if not out:
        raise ParseError("empty vector field")
    return out
