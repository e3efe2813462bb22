"""Expression tree nodes.

Constants are exact rationals, power exponents are exact rationals, and every
node is immutable and hashable.  Construction does not simplify; call
:func:`bkdv.expr.simplify` to reach the canonical form.
"""

from __future__ import annotations

import re
from fractions import Fraction

FN_NAMES = ("exp", "ln", "abs", "sign", "sin", "cos", "arctan", "sqrt")

_VAR_RE = re.compile(r"^(t|x|u|w|phi\d*)$")


def is_var_name(name: str) -> bool:
    return bool(_VAR_RE.match(name))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {value!r}")


class Expr:
    """Base class; subclasses define `_key()` used for hashing and ordering."""

    __slots__ = ("_hash", "_skey")

    def _init_key(self):
        self._hash = hash(self._key())
        self._skey = None

    def _key(self):
        raise NotImplementedError

    def sort_key(self):
        if self._skey is None:
            self._skey = self._key()
        return self._skey

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self.sort_key() == other.sort_key()

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"<{type(self).__name__} {to_text(self)}>"

    # Operator overloading builds raw (unsimplified) nodes.
    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Add(self, Neg(_coerce(other)))

    def __rsub__(self, other):
        return Add(_coerce(other), Neg(self))

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __rtruediv__(self, other):
        return Div(_coerce(other), self)

    def __pow__(self, other):
        return Pow(self, other)

    def __neg__(self):
        return Neg(self)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(_as_fraction(value))


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = _as_fraction(value)
        self._init_key()

    def _key(self):
        return (0, self.value.numerator, self.value.denominator)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if not is_var_name(name):
            raise ValueError(f"not a variable name: {name!r}")
        self.name = name
        self._init_key()

    def _key(self):
        return (1, self.name)


class Param(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._init_key()

    def _key(self):
        return (2, self.name)


class Fn(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FN_NAMES:
            raise ValueError(f"unknown function: {name!r}")
        self.name = name
        self.arg = arg
        self._init_key()

    def _key(self):
        return (3, self.name, self.arg.sort_key())


class Pow(Expr):
    """base ** exponent with an exact rational exponent."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent):
        self.base = base
        self.exponent = _as_fraction(exponent)
        self._init_key()

    def _key(self):
        q = self.exponent
        return (4, self.base.sort_key(), q.numerator, q.denominator)


class Mul(Expr):
    __slots__ = ("args",)

    def __init__(self, *args: Expr):
        self.args = tuple(_coerce(a) for a in args)
        self._init_key()

    def _key(self):
        return (5, tuple(a.sort_key() for a in self.args))


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, *args: Expr):
        self.args = tuple(_coerce(a) for a in args)
        self._init_key()

    def _key(self):
        return (6, tuple(a.sort_key() for a in self.args))


class Neg(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        self.arg = _coerce(arg)
        self._init_key()

    def _key(self):
        return (7, self.arg.sort_key())


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        self.num = _coerce(num)
        self.den = _coerce(den)
        self._init_key()

    def _key(self):
        return (8, self.num.sort_key(), self.den.sort_key())


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)
HALF = Fraction(1, 2)

T = Var("t")
X = Var("x")
U = Var("u")
W = Var("w")
PHI = Var("phi")


def con(value) -> Const:
    """Exact rational constant from int, Fraction or decimal/fraction string."""
    return Const(_as_fraction(value))


def as_const(e: Expr):
    """The Fraction value of a Const node, else None."""
    return e.value if isinstance(e, Const) else None


def free_names(e: Expr):
    """Set of (kind, name) pairs for the Var and Param leaves of `e`."""
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(("var", n.name))
        elif isinstance(n, Param):
            out.add(("param", n.name))
        elif isinstance(n, Fn):
            stack.append(n.arg)
        elif isinstance(n, Pow):
            stack.append(n.base)
        elif isinstance(n, (Add, Mul)):
            stack.extend(n.args)
        elif isinstance(n, Neg):
            stack.append(n.arg)
        elif isinstance(n, Div):
            stack.append(n.num)
            stack.append(n.den)
    return out


def free_vars(e: Expr):
    return {name for kind, name in free_names(e) if kind == "var"}


def free_params(e: Expr):
    return {name for kind, name in free_names(e) if kind == "param"}


def contains_var(e: Expr, name: str) -> bool:
    return name in free_vars(e)


# ---------------------------------------------------------------------------
# Printing.  Emits text that reparses (after canonicalization) to the same
# expression; compound subterms are parenthesized whenever precedence needs it.
# ---------------------------------------------------------------------------

def _frac_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _needs_parens_in_mul(e: Expr) -> bool:
    if isinstance(e, (Add, Neg, Div)):
        return True
    if isinstance(e, Const):
        return e.value < 0 or e.value.denominator != 1
    return False


def _pow_base_text(e: Expr) -> str:
    if isinstance(e, (Add, Mul, Neg, Div, Pow)) or (
        isinstance(e, Const) and (e.value < 0 or e.value.denominator != 1)
    ):
        return f"({to_text(e)})"
    return to_text(e)


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        return _frac_text(e.value)
    if isinstance(e, (Var, Param)):
        return e.name
    if isinstance(e, Fn):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Pow):
        q = e.exponent
        if q.denominator == 1 and q >= 0:
            return f"{_pow_base_text(e.base)}^{q.numerator}"
        return f"{_pow_base_text(e.base)}^({_frac_text(q)})"
    if isinstance(e, Mul):
        parts = [
            f"({to_text(a)})" if _needs_parens_in_mul(a) else to_text(a)
            for a in e.args
        ]
        return " * ".join(parts)
    if isinstance(e, Add):
        out = []
        for i, term in enumerate(e.args):
            sign, body = _signed_text(term)
            if i == 0:
                out.append(body if sign > 0 else f"-{body}")
            else:
                out.append(f" + {body}" if sign > 0 else f" - {body}")
        return "".join(out)
    if isinstance(e, Neg):
        return f"-({to_text(e.arg)})"
    if isinstance(e, Div):
        num = f"({to_text(e.num)})" if isinstance(e.num, (Add, Neg, Div)) else to_text(e.num)
        den = (
            f"({to_text(e.den)})"
            if isinstance(e.den, (Add, Mul, Neg, Div))
            else to_text(e.den)
        )
        return f"{num} / {den}"
    raise TypeError(f"cannot print {e!r}")


def _signed_text(term: Expr):
    """(sign, text of |term|) for rendering inside a sum."""
    if isinstance(term, Const) and term.value < 0:
        return -1, _frac_text(-term.value)
    if isinstance(term, Mul) and term.args and isinstance(term.args[0], Const):
        c = term.args[0].value
        if c < 0:
            rest = term.args[1:]
            if c == -1 and rest:
                body = Mul(*rest) if len(rest) > 1 else rest[0]
            else:
                body = Mul(Const(-c), *rest)
            return -1, to_text(body)
    return 1, to_text(term)
