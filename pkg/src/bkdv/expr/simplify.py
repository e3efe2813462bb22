"""Canonical simplification.

The normal form is an expanded sum of monomials: sums flatten and sort, like
terms collect, products distribute over sums, integer powers of sums expand,
and rational constants fold exactly.  Sums whose terms carry negative integer
powers of composite (sum) bases are combined over the common denominator, so
cancellation of such fractions reduces to the numerator collapsing to zero.
The rule set further knows:

* power collection on identical bases, ``exp`` product/power merging,
  ``exp(ln u) = u``, ``ln(exp u) = u``, ``exp(q*ln u) = u^q``;
* ``abs``/``sign`` algebra (``e*sign(e) = abs(e)``, ``abs(e)^2 = e^2``,
  ``sign(e)^2 = 1``) with the ``abs`` exponent normalized into ``[0, 2)``;
* ``sin^2 + cos^2 = 1`` for matching arguments and cofactors, and
  ``sin/cos(arctan u)`` in algebraic form.

``simplify`` is idempotent: the canonical form maps to itself.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .nodes import (
    Add,
    Const,
    Div,
    Expr,
    Fn,
    MINUS_ONE,
    Mul,
    Neg,
    ONE,
    Param,
    Pow,
    Var,
    ZERO,
)

_HALF = Fraction(1, 2)
_MAX_LOOPS = 60

_cache: dict = {}


def clear_cache():
    _cache.clear()


def simplify(e: Expr) -> Expr:
    """Canonical form of `e`."""
    r = _cache.get(e)
    if r is not None:
        return r
    r = _normalize(e)
    _cache[e] = r
    _cache[r] = r
    return r


def _normalize(e: Expr) -> Expr:
    if isinstance(e, (Const, Var, Param)):
        return e
    if isinstance(e, Neg):
        return mul_norm([MINUS_ONE, simplify(e.arg)])
    if isinstance(e, Div):
        return mul_norm([simplify(e.num), pow_norm(simplify(e.den), Fraction(-1))])
    if isinstance(e, Add):
        return add_norm([simplify(a) for a in e.args])
    if isinstance(e, Mul):
        return mul_norm([simplify(a) for a in e.args])
    if isinstance(e, Pow):
        return pow_norm(simplify(e.base), e.exponent)
    if isinstance(e, Fn):
        return fn_norm(e.name, simplify(e.arg))
    raise TypeError(f"cannot simplify {e!r}")


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def _factors(e: Expr):
    if isinstance(e, Mul):
        return list(e.args)
    return [e]


def _base_exp(f: Expr):
    if isinstance(f, Pow):
        return f.base, f.exponent
    return f, Fraction(1)


def _split_coeff(term: Expr):
    """(rational coefficient, remaining factor expr or None)."""
    if isinstance(term, Const):
        return term.value, None
    if isinstance(term, Mul) and isinstance(term.args[0], Const):
        rest = term.args[1:]
        if not rest:
            return term.args[0].value, None
        if len(rest) == 1:
            return term.args[0].value, rest[0]
        return term.args[0].value, Mul(*rest)
    return Fraction(1), term


def _make_term(coeff: Fraction, key) -> Expr:
    if key is None:
        return Const(coeff)
    if coeff == 1:
        return key
    if isinstance(key, Mul):
        return Mul(Const(coeff), *key.args)
    return Mul(Const(coeff), key)


def _make_mul(coeff: Fraction, factors: list) -> Expr:
    factors = sorted(factors, key=lambda f: f.sort_key())
    if coeff == 0:
        return ZERO
    if not factors:
        return Const(coeff)
    if coeff == 1:
        return factors[0] if len(factors) == 1 else Mul(*factors)
    return Mul(Const(coeff), *factors)


def is_nonneg(e: Expr) -> bool:
    """Conservative: True only when `e` is provably >= 0 on its domain."""
    if isinstance(e, Const):
        return e.value >= 0
    if isinstance(e, Fn):
        return e.name in ("exp", "abs", "sqrt")
    if isinstance(e, Pow):
        q = e.exponent
        if q.denominator % 2 == 0:
            return True
        if q.denominator == 1 and q.numerator % 2 == 0:
            return True
        return is_nonneg(e.base)
    if isinstance(e, Mul):
        return all(is_nonneg(f) for f in e.args)
    if isinstance(e, Add):
        return all(is_nonneg(a) for a in e.args)
    return False


def _iroot(n: int, k: int):
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    r = round(n ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** k == n:
            return c
    return None


def _rational_pow(q: Fraction, p: Fraction):
    """q ** p as an exact Fraction, or None when irrational/undefined."""
    if q == 0:
        return Fraction(0) if p > 0 else None
    if p.denominator == 1:
        return q ** p.numerator
    sign = 1
    base = q
    if q < 0:
        if p.denominator % 2 == 0:
            return None
        sign = -1
        base = -q
    rn = _iroot(base.numerator, p.denominator)
    rd = _iroot(base.denominator, p.denominator)
    if rn is None or rd is None:
        return None
    root = Fraction(rn, rd)
    if sign < 0:
        root = -root
    return root ** p.numerator


def _leading_negative(e: Expr) -> bool:
    if isinstance(e, Add):
        e = e.args[0]
    c, _ = _split_coeff(e)
    return c < 0


def _add_content(b: Add):
    """(signed rational content, primitive sum with positive leading term)."""
    g = 0
    lcm_den = 1
    for a in b.args:
        c = _split_coeff(a)[0]
        g = gcd(g, abs(c.numerator))
        lcm_den = lcm_den * c.denominator // gcd(lcm_den, c.denominator)
    content = Fraction(g, lcm_den)
    if content == 0:
        return Fraction(1), b
    if _split_coeff(b.args[0])[0] < 0:
        content = -content
    if content == 1:
        return Fraction(1), b
    prim = add_norm([mul_norm([Const(1 / content), a]) for a in b.args])
    if not isinstance(prim, Add):  # degenerate, keep as-is
        return Fraction(1), b
    return content, prim


def _negated(e: Expr) -> Expr:
    return mul_norm([MINUS_ONE, e])


# ---------------------------------------------------------------------------
# Pow
# ---------------------------------------------------------------------------

def pow_norm(base: Expr, q) -> Expr:
    q = q if isinstance(q, Fraction) else Fraction(q)
    if q == 0:
        return ONE
    if q == 1:
        return base

    if isinstance(base, Const):
        v = _rational_pow(base.value, q)
        if v is not None:
            return Const(v)
        if base.value < 0 and q.denominator % 2 == 1:
            sign = -1 if q.numerator % 2 else 1
            return mul_norm([Const(sign), pow_norm(Const(-base.value), q)])
        return Pow(base, q)

    if isinstance(base, Pow):
        a = base.exponent
        if q.denominator == 1:
            return pow_norm(base.base, a * q)
        if a.denominator == 1:
            if a.numerator % 2 == 0:
                return pow_norm(fn_norm("abs", base.base), a * q)
            return pow_norm(base.base, a * q)
        if a.denominator % 2 == 0 or is_nonneg(base.base):
            return pow_norm(base.base, a * q)
        return Pow(base, q)

    if isinstance(base, Fn):
        if base.name == "exp":
            return fn_norm("exp", mul_norm([Const(q), base.arg]))
        if base.name == "abs":
            shift = 2 * (q.numerator // (2 * q.denominator))
            rem = q - shift
            if shift:
                outer = pow_norm(base.arg, Fraction(shift))
                if rem == 0:
                    return outer
                inner = base if rem == 1 else Pow(base, rem)
                return mul_norm([outer, inner])
            return Pow(base, q)
        if base.name == "sign":
            if q.denominator == 1:
                return base if q.numerator % 2 else ONE
            if q.denominator % 2 == 0 or q.numerator % 2 == 0:
                return ONE
            return base
        return Pow(base, q)

    if isinstance(base, Mul):
        if q.denominator == 1:
            return mul_norm([pow_norm(f, q) for f in base.args])
        outside, inside = [], []
        for f in base.args:
            if (isinstance(f, Const) and f.value > 0) or is_nonneg(f):
                outside.append(pow_norm(f, q))
            else:
                inside.append(f)
        if not inside:
            return mul_norm(outside)
        if not outside:
            return Pow(base, q)
        if len(inside) == 1:
            return mul_norm(outside + [pow_norm(inside[0], q)])
        rest = Mul(*sorted(inside, key=lambda f: f.sort_key()))
        return mul_norm(outside + [Pow(rest, q)])

    if isinstance(base, Add):
        content, prim = _add_content(base)
        if content != 1:
            if q.denominator == 1 or content > 0:
                return mul_norm([pow_norm(Const(content), q), pow_norm(prim, q)])
            inner = mul_norm([MINUS_ONE, prim])
            return mul_norm([pow_norm(Const(-content), q), Pow(inner, q)])
        if q.denominator == 1 and q >= 2:
            return _expand_int_pow(base, q.numerator)
        return Pow(base, q)

    return Pow(base, q)


def _expand_int_pow(add_expr: Add, n: int) -> Expr:
    result = ONE
    for _ in range(n):
        result = mul_norm([result, add_expr])
    return result


# ---------------------------------------------------------------------------
# Fn
# ---------------------------------------------------------------------------

def fn_norm(name: str, a: Expr) -> Expr:
    if name == "sqrt":
        return pow_norm(a, _HALF)

    if name == "exp":
        if a == ZERO:
            return ONE
        if isinstance(a, Fn) and a.name == "ln":
            return a.arg
        terms = list(a.args) if isinstance(a, Add) else [a]
        pulled, kept = [], []
        for term in terms:
            c, key = _split_coeff(term)
            if key is not None and isinstance(key, Fn) and key.name == "ln":
                pulled.append(pow_norm(key.arg, c))
            else:
                kept.append(term)
        if pulled:
            if kept:
                pulled.append(Fn("exp", add_norm(kept)))
            return mul_norm(pulled)
        return Fn("exp", a)

    if name == "ln":
        if a == ONE:
            return ZERO
        if isinstance(a, Fn) and a.name == "exp":
            return a.arg
        return Fn("ln", a)

    if name == "abs":
        if isinstance(a, Const):
            return Const(abs(a.value))
        if is_nonneg(a):
            return a
        if isinstance(a, Mul):
            return mul_norm([fn_norm("abs", f) for f in a.args])
        if isinstance(a, Pow):
            return pow_norm(fn_norm("abs", a.base), a.exponent)
        if isinstance(a, Fn):
            if a.name in ("abs", "exp"):
                return a
            if a.name == "sign":
                return ONE  # off the zero set
        return Fn("abs", a)

    if name == "sign":
        if isinstance(a, Const):
            v = a.value
            return Const(0 if v == 0 else (1 if v > 0 else -1))
        if is_nonneg(a):
            return ONE  # off the zero set
        if isinstance(a, Mul):
            return mul_norm([fn_norm("sign", f) for f in a.args])
        if isinstance(a, Pow):
            q = a.exponent
            if q.denominator % 2 == 0 or q.numerator % 2 == 0:
                return ONE
            return fn_norm("sign", a.base)
        if isinstance(a, Fn):
            if a.name == "sign":
                return a
            if a.name in ("abs", "exp"):
                return ONE
        return Fn("sign", a)

    if name in ("sin", "arctan"):
        if a == ZERO:
            return ZERO
        if _leading_negative(a):
            return mul_norm([MINUS_ONE, fn_norm(name, _negated(a))])
        if name == "sin" and isinstance(a, Fn) and a.name == "arctan":
            u = a.arg
            denom = pow_norm(add_norm([ONE, pow_norm(u, Fraction(2))]), Fraction(-1, 2))
            return mul_norm([u, denom])
        return Fn(name, a)

    if name == "cos":
        if a == ZERO:
            return ONE
        if _leading_negative(a):
            return fn_norm("cos", _negated(a))
        if isinstance(a, Fn) and a.name == "arctan":
            u = a.arg
            return pow_norm(add_norm([ONE, pow_norm(u, Fraction(2))]), Fraction(-1, 2))
        return Fn("cos", a)

    raise ValueError(f"unknown function {name!r}")


# ---------------------------------------------------------------------------
# Mul
# ---------------------------------------------------------------------------

def mul_norm(factors: list) -> Expr:
    coeff = Fraction(1)
    table: dict = {}  # base sort_key -> [base, exponent]

    def push(f: Expr):
        nonlocal coeff
        if isinstance(f, Const):
            coeff *= f.value
            return
        if isinstance(f, Mul):
            for g in f.args:
                push(g)
            return
        b, q = _base_exp(f)
        if isinstance(b, Add):
            content, prim = _add_content(b)
            if content != 1:
                pulled = _rational_pow(content, q)
                if pulled is not None:
                    coeff *= pulled
                    b = prim
        k = b.sort_key()
        if k in table:
            table[k][1] += q
        else:
            table[k] = [b, q]

    for f in factors:
        push(f)
    if coeff == 0:
        return ZERO

    for _ in range(_MAX_LOOPS):
        changed = False

        # merge exp factors; exp(u)^q contributes exp(q*u)
        exp_keys = [k for k, (b, q) in table.items() if isinstance(b, Fn) and b.name == "exp"]
        if len(exp_keys) > 1 or (exp_keys and table[exp_keys[0]][1] != 1):
            args = []
            for k in exp_keys:
                b, q = table[k]
                args.append(b.arg if q == 1 else mul_norm([Const(q), b.arg]))
                del table[k]
            push(fn_norm("exp", add_norm(args)))
            changed = True

        # sign/abs interaction: sign(e)*abs(e)^b = e*abs(e)^(b-1),
        # sign(e)*e^n = abs(e)*e^(n-1)
        for k in list(table.keys()):
            if k not in table:
                continue
            b, q = table[k]
            if not (isinstance(b, Fn) and b.name == "sign") or q == 0:
                continue
            if q.denominator == 1 and q.numerator % 2 == 0:
                del table[k]
                changed = True
                continue
            inner = b.arg
            abs_key = Fn("abs", inner).sort_key()
            plain_key = inner.sort_key()
            if abs_key in table and table[abs_key][1] != 0:
                table[abs_key][1] -= 1
                table[k][1] -= 1
                if table[k][1] == 0:
                    del table[k]
                push(inner)
                changed = True
            elif (
                plain_key in table
                and table[plain_key][1].denominator == 1
                and table[plain_key][1] != 0
            ):
                table[plain_key][1] -= 1
                table[k][1] -= 1
                if table[k][1] == 0:
                    del table[k]
                push(Fn("abs", inner))
                changed = True

        # fold constants, drop zero exponents, re-fire power rules
        # (sum bases are handled by the partition below, not re-expanded here)
        for k in list(table.keys()):
            b, q = table[k]
            if q == 0:
                del table[k]
                changed = True
                continue
            if isinstance(b, Add):
                continue
            if isinstance(b, Const) and q.denominator == 1 and not (b.value == 0 and q < 0):
                del table[k]
                coeff *= b.value ** q.numerator
                changed = True
                continue
            rebuilt = pow_norm(b, q)
            plain = b if q == 1 else Pow(b, q)
            if rebuilt != plain:
                del table[k]
                push(rebuilt)
                changed = True

        if coeff == 0:
            return ZERO
        if not changed:
            break

    # partition: expandable sum factors / kept composite powers / monomials
    sums, addpow_entries, monos = [], [], []
    for b, q in table.values():
        if isinstance(b, Add):
            if q == 1:
                sums.append(b)
            elif q.denominator == 1 and q >= 2:
                sums.extend([b] * q.numerator)
            else:
                addpow_entries.append([b, q])
        else:
            monos.append(b if q == 1 else Pow(b, q))

    # recapture expanded perfect powers of a present denominator base, so
    # that e.g. (25 + 10t + t^2) * (5 + t)^(-2) collapses to 1
    if sums and addpow_entries:
        leftover = []
        for s in sums:
            hit = False
            for entry in addpow_entries:
                k, content = _match_power(s, entry[0])
                if k:
                    entry[1] += k
                    coeff *= content
                    hit = True
                    break
            if not hit:
                leftover.append(s)
        sums = leftover
        for entry in list(addpow_entries):
            b, q = entry
            if q == 0:
                addpow_entries.remove(entry)
            elif q.denominator == 1 and q >= 1:
                sums.extend([b] * q.numerator)
                addpow_entries.remove(entry)
    addpows = [Pow(b, q) for b, q in addpow_entries]

    if not sums:
        return _make_mul(coeff, monos + addpows)

    terms = [ONE]
    for s in sums:
        terms = [mul_norm([term, a]) for term in terms for a in s.args]
    head = _make_mul(coeff, monos)
    terms = [mul_norm([head, term]) for term in terms]
    numerator = add_norm(terms)
    if not addpows:
        return numerator
    return _attach_denominators(numerator, addpows)


def _match_power(s: Expr, base: Add):
    """(k, c) with s = c * base**k for an integer k >= 2 and rational c,
    else (0, None)."""
    if not isinstance(s, Add) or len(s.args) < len(base.args):
        return 0, None
    content, prim = _add_content(s)
    for k in range(2, 7):
        expanded = _expand_int_pow(base, k)
        if expanded == prim:
            return k, content
        if isinstance(expanded, Add) and len(expanded.args) > len(prim.args):
            return 0, None
    return 0, None


def _split_common_monomial(add_expr: Add):
    """(common factors, reduced sum) pulling the factor powers shared by
    every term of the sum, or (None, add_expr) when there are none."""
    common = None
    for term in add_expr.args:
        _, key = _split_coeff(term)
        fmap = {}
        if key is not None:
            for f in _factors(key):
                b, q = _base_exp(f)
                fmap[b.sort_key()] = (b, q)
        if common is None:
            common = fmap
        else:
            kept = {}
            for k, (b, q) in common.items():
                if k in fmap:
                    kept[k] = (b, min(q, fmap[k][1]))
            common = kept
        if not common:
            return None, add_expr
    factors = [b if q == 1 else Pow(b, q) for b, q in common.values()]
    inverse = [Pow(b, -q) for b, q in common.values()]
    reduced = add_norm([mul_norm([term] + inverse) for term in add_expr.args])
    return factors, reduced


def _attach_denominators(numerator: Expr, addpows: list) -> Expr:
    """Multiply a canonical numerator by kept Pow(sum, q) factors without
    redistributing the numerator over them."""
    if numerator == ZERO:
        return ZERO
    nc, nkey = _split_coeff(numerator)
    if nkey is not None and isinstance(nkey, Add):
        probe = nkey
        pulled = None
        for i, f in enumerate(addpows):
            b, q = _base_exp(f)
            k, content = _match_power(probe, b)
            if not k and pulled is None:
                pulled, reduced = _split_common_monomial(nkey)
                if pulled is not None and isinstance(reduced, Add):
                    probe = reduced
                    k, content = _match_power(probe, b)
            if k:
                head = [Const(nc * content), pow_norm(b, q + k)] + list(pulled or [])
                rest = addpows[:i] + addpows[i + 1 :]
                return _attach_denominators(mul_norm(head), rest)
    nb, nq = _base_exp(numerator)
    rest = []
    for f in addpows:
        b, q = _base_exp(f)
        if nb == b:
            numerator = pow_norm(b, q + nq)
            nb, nq = _base_exp(numerator)
        else:
            rest.append(f)
    if not rest:
        return numerator
    coeff, key = _split_coeff(numerator)
    if key is None:
        return _make_mul(coeff, rest)
    if isinstance(key, Add):
        return _make_mul(coeff, [key] + rest)
    return _make_mul(coeff, _factors(key) + rest)


# ---------------------------------------------------------------------------
# Add
# ---------------------------------------------------------------------------

def add_norm(terms: list) -> Expr:
    csum = Fraction(0)
    table: dict = {}  # key sort_key -> [key expr, coeff]

    def push(term: Expr):
        nonlocal csum
        if isinstance(term, Add):
            for a in term.args:
                push(a)
            return
        c, key = _split_coeff(term)
        if key is None:
            csum += c
            return
        k = key.sort_key()
        if k in table:
            table[k][1] += c
        else:
            table[k] = [key, c]

    for term in terms:
        push(term)

    csum += _pythagorean(table)

    for k in list(table.keys()):
        if table[k][1] == 0:
            del table[k]

    if len(table) + (1 if csum != 0 else 0) > 1 and _has_sum_denominator(table):
        return _combine_over_denominator(table, csum)

    entries = sorted(table.values(), key=lambda kc: kc[0].sort_key())
    out = []
    if csum != 0:
        out.append(Const(csum))
    out.extend(_make_term(c, key) for key, c in entries)
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(*out)


def _pythagorean(table: dict) -> Fraction:
    """c1*M*sin(u)^2 + c2*M*cos(u)^2 -> (c1-c2)*M*sin(u)^2 + c2*M.

    Returns the constant contribution produced when the cofactor M is empty.
    """
    const_extra = Fraction(0)
    changed = True
    while changed:
        changed = False
        for k in list(table.keys()):
            if k not in table:
                continue
            key, c1 = table[k]
            facs = _factors(key)
            hit = None
            for i, f in enumerate(facs):
                if (
                    isinstance(f, Pow)
                    and f.exponent == 2
                    and isinstance(f.base, Fn)
                    and f.base.name == "sin"
                ):
                    hit = (i, f.base.arg)
                    break
            if hit is None:
                continue
            i, u = hit
            partner_facs = list(facs)
            partner_facs[i] = Pow(Fn("cos", u), Fraction(2))
            pk = _make_mul(Fraction(1), partner_facs).sort_key()
            if pk not in table:
                continue
            c2 = table[pk][1]
            del table[pk]
            table[k][1] = c1 - c2
            if table[k][1] == 0:
                del table[k]
            cof = [f for j, f in enumerate(facs) if j != i]
            if not cof:
                const_extra += c2
            else:
                cof_expr = cof[0] if len(cof) == 1 else Mul(*cof)
                ck = cof_expr.sort_key()
                if ck in table:
                    table[ck][1] += c2
                else:
                    table[ck] = [cof_expr, c2]
            changed = True
    return const_extra


def _is_sum_denominator(f: Expr) -> bool:
    return (
        isinstance(f, Pow)
        and isinstance(f.base, Add)
        and f.exponent.denominator == 1
        and f.exponent < 0
    )


def _has_sum_denominator(table: dict) -> bool:
    return any(
        any(_is_sum_denominator(f) for f in _factors(key)) for key, _ in table.values()
    )


def _combine_over_denominator(table: dict, csum: Fraction) -> Expr:
    dens: dict = {}  # base sort_key -> [base, max multiplicity]
    for key, _ in table.values():
        for f in _factors(key):
            if _is_sum_denominator(f):
                k = f.base.sort_key()
                m = -f.exponent.numerator
                if k in dens:
                    dens[k][1] = max(dens[k][1], m)
                else:
                    dens[k] = [f.base, m]

    all_terms = [(key, c) for key, c in table.values()]
    if csum != 0:
        all_terms.append((None, csum))
    new_terms = []
    for key, c in all_terms:
        keep = []
        have: dict = {}
        if key is not None:
            for f in _factors(key):
                if _is_sum_denominator(f):
                    bk = f.base.sort_key()
                    have[bk] = have.get(bk, 0) + (-f.exponent.numerator)
                else:
                    keep.append(f)
        mults = []
        for bk, (b, m) in dens.items():
            need = m - have.get(bk, 0)
            if need > 0:
                mults.append(pow_norm(b, Fraction(need)))
        new_terms.append(mul_norm([Const(c)] + keep + mults))

    numerator = add_norm(new_terms)
    denpows = [Pow(b, Fraction(-m)) for b, m in dens.values()]
    return _attach_denominators(numerator, denpows)
