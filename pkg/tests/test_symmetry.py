import random
from fractions import Fraction

import pytest

from bkdv.errors import DependentBasis, InvariantViolation
from bkdv.expr import Add, Const, Mul, Var, ZERO, diff, parse, simplify
from bkdv.model import loads
from bkdv.symmetry import (
    D,
    KInvariants,
    P,
    S,
    SymmetryStatus,
    VectorField,
    commutator,
    determining_residuals,
    is_symmetry,
    k_invariants,
    parse_vector_field,
)

t = Var("t")

BURGERS = loads("r = 2\nA2 = 1\n")
KDV = loads("r = 3\nA3 = 1\n")


def _rand_poly(rng, deg=3):
    return simplify(
        Add(*[Mul(Const(Fraction(rng.randint(-4, 4))), parse(f"t^{k}")) for k in range(deg + 1)])
    )


def _rand_field(rng):
    return VectorField(_rand_poly(rng), _rand_poly(rng), _rand_poly(rng))


# ---------------------------------------------------------------------------
# commutator against an independent coordinate-level bracket
# ---------------------------------------------------------------------------

def _coord_apply(comps, f):
    return simplify(
        Add(
            Mul(comps[0], diff(f, "t")),
            Mul(comps[1], diff(f, "x")),
            Mul(comps[2], diff(f, "u")),
        )
    )


def _coord_bracket(q1, q2):
    c1 = q1.coordinate_components()
    c2 = q2.coordinate_components()
    return tuple(
        simplify(Add(_coord_apply(c1, c2[i]), Mul(Const(-1), _coord_apply(c2, c1[i]))))
        for i in range(3)
    )


def test_commutator_printed_relations():
    assert commutator(S(1), P(1)) == P(-1)
    assert commutator(D(t), P(1)).is_zero_field()
    assert commutator(D(1), D(t)) == D(1)
    assert commutator(D(t), S(parse("t^2"))) == S(parse("2*t^2"))


def test_commutator_matches_coordinate_bracket():
    rng = random.Random(1)
    for _ in range(25):
        q1, q2 = _rand_field(rng), _rand_field(rng)
        got = commutator(q1, q2).coordinate_components()
        want = _coord_bracket(q1, q2)
        assert got == want


def test_commutator_antisymmetry_and_jacobi():
    rng = random.Random(2)
    for _ in range(15):
        a, b, c = _rand_field(rng), _rand_field(rng), _rand_field(rng)
        assert commutator(a, b).plus(commutator(b, a)).is_zero_field()
        jac = (
            commutator(a, commutator(b, c))
            .plus(commutator(b, commutator(c, a)))
            .plus(commutator(c, commutator(a, b)))
        )
        assert jac.is_zero_field()


# ---------------------------------------------------------------------------
# classifying residuals
# ---------------------------------------------------------------------------

def test_time_translation_on_time_independent_equation():
    eq = loads("r = 2\nA2 = exp(x)\nA0 = x\nB = x^2\n")
    res = determining_residuals(D(1), eq)
    assert all(v == ZERO for v in res.values())


def test_scaling_on_linear_profile_equation():
    eq = loads("r = 2\nA2 = alpha*t^2*x^2\nB = beta*t*x\nparam.alpha = 1\nparam.beta = 2\n")
    res = determining_residuals(S(1), eq)
    assert all(v == ZERO for v in res.values())


def test_space_translation_on_burgers():
    res = determining_residuals(P(1), BURGERS)
    assert all(v == ZERO for v in res.values())


def test_scaling_not_symmetry_of_burgers():
    res = determining_residuals(S(1), BURGERS)
    assert res["R2"] == Const(-2)
    assert is_symmetry(S(1), BURGERS) is SymmetryStatus.NO


def test_is_symmetry_yes():
    assert is_symmetry(D(1), BURGERS) is SymmetryStatus.YES
    assert is_symmetry(parse_vector_field("D(t^2)+S(t)"), BURGERS) is SymmetryStatus.YES
    assert is_symmetry(parse_vector_field("D(t)+S(1/3)"), KDV) is SymmetryStatus.YES


def test_is_symmetry_unknown_documented_case():
    # A2 carries a residual the rewriting system cannot prove zero (no
    # double-angle rule) although it vanishes at every probe point
    eq = loads("r = 2\nA2 = 1 + sin(2*t) - 2*sin(t)*cos(t)\n")
    assert is_symmetry(D(1), eq) is SymmetryStatus.UNKNOWN


# ---------------------------------------------------------------------------
# k-invariants
# ---------------------------------------------------------------------------

def test_k_invariants_canonical_r3():
    basis = [P(1), P(t), D(1), parse_vector_field("D(t)+S(1/3)")]
    assert k_invariants(basis).as_tuple() == (2, 0, 2)


def test_k_invariants_canonical_r2():
    basis = [
        P(1),
        P(t),
        D(1),
        parse_vector_field("D(t)+S(1/2)"),
        parse_vector_field("D(t^2)+S(t)"),
    ]
    k = k_invariants(basis)
    assert k.as_tuple() == (2, 0, 3)
    k.check(2)
    with pytest.raises(InvariantViolation):
        k.check(3)  # k3=3 with k1=2 is admissible only for r=2


def test_k_invariants_single_scaling():
    assert k_invariants([S(1)]).as_tuple() == (0, 1, 0)


def test_k_invariants_dependent_basis():
    with pytest.raises(DependentBasis):
        k_invariants([P(1), P(t), P(parse("1+t"))])


def test_k_constraint_rejections():
    with pytest.raises(InvariantViolation):
        KInvariants(1, 0, 0).check(2)
    with pytest.raises(InvariantViolation):
        KInvariants(0, 1, 2).check(2)
    with pytest.raises(InvariantViolation):
        KInvariants(2, 0, 3).check(3)


# ---------------------------------------------------------------------------
# shorthand parsing
# ---------------------------------------------------------------------------

def test_parse_vector_field():
    q = parse_vector_field("D(t^2) + S(t)")
    assert q.tau == parse("t^2") and q.zeta == t and q.chi == ZERO
    q2 = parse_vector_field("D(t) - S(1/3)")
    assert q2.zeta == Const(Fraction(-1, 3))
    q3 = parse_vector_field("-P(1)")
    assert q3.chi == Const(-1)


def test_vector_field_requires_time_functions():
    from bkdv.errors import NotTimeFunction

    with pytest.raises(NotTimeFunction):
        VectorField(parse("x"), ZERO, ZERO)
