import random
from fractions import Fraction

import pytest

from bkdv.classify import (
    ClassificationResult,
    alt_case_transformations,
    c6_extension_fields,
    classify,
    footnote_shift_fields,
    instantiate_case,
    maximality_check_case6,
    sample_form_preserving,
)
from bkdv.equivalence import apply_gauged
from bkdv.errors import InadmissibleParams
from bkdv.expr import Fn, Mul, Var, ZERO, parse, simplify
from bkdv.model import loads
from bkdv.symmetry import SymmetryStatus, is_symmetry, parse_vector_field

t = Var("t")
BURGERS = loads("r = 2\nA2 = 1\n")
KDV = loads("r = 3\nA3 = 1\n")


# ---------------------------------------------------------------------------
# instantiation
# ---------------------------------------------------------------------------

def test_instantiate_canonical_r2():
    eq, basis = instantiate_case("C8", 2, {})
    assert eq.coeff(2) == parse("1") and eq.A0 == ZERO and eq.B == ZERO
    labels = [q.label() for q in basis]
    assert labels == ["P(1)", "P(t)", "D(1)", "D(t) + S(1/2)", "D(t^2) + S(t)"]
    assert all(is_symmetry(q, eq) is SymmetryStatus.YES for q in basis)


def test_instantiate_canonical_r3_has_four_generators():
    eq, basis = instantiate_case("C8", 3, {})
    assert len(basis) == 4


def test_instantiate_shift_boost_distinct_rates():
    # chi_tt = a0 chi_t + b chi with a0 = 3, b = -2 has rates 2 and 1
    eq, basis = instantiate_case("C7", 2, {"a": {2: 1}, "a0": 3, "b": -2})
    assert basis[0].chi == parse("exp(2*t)")
    assert basis[1].chi == parse("exp(t)")
    assert all(is_symmetry(q, eq) is SymmetryStatus.YES for q in basis)


def test_footnote_branches_are_symmetries():
    # one draw per sign of the discriminant a0^2 + 4b
    for a0, b, branch in ((3, -2, "a"), (2, -1, "b"), (0, -1, "c")):
        chi1, chi2, got_branch, _ = footnote_shift_fields(a0, b)
        assert got_branch == branch
        eq, basis = instantiate_case("C7", 2, {"a": {2: 1}, "a0": a0, "b": b})
        assert all(is_symmetry(q, eq) is SymmetryStatus.YES for q in basis)
    # printed shapes
    assert footnote_shift_fields(2, -1)[1] == simplify(Mul(t, Fn("exp", t)))
    c1, c2, _, _ = footnote_shift_fields(0, -1)
    assert c1 == parse("cos(t)") and c2 == parse("sin(t)")


def test_instantiate_power_profile():
    eq, basis = instantiate_case("C2b", 2, {"a": {2: 1}, "nu": 1})
    assert eq.coeff(2) == parse("x^2*abs(x)")
    assert [q.label() for q in basis] == ["D(1)", "D(t) - S(1)"]
    assert all(is_symmetry(q, eq) is SymmetryStatus.YES for q in basis)


def test_instantiate_rejects_inadmissible():
    with pytest.raises(InadmissibleParams):
        instantiate_case("C8", 2, {"ar": 0})
    with pytest.raises(InadmissibleParams):
        instantiate_case("C2b", 2, {"a": {2: 1}, "nu": 0})


# ---------------------------------------------------------------------------
# classification landmarks
# ---------------------------------------------------------------------------

def test_classify_burgers():
    res = classify(BURGERS)
    assert res.case == "C8" and res.number == 12
    assert res.dim == 5
    assert any(q.label() == "D(t^2) + S(t)" for q in res.basis)
    assert res.k.as_tuple() == (2, 0, 3)
    assert res.maximal == "Certified"


def test_classify_kdv():
    res = classify(KDV)
    assert res.case == "C8"
    assert res.dim == 4
    assert res.k.as_tuple() == (2, 0, 2)


def test_classify_generic_fallback():
    eq = loads("r = 2\nA2 = exp(t)*(1 + x^2)\n")
    res = classify(eq)
    assert res.case == "C0"
    assert res.basis == [] and res.maximal == "NotCertified"
    assert res.k.as_tuple() == (0, 0, 0)


def test_classify_roundtrip_samples():
    rng = random.Random(101)
    nz = lambda: Fraction(rng.choice([-2, -1, 1, 2, 3]))
    poly = lambda: simplify(parse("t^2") * nz() + t * nz() + nz())
    xpoly = lambda: simplify(parse("x^2") * nz() + Var("x") * nz() + nz())
    draws = [
        ("C1", 2, lambda: {"A": {2: xpoly()}, "A0": xpoly(), "B": xpoly()}),
        ("C2a", 2, lambda: {"a": {2: nz()}, "a0": nz(), "b": nz()}),
        ("C2b", 3, lambda: {"a": {2: nz(), 3: nz()}, "a0": nz(), "b": nz(), "nu": Fraction(3, 2)}),
        ("C3", 3, lambda: {"a": {2: nz(), 3: nz()}, "b": nz()}),
        ("C4a", 2, lambda: {"alpha": {2: poly()}, "beta": poly()}),
        ("C4b", 2, lambda: {"alpha": {2: poly()}, "beta": poly()}),
        ("C5a", 2, lambda: {"a": {2: nz()}, "b": nz()}),
        ("C5b", 3, lambda: {"a": {2: nz(), 3: nz()}, "b": nz()}),
        ("C6", 2, lambda: {"alpha": {2: simplify(parse("t^2") * nz() + t * nz() + nz())}}),
        ("C7", 3, lambda: {"a": {2: nz(), 3: nz()}, "a0": nz(), "b": nz()}),
        ("C8", 5, lambda: {"ar": nz()}),
    ]
    for case, r, mk in draws:
        for _ in range(3):
            params = mk()
            if case == "C7":
                a0, b = params["a0"], params["b"]
                if (r - 2) ** 2 * b == (r - 1) * a0 * a0:
                    continue
            eq, basis = instantiate_case(case, r, params)
            if case == "C6" and maximality_check_case6(eq) != "NoExtension":
                continue  # extension-tripping draw, rejected by the property
            res = classify(eq)
            assert res.case == case, (case, params, res.case, res.constants)
            assert res.dim == len(basis)


def test_classify_escalation_forced_burgers():
    # A^0 = 0 with linear forcing B = b x carries the full canonical algebra
    eq = loads("r = 2\nA2 = 1\nB = x\n")
    res = classify(eq)
    assert res.case == "C8" and res.escalated_from == "C7"
    assert res.dim == 5
    assert res.k.as_tuple() == (2, 0, 3)


def test_classify_escalation_r3():
    # (r-2)^2 b = (r-1) a0^2 with r=3, a0=1 forces b=2
    eq = loads("r = 3\nA3 = 1\nA0 = 1\nB = 2*x\n")
    res = classify(eq)
    assert res.case == "C8" and res.escalated_from == "C7"
    assert res.dim == 4
    assert res.k.as_tuple() == (2, 0, 2)


def test_classify_near_escalation_stays():
    eq = loads("r = 3\nA3 = 1\nA0 = 1\nB = 3*x\n")
    res = classify(eq)
    assert res.case == "C7"
    assert res.dim == 3


# ---------------------------------------------------------------------------
# shift-boost extension test
# ---------------------------------------------------------------------------

def test_c6_extension_constant_profile():
    eq, _ = instantiate_case("C6", 2, {"alpha": {2: parse("1")}})
    assert maximality_check_case6(eq) == "Extension"


def test_c6_no_extension_gaussian_profile():
    eq, _ = instantiate_case("C6", 2, {"alpha": {2: parse("exp(t^2)")}})
    assert maximality_check_case6(eq) == "NoExtension"


def test_c6_generic_polynomials_no_extension():
    rng = random.Random(5)
    for _ in range(5):
        alpha = simplify(
            parse("t^3") * Fraction(rng.randint(1, 3))
            + t * Fraction(rng.randint(-3, 3))
            + Fraction(rng.randint(1, 4))
        )
        eq, _ = instantiate_case("C6", 2, {"alpha": {2: alpha}})
        assert maximality_check_case6(eq) == "NoExtension"


# ---------------------------------------------------------------------------
# alternative representations
# ---------------------------------------------------------------------------

def test_alt_10b_to_a():
    g, sigma = alt_case_transformations("10b->a", 2, -1)  # double rate mu = 1
    assert g.T == t and g.X1 == parse("exp(-t)") and g.X0 == ZERO
    assert sigma == parse("-1")


def test_alt_10a_requires_distinct_rates():
    with pytest.raises(InadmissibleParams):
        alt_case_transformations("10a->b", 2, -1)


def test_alt_roundtrip_classifies_as_extended_c6():
    eq, _ = instantiate_case("C7", 2, {"a": {2: 1}, "a0": 2, "b": -1})
    g, sigma = alt_case_transformations("10b->a", 2, -1)
    image = apply_gauged(g, eq)
    res = classify(image)
    assert res.case == "C6"
    assert res.dim == 3
    assert res.k.as_tuple() == (2, 0, 1)


def test_alt_trig_branch_roundtrip():
    eq, _ = instantiate_case("C7", 2, {"a": {2: 1}, "a0": 2, "b": -2})  # mu=1, nu=1
    g, sigma = alt_case_transformations("10c->c", 2, -2)
    image = apply_gauged(g, eq)
    assert simplify(image.A0) == ZERO and simplify(image.B) == ZERO
    assert image.coeff(2) == parse("exp(-2*arctan(t))")
    res = classify(image)
    assert res.case == "C6" and res.k.as_tuple() == (2, 0, 1)


# ---------------------------------------------------------------------------
# stability under form-preserving transformations
# ---------------------------------------------------------------------------

def test_classification_stable_under_form_preserving_maps():
    rng = random.Random(77)
    nz = lambda: Fraction(rng.choice([-2, -1, 1, 2]))
    cases = [
        ("C1", 2, {"A": {2: parse("1 + x^2")}, "A0": parse("x"), "B": parse("x^3")}),
        ("C2a", 2, {"a": {2: 1}, "a0": 2, "b": 1}),
        ("C2b", 2, {"a": {2: 2}, "a0": 1, "b": 1, "nu": Fraction(1, 2)}),
        ("C3", 2, {"a": {2: 1}, "b": 2}),
        ("C4a", 2, {"alpha": {2: parse("1 + t^2")}, "beta": parse("t")}),
        ("C5b", 2, {"a": {2: 2}, "b": 1}),
        ("C6", 3, {"alpha": {2: parse("t"), 3: parse("1 + t^3")}}),
        ("C7", 2, {"a": {2: 1}, "a0": 1, "b": 1}),
        ("C8", 2, {}),
        ("C8", 3, {}),
    ]
    for case, r, params in cases:
        eq, _ = instantiate_case(case, r, params)
        base = classify(eq)
        assert base.case == case
        for _ in range(3):
            g = sample_form_preserving(case, r, rng)
            moved = classify(apply_gauged(g, eq))
            assert moved.case == case, (case, g.to_json(), moved.case)
            assert moved.k.as_tuple() == base.k.as_tuple()
