import numpy as np
import pytest

from bkdv.errors import InvariantViolation, MissingKey
from bkdv.model import (
    Equation,
    GaugedEquation,
    GridSolution,
    dumps,
    is_gauged,
    load_grid,
    loads,
    save_grid,
    to_gauged,
)
from bkdv.expr import Const, ONE, ZERO, parse


BURGERS = "r = 2\nC = 1\nA1 = 0\nA0 = 0\nA2 = 1\nB = 0\n"


def test_load_burgers_is_gauged():
    eq = loads(BURGERS)
    assert isinstance(eq, GaugedEquation)
    assert eq.r == 2
    assert eq.coeff(2) == ONE
    assert eq.A0 == ZERO and eq.B == ZERO


def test_load_rejects_vanishing_ar():
    with pytest.raises(InvariantViolation):
        loads("r = 2\nA2 = 0\n")


def test_load_general_equation_with_param():
    eq = loads("r = 3\nC = exp(x)\nA3 = a3\nA2 = 0\nA1 = 0\nA0 = 0\nB = 0\nparam.a3 = 1\n")
    assert isinstance(eq, Equation)
    assert eq.C == parse("exp(x)")
    assert eq.params["a3"] == 1


def test_missing_keys():
    with pytest.raises(MissingKey):
        loads("C = 1\nA2 = 1\n")
    with pytest.raises(MissingKey):
        loads("r = 3\nA2 = 1\n")


def test_defaults():
    eq = loads("r = 2\nA2 = 1\n")
    assert isinstance(eq, GaugedEquation)  # C defaults to 1, A1 to 0
    assert eq.A0 == ZERO and eq.B == ZERO


def test_roundtrip_dump_load():
    eq = loads("r = 3\nC = 2\nA3 = t\nA1 = x\nB = x^2\n")
    again = loads(dumps(eq))
    assert isinstance(again, Equation)
    assert again.r == eq.r
    assert again.C == eq.C
    assert again.A == eq.A
    assert again.B == eq.B


def test_is_gauged_flags():
    assert is_gauged(loads(BURGERS))
    eq = loads("r = 2\nC = 2\nA2 = 1\n")
    assert not is_gauged(eq)
    eq2 = loads("r = 2\nC = 1\nA1 = x\nA2 = 1\n")
    assert not is_gauged(eq2)


def test_to_gauged_conversion():
    eq = loads("r = 2\nC = 1\nA1 = 0\nA2 = 1 + t\nB = x\n")
    g = to_gauged(eq)
    assert isinstance(g, GaugedEquation)
    assert g.coeff(2) == parse("1 + t")


def test_table_style_instances_accepted():
    # a few gauged normal forms with nonzero leading coefficient
    for text in (
        "r = 2\nA2 = a2*exp(x)\nA0 = 3*exp(x)\nB = exp(2*x)\nparam.a2 = 2\n",
        "r = 3\nA3 = x^3\nB = x\n",
        "r = 5\nA5 = 1\nA3 = 2\n",
    ):
        eq = loads(text)
        assert isinstance(eq, GaugedEquation)


def test_grid_roundtrip(tmp_path):
    u = np.linspace(0.0, 1.0, 12).reshape(3, 4)
    sol = GridSolution(0.0, 1.0, -1.0, 1.0, u)
    path = tmp_path / "sol.grid"
    save_grid(sol, path)
    again = load_grid(path)
    assert again.nt == 3 and again.nx == 4
    assert np.array_equal(again.u, u)
    assert again.dt == pytest.approx(0.5)


def test_grid_rejects_nonfinite():
    u = np.zeros((3, 3))
    u[1, 1] = np.nan
    with pytest.raises(InvariantViolation):
        GridSolution(0.0, 1.0, 0.0, 1.0, u)
