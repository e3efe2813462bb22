"""Data model: equations of the class u_t + C u u_x = sum A^k u_k + B,
their gauged normal form (C = 1, A^1 = 0), sampled grid solutions, and the
key=value file format shared by the CLI and the library."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation, MissingKey, NotGauged, ParseError
from .expr import (
    Const,
    Expr,
    ONE,
    ZERO,
    Zeroness,
    as_const,
    evaluate,
    is_zero,
    parse,
    probe_points,
    simplify,
    subst,
    to_text,
)
from .errors import DomainError, UnboundParameter

_NONVANISH_TOL = 1e-12


def _check_nonvanishing(e: Expr, params, what: str):
    """Reject coefficients that vanish symbolically or at a probe point."""
    z = is_zero(e, params)
    if z is Zeroness.ZERO:
        raise InvariantViolation(f"{what} vanishes identically")
    for pt in probe_points():
        try:
            v = evaluate(e, variables=pt, params=params)
        except (DomainError, UnboundParameter):
            continue
        if abs(v) <= _NONVANISH_TOL:
            raise InvariantViolation(f"{what} vanishes at probe point {pt['t']:.3f},{pt['x']:.3f}")


def _bind(e: Expr, params) -> Expr:
    if not params:
        return simplify(e)
    return subst(e, params)


@dataclass(frozen=True)
class Equation:
    """Arbitrary-element tuple (A^0..A^r, B, C) of one equation, r >= 2."""

    r: int
    C: Expr
    A: tuple
    B: Expr
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.r < 2:
            raise InvariantViolation("order r must be at least 2")
        if len(self.A) != self.r + 1:
            raise InvariantViolation(f"expected {self.r + 1} coefficients A0..A{self.r}")
        _check_nonvanishing(simplify(self.C * self.A[self.r]), self.params, "C*A^r")

    def coeff(self, k: int) -> Expr:
        return self.A[k]

    def bound(self) -> "Equation":
        """Copy with all named parameters substituted by their exact values."""
        return Equation(
            self.r,
            _bind(self.C, self.params),
            tuple(_bind(a, self.params) for a in self.A),
            _bind(self.B, self.params),
            {},
        )

    def to_json(self) -> dict:
        out = {"kind": "general", "r": self.r, "C": to_text(simplify(self.C))}
        for k in range(self.r + 1):
            out[f"A{k}"] = to_text(simplify(self.A[k]))
        out["B"] = to_text(simplify(self.B))
        if self.params:
            out["params"] = {k: float(v) for k, v in sorted(self.params.items())}
        return out


@dataclass(frozen=True)
class GaugedEquation:
    """Reduced tuple (A^0, A^2..A^r, B) of an equation in the gauge C=1, A^1=0."""

    r: int
    A0: Expr
    A: tuple  # coefficients A^2 .. A^r
    B: Expr
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.r < 2:
            raise InvariantViolation("order r must be at least 2")
        if len(self.A) != self.r - 1:
            raise InvariantViolation(f"expected {self.r - 1} coefficients A2..A{self.r}")
        _check_nonvanishing(simplify(self.A[-1]), self.params, "A^r")

    def coeff(self, k: int) -> Expr:
        """A^k for k = 0..r with the gauge constraints A^1 = 0 implicit."""
        if k == 0:
            return self.A0
        if k == 1:
            return ZERO
        return self.A[k - 2]

    @property
    def Ar(self) -> Expr:
        return self.A[-1]

    def bound(self) -> "GaugedEquation":
        return GaugedEquation(
            self.r,
            _bind(self.A0, self.params),
            tuple(_bind(a, self.params) for a in self.A),
            _bind(self.B, self.params),
            {},
        )

    def to_general(self) -> Equation:
        coeffs = tuple(self.coeff(k) for k in range(self.r + 1))
        return Equation(self.r, ONE, coeffs, self.B, dict(self.params))

    def to_json(self) -> dict:
        out = {"kind": "gauged", "r": self.r, "A0": to_text(simplify(self.A0))}
        for j in range(2, self.r + 1):
            out[f"A{j}"] = to_text(simplify(self.coeff(j)))
        out["B"] = to_text(simplify(self.B))
        if self.params:
            out["params"] = {k: float(v) for k, v in sorted(self.params.items())}
        return out


def is_gauged(eq) -> bool:
    """True iff C = 1 and A^1 = 0 identically."""
    if isinstance(eq, GaugedEquation):
        return True
    return simplify(eq.C - ONE) == ZERO and simplify(eq.A[1]) == ZERO


def to_gauged(eq) -> GaugedEquation:
    if isinstance(eq, GaugedEquation):
        return eq
    if not is_gauged(eq):
        raise NotGauged("equation does not satisfy the gauge C = 1, A^1 = 0")
    return GaugedEquation(
        eq.r, eq.A[0], tuple(eq.A[2:]), eq.B, dict(eq.params)
    )


# ---------------------------------------------------------------------------
# key=value file format
# ---------------------------------------------------------------------------

def loads(text: str):
    """Parse equation text.  Returns GaugedEquation when the gauge holds,
    otherwise Equation."""
    raw = {}
    params = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"line {lineno}: expected key = value")
        key, value = body.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key.startswith("param."):
            name = key[len("param."):].strip()
            v = as_const(parse(value))
            if v is None:
                raise ParseError(f"line {lineno}: parameter {name} must be an exact number")
            params[name] = v
        else:
            raw[key] = (lineno, value)

    if "r" not in raw:
        raise MissingKey("missing key: r")
    try:
        r = int(raw.pop("r")[1])
    except ValueError as exc:
        raise ParseError(f"r must be an integer: {exc}") from exc
    if f"A{r}" not in raw:
        raise MissingKey(f"missing key: A{r}")

    def grab(key, default):
        if key in raw:
            lineno, value = raw.pop(key)
            try:
                return parse(value)
            except ParseError as exc:
                raise ParseError(f"line {lineno}, key {key}: {exc}") from exc
        return default

    C = grab("C", ONE)
    B = grab("B", ZERO)
    A = tuple(grab(f"A{k}", ZERO) for k in range(r + 1))
    if raw:
        stray = ", ".join(sorted(raw))
        raise ParseError(f"unknown keys: {stray}")

    eq = Equation(r, C, A, B, params)
    if is_gauged(eq):
        return to_gauged(eq)
    return eq


def dumps(eq) -> str:
    lines = [f"r = {eq.r}"]
    if isinstance(eq, GaugedEquation):
        lines.append("C = 1")
        lines.append("A1 = 0")
        lines.append(f"A0 = {to_text(simplify(eq.A0))}")
        for j in range(2, eq.r + 1):
            lines.append(f"A{j} = {to_text(simplify(eq.coeff(j)))}")
    else:
        lines.append(f"C = {to_text(simplify(eq.C))}")
        for k in range(eq.r + 1):
            lines.append(f"A{k} = {to_text(simplify(eq.A[k]))}")
    lines.append(f"B = {to_text(simplify(eq.B))}")
    for name, value in sorted(eq.params.items()):
        lines.append(f"param.{name} = {value}")
    return "\n".join(lines) + "\n"


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def save(eq, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(eq))


# ---------------------------------------------------------------------------
# grid solutions
# ---------------------------------------------------------------------------

@dataclass
class GridSolution:
    """u sampled on a uniform (t, x) grid, row-major in t."""

    t0: float
    t1: float
    x0: float
    x1: float
    u: np.ndarray  # shape (nt, nx)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if self.u.ndim != 2 or self.u.shape[0] < 2 or self.u.shape[1] < 2:
            raise InvariantViolation("grid must be at least 2x2")
        if not (self.t1 > self.t0 and self.x1 > self.x0):
            raise InvariantViolation("grid ranges must be increasing")
        if not np.all(np.isfinite(self.u)):
            raise InvariantViolation("grid contains non-finite values")

    @property
    def nt(self) -> int:
        return self.u.shape[0]

    @property
    def nx(self) -> int:
        return self.u.shape[1]

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / (self.nt - 1)

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def tgrid(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.nt)

    @property
    def xgrid(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)


def save_grid(sol: GridSolution, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"{sol.t0:.17g} {sol.t1:.17g} {sol.nt} {sol.x0:.17g} {sol.x1:.17g} {sol.nx}\n"
        )
        for row in sol.u:
            fh.write(" ".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def load_grid(path) -> GridSolution:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 6:
            raise ParseError("grid header must be: t0 t1 nt x0 x1 nx")
        t0, t1, x0, x1 = float(header[0]), float(header[1]), float(header[3]), float(header[4])
        nt, nx = int(header[2]), int(header[5])
        data = np.loadtxt(fh)
    u = np.asarray(data, dtype=float).reshape(nt, nx)
    return GridSolution(t0, t1, x0, x1, u)


def to_json_text(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
