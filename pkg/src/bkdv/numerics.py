"""Grid kernels shared by solution mapping and residual verification:
expression evaluation on meshes, bilinear interpolation, and centered
finite-difference stencils of chosen accuracy."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, UnboundParameter
from .expr import Add, Const, Div, Expr, Fn, Mul, Neg, Param, Pow, Var


def eval_on_mesh(e: Expr, tg: np.ndarray, xg: np.ndarray, params=None) -> np.ndarray:
    """Evaluate `e` on the tensor grid tg x xg; shape (len(tg), len(xg))."""
    tt, xx = np.meshgrid(np.asarray(tg, float), np.asarray(xg, float), indexing="ij")
    v = _eval_np(e, {"t": tt, "x": xx}, params or {})
    return np.broadcast_to(v, tt.shape).astype(float)


def eval_curve(e: Expr, tg: np.ndarray, params=None) -> np.ndarray:
    tg = np.asarray(tg, float)
    v = _eval_np(e, {"t": tg}, params or {})
    return np.broadcast_to(v, tg.shape).astype(float)


def _eval_np(e: Expr, env: dict, params: dict):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        if e.name not in env:
            raise DomainError(f"variable {e.name} has no value on this mesh")
        return env[e.name]
    if isinstance(e, Param):
        if e.name not in params:
            raise UnboundParameter(e.name)
        return float(params[e.name])
    if isinstance(e, Add):
        out = _eval_np(e.args[0], env, params)
        for a in e.args[1:]:
            out = out + _eval_np(a, env, params)
        return out
    if isinstance(e, Mul):
        out = _eval_np(e.args[0], env, params)
        for a in e.args[1:]:
            out = out * _eval_np(a, env, params)
        return out
    if isinstance(e, Neg):
        return -_eval_np(e.arg, env, params)
    if isinstance(e, Div):
        return _eval_np(e.num, env, params) / _eval_np(e.den, env, params)
    if isinstance(e, Pow):
        return _np_pow(_eval_np(e.base, env, params), e.exponent)
    if isinstance(e, Fn):
        v = _eval_np(e.arg, env, params)
        if e.name == "exp":
            return np.exp(v)
        if e.name == "ln":
            return np.log(v)
        if e.name == "abs":
            return np.abs(v)
        if e.name == "sign":
            return np.sign(v)
        if e.name == "sin":
            return np.sin(v)
        if e.name == "cos":
            return np.cos(v)
        if e.name == "arctan":
            return np.arctan(v)
        if e.name == "sqrt":
            return np.sqrt(v)
    raise TypeError(f"cannot evaluate {e!r} on a mesh")


def _np_pow(base, q: Fraction):
    if q.denominator == 1:
        return np.power(base, q.numerator, dtype=float) if np.ndim(base) else float(base) ** q.numerator
    if q.denominator % 2 == 1:
        # odd root keeps the sign of the base
        return np.sign(base) ** q.numerator * np.abs(base) ** float(q)
    return np.power(base, float(q))


def bilinear(sol, tv: float, xv: float) -> float:
    """Bilinear interpolation of a GridSolution at an interior point."""
    it = (tv - sol.t0) / sol.dt
    ix = (xv - sol.x0) / sol.dx
    i0 = min(max(int(np.floor(it)), 0), sol.nt - 2)
    j0 = min(max(int(np.floor(ix)), 0), sol.nx - 2)
    ft = it - i0
    fx = ix - j0
    u = sol.u
    return float(
        u[i0, j0] * (1 - ft) * (1 - fx)
        + u[i0 + 1, j0] * ft * (1 - fx)
        + u[i0, j0 + 1] * (1 - ft) * fx
        + u[i0 + 1, j0 + 1] * ft * fx
    )


def stencil(m: int, halfwidth: int) -> np.ndarray:
    """Weights of the centered finite-difference stencil for the m-th
    derivative on nodes -halfwidth..halfwidth (unit spacing)."""
    n = 2 * halfwidth + 1
    if m >= n:
        raise ValueError("stencil too narrow for the requested derivative")
    offsets = np.arange(-halfwidth, halfwidth + 1, dtype=float)
    vand = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[m] = float(math.factorial(m))
    return np.linalg.solve(vand, rhs)


def halfwidth_for(m: int) -> int:
    """Smallest centered halfwidth giving 4th-order accuracy for the m-th
    x-derivative."""
    return (m + 1) // 2 + 1


def apply_stencil_x(u: np.ndarray, m: int, dx: float) -> np.ndarray:
    """m-th x-derivative (4th-order centered) on the valid interior columns."""
    k = halfwidth_for(m)
    w = stencil(m, k) / dx**m
    nt, nx = u.shape
    out = np.zeros((nt, nx - 2 * k))
    for i, wi in enumerate(w):
        out += wi * u[:, i : i + nx - 2 * k]
    return out


def apply_stencil_t(u: np.ndarray, dt: float, halfwidth: int = 3) -> np.ndarray:
    """First t-derivative, centered stencil of order 2*halfwidth, on the valid
    interior rows."""
    w = stencil(1, halfwidth) / dt
    nt, nx = u.shape
    out = np.zeros((nt - 2 * halfwidth, nx))
    for i, wi in enumerate(w):
        out += wi * u[i : i + nt - 2 * halfwidth, :]
    return out
