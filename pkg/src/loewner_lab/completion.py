"""Norm-constrained matrix completions.

Two constraint shapes are supported: pin a column block s*q of a matrix
with norm at most 1+eps and pull the whole matrix down to norm 1
(fix_column), or pin a corner block p*t*q and do the same (fix_corner).
Both come with explicit distance bounds that every call re-audits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractViolated,
    DimensionMismatch,
    InfeasibleColumn,
    InfeasibleCorner,
)
from .hermitian import (
    DEFAULT_TOL,
    ToleranceConfig,
    matrix_function,
    operator_norm,
    require_projection,
)

__all__ = ["ColumnConstraint", "CornerConstraint", "fix_column", "fix_corner"]


@dataclass(frozen=True)
class ColumnConstraint:
    """s1 square with ||s1 q|| <= 1 and ||s1|| <= 1 + eps."""

    s1: np.ndarray
    q: np.ndarray
    eps: float


@dataclass(frozen=True)
class CornerConstraint:
    """t square with ||p t q|| <= 1 and ||t|| <= 1 + eps."""

    t: np.ndarray
    p: np.ndarray
    q: np.ndarray
    eps: float


def _shrink_factor(eps: float):
    """Scalar map m -> sqrt(max(1-m,0)) / sqrt((1+eps)^2 - m).

    Applied to the spectrum of K K*, it multiplies the free block so the
    combined row norm drops to 1 while moving it by at most sqrt(2eps+eps^2).
    """
    top = (1.0 + eps) ** 2

    def f(m: float) -> float:
        return float(np.sqrt(max(1.0 - m, 0.0)) / np.sqrt(max(top - m, 1e-300)))

    return f


def fix_column(c: ColumnConstraint, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Return s with s q = s1 q, ||s|| <= 1, ||s - s1|| <= sqrt(2 eps + eps^2).

    The fixed column block K = s1 q is kept verbatim; the complementary
    block B = s1 (1-q) is shrunk by a function of K K* that commutes with
    the constraint.
    """
    s1 = np.asarray(c.s1, dtype=np.complex128)
    if s1.ndim != 2 or s1.shape[0] != s1.shape[1]:
        raise DimensionMismatch(f"s1 must be square, got {s1.shape}")
    q = require_projection(c.q, tol)
    if q.shape != s1.shape:
        raise DimensionMismatch("s1 and q dimensions differ")
    eps = float(c.eps)
    if eps < 0:
        raise InfeasibleColumn("eps must be nonnegative")

    K = s1 @ q
    if operator_norm(K) > 1.0 + tol.residual_tol:
        raise InfeasibleColumn(f"||s1 q|| = {operator_norm(K):.12f} exceeds 1")
    if operator_norm(s1) > 1.0 + eps + tol.residual_tol:
        raise InfeasibleColumn(f"||s1|| = {operator_norm(s1):.12f} exceeds 1 + eps")

    if eps == 0.0:
        return s1.copy()

    B = s1 @ (np.eye(s1.shape[0]) - q)
    KKs = K @ K.conj().T
    M = matrix_function(_shrink_factor(eps), KKs, tol=tol)
    s = K + M @ B

    bound = np.sqrt(2.0 * eps + eps * eps)
    if operator_norm(s) > 1.0 + tol.residual_tol:
        raise ContractViolated(f"||s|| = {operator_norm(s):.12f} exceeds 1 after completion")
    if operator_norm(s @ q - K) > tol.residual_tol:
        raise ContractViolated("completed matrix moved the pinned column block")
    if operator_norm(s - s1) > bound + tol.residual_tol:
        raise ContractViolated(
            f"||s - s1|| = {operator_norm(s - s1):.12f} exceeds sqrt(2 eps + eps^2) = {bound:.12f}"
        )
    return s


def fix_corner(c: CornerConstraint, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Return t' with p t' q = p t q, ||t'|| <= 1, ||t' - t|| <= 2 sqrt(2 eps + eps^2).

    Block the matrix as a = ptq, b = pt(1-q), cc = (1-p)tq, d = (1-p)t(1-q);
    shrink b and cc by commuting functions of a a* and a* a so the
    intermediate t1 has norm at most 1 + eps with its q-column feasible,
    then finish with fix_column.
    """
    t = np.asarray(c.t, dtype=np.complex128)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise DimensionMismatch(f"t must be square, got {t.shape}")
    p = require_projection(c.p, tol)
    q = require_projection(c.q, tol)
    if p.shape != t.shape or q.shape != t.shape:
        raise DimensionMismatch("t, p, q dimensions differ")
    eps = float(c.eps)
    if eps < 0:
        raise InfeasibleCorner("eps must be nonnegative")

    a = p @ t @ q
    if operator_norm(a) > 1.0 + tol.residual_tol:
        raise InfeasibleCorner(f"||p t q|| = {operator_norm(a):.12f} exceeds 1")
    if operator_norm(t) > 1.0 + eps + tol.residual_tol:
        raise InfeasibleCorner(f"||t|| = {operator_norm(t):.12f} exceeds 1 + eps")

    if eps == 0.0:
        return t.copy()

    n = t.shape[0]
    one = np.eye(n)
    b = p @ t @ (one - q)
    cc = (one - p) @ t @ q
    d = (one - p) @ t @ (one - q)

    f = _shrink_factor(eps)
    b1 = matrix_function(f, a @ a.conj().T, tol=tol) @ b
    c1 = cc @ matrix_function(f, a.conj().T @ a, tol=tol)
    t1 = a + b1 + c1 + d

    bound1 = np.sqrt(2.0 * eps + eps * eps)
    if operator_norm(t1) > 1.0 + eps + 1e-10:
        raise ContractViolated(f"intermediate ||t1|| = {operator_norm(t1):.12f} exceeds 1 + eps")
    if operator_norm(t1 @ q) > 1.0 + tol.residual_tol:
        raise ContractViolated("intermediate q-column is not a contraction")

    tprime = fix_column(ColumnConstraint(t1, q, eps), tol)

    bound = 2.0 * bound1
    if operator_norm(p @ tprime @ q - a) > tol.proj_tol * (1.0 + operator_norm(t)):
        raise ContractViolated("corner block moved during completion")
    if operator_norm(tprime) > 1.0 + tol.residual_tol:
        raise ContractViolated("||t'|| exceeds 1 after completion")
    if operator_norm(tprime - t) > bound + tol.residual_tol:
        raise ContractViolated(
            f"||t' - t|| = {operator_norm(tprime - t):.12f} exceeds 2 sqrt(2 eps + eps^2) = {bound:.12f}"
        )
    return tprime
