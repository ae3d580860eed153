"""
精确微分
Exact calculus over the sparse representation

- derivative / gradient: 偏导数
- hessian: 对称矩阵多项式，(i,j) 与 (j,i) 共享同一对象
- quadratic_data: 二次多项式 f = xᵀAx + aᵀx + α 的系数提取
"""

from __future__ import annotations
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import InputError
from .polynomial import Polynomial


class SymmetricMatrixPoly:
    """s×s 对称多项式矩阵 F(x)"""

    __slots__ = ("dimension", "size", "entries")

    def __init__(self, entries: Sequence[Sequence[Polynomial]]):
        s = len(entries)
        if s == 0 or any(len(row) != s for row in entries):
            raise InputError("matrix polynomial must be square and nonempty")
        n = entries[0][0].dimension
        rows: List[Tuple[Polynomial, ...]] = []
        for i in range(s):
            row = []
            for j in range(s):
                e = entries[i][j]
                if e.dimension != n:
                    raise InputError(f"entry ({i},{j}) has dimension {e.dimension}, expected {n}")
                if j < i:
                    if e != rows[j][i]:
                        raise InputError(f"matrix polynomial is not symmetric at ({i},{j})")
                    e = rows[j][i]
                row.append(e)
            rows.append(tuple(row))
        self.dimension = n
        self.size = s
        self.entries: Tuple[Tuple[Polynomial, ...], ...] = tuple(rows)

    @classmethod
    def constant(cls, matrix: np.ndarray, dimension: int = 1) -> "SymmetricMatrixPoly":
        m = np.asarray(matrix, dtype=float)
        return cls([[Polynomial.constant(dimension, m[i, j]) for j in range(m.shape[1])] for i in range(m.shape[0])])

    def __getitem__(self, ij: Tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.entries[i][j]

    @property
    def degree(self) -> int:
        return max(e.degree for row in self.entries for e in row)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        from .evaluate import evaluate

        return np.array([[evaluate(e, x) for e in row] for row in self.entries])


def derivative(f: Polynomial, i: int) -> Polynomial:
    """∂f/∂x_i"""
    if not 0 <= i < f.dimension:
        raise InputError(f"derivative index {i} out of range for dimension {f.dimension}")
    out = {}
    for alpha, c in f.terms.items():
        e = alpha[i]
        if e:
            beta = alpha[:i] + (e - 1,) + alpha[i + 1:]
            out[beta] = c * e
    return Polynomial(f.dimension, out)


def gradient(f: Polynomial) -> List[Polynomial]:
    return [derivative(f, i) for i in range(f.dimension)]


def hessian(f: Polynomial) -> SymmetricMatrixPoly:
    n = f.dimension
    grad = gradient(f)
    rows: List[List[Polynomial]] = [[Polynomial.zero(n)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = derivative(grad[i], j)
            rows[j][i] = rows[i][j]
    return SymmetricMatrixPoly(rows)


def quadratic_data(f: Polynomial) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    提取二次多项式数据

    Returns:
        (A, a, α): 对称 A，满足 f(x) = xᵀAx + aᵀx + α
    """
    if f.degree > 2:
        raise InputError(f"expected a polynomial of degree <= 2, got degree {f.degree}")
    n = f.dimension
    A = np.zeros((n, n))
    a = np.zeros(n)
    alpha0 = 0.0
    for alpha, c in f.terms.items():
        nz = [i for i, e in enumerate(alpha) if e]
        if not nz:
            alpha0 = c
        elif sum(alpha) == 1:
            a[nz[0]] = c
        elif len(nz) == 1:
            A[nz[0], nz[0]] = c
        else:
            i, j = nz
            A[i, j] = A[j, i] = c / 2.0
    return A, a, alpha0
