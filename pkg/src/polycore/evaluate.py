"""
多项式求值
Polynomial evaluation

- evaluate: 单点求值
- CompiledPolynomial: 指数矩阵形式的向量化求值与精确梯度（预言机热路径）
- restrict: 把尾部变量代入数值（鲁棒模板 f(x, v) 在顶点 v 处取值）
"""

from __future__ import annotations
from typing import Dict, Sequence

import numpy as np

from ..exceptions import InputError
from .calculus import gradient
from .polynomial import Polynomial


def _point(f: Polynomial, x: Sequence[float]) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape[0] != f.dimension:
        raise InputError(f"point has length {v.shape[0]}, polynomial dimension is {f.dimension}")
    return v


def evaluate(f: Polynomial, x: Sequence[float]) -> float:
    """Σ_α f_α ∏ x_i^{α_i}"""
    v = _point(f, x)
    if f.is_zero():
        return 0.0
    E = np.array(list(f.terms.keys()), dtype=float)
    c = np.fromiter(f.terms.values(), dtype=float)
    return float(c @ np.prod(np.power(v[None, :], E), axis=1))


class CompiledPolynomial:
    """预编译的多项式，支持批量求值与梯度"""

    def __init__(self, f: Polynomial, with_gradient: bool = True):
        self.dimension = f.dimension
        self.degree = f.degree
        self._E = np.array(list(f.terms.keys()) or [(0,) * f.dimension], dtype=float)
        self._c = np.fromiter(f.terms.values(), dtype=float) if f.terms else np.zeros(1)
        self._grad = [CompiledPolynomial(g, False) for g in gradient(f)] if with_gradient else []

    def value(self, x: np.ndarray) -> float:
        return float(self._c @ np.prod(np.power(x[None, :], self._E), axis=1))

    def values(self, X: np.ndarray) -> np.ndarray:
        """X 形状 (k, n)，返回 (k,)"""
        X = np.atleast_2d(X)
        return np.prod(np.power(X[:, None, :], self._E[None, :, :]), axis=2) @ self._c

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.array([g.value(x) for g in self._grad])


def restrict(f: Polynomial, n_keep: int, values: Sequence[float]) -> Polynomial:
    """
    代入尾部变量

    Args:
        f: n_keep + len(values) 维多项式
        n_keep: 保留的前导变量个数
        values: 尾部变量取值

    Returns:
        n_keep 维多项式
    """
    vals = np.asarray(values, dtype=float)
    if f.dimension != n_keep + vals.shape[0]:
        raise InputError(f"cannot restrict dimension {f.dimension} to {n_keep} with {vals.shape[0]} values")
    acc: Dict[tuple, float] = {}
    for alpha, c in f.terms.items():
        head, tail = alpha[:n_keep], alpha[n_keep:]
        acc[head] = acc.get(head, 0.0) + c * float(np.prod(np.power(vals, tail)))
    return Polynomial(n_keep, acc)
