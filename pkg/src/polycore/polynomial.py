"""
稀疏多元多项式
Sparse multivariate polynomial

以指数多重指标为键的稀疏系数表：
- 规范形式：不存储精确为 0 的系数
- 不可变值对象，可在线程间共享
- 加、数乘、乘、幂、平移维度（embed）、小系数裁剪（prune）
"""

from __future__ import annotations
from numbers import Real
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import InputError
from ..types import MultiIndex

Scalar = Union[int, float, np.floating]


def _as_index(alpha: Sequence[int], n: int, where: str = "") -> MultiIndex:
    """校验并规范化多重指标"""
    if len(alpha) != n:
        raise InputError(f"exponent vector has length {len(alpha)}, expected {n}", where or None)
    out = []
    for e in alpha:
        if isinstance(e, bool) or int(e) != e or e < 0:
            raise InputError(f"exponents must be nonnegative integers, got {list(alpha)}", where or None)
        out.append(int(e))
    return tuple(out)


def grlex_key(alpha: MultiIndex) -> Tuple[int, Tuple[int, ...]]:
    """分级字典序排序键：先总次数，同次数内 x1 指数高者在前"""
    return sum(alpha), tuple(-e for e in alpha)


class Polynomial:
    """稀疏多元实系数多项式 f = Σ f_α x^α"""

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, dimension: int, terms: Optional[Mapping[Sequence[int], Scalar]] = None):
        if int(dimension) != dimension or dimension < 1:
            raise InputError(f"dimension must be a positive integer, got {dimension}")
        self._n = int(dimension)
        canon: Dict[MultiIndex, float] = {}
        for alpha, c in (terms or {}).items():
            key = _as_index(alpha, self._n)
            v = float(c)
            if not np.isfinite(v):
                raise InputError(f"non-finite coefficient {c} for exponent {list(key)}")
            if key in canon:
                v += canon.pop(key)
            if v != 0.0:
                canon[key] = v
        self._terms = MappingProxyType(dict(sorted(canon.items(), key=lambda kv: grlex_key(kv[0]))))
        self._hash: Optional[int] = None

    # ---------- 构造 ----------
    @classmethod
    def from_terms(cls, dimension: int, pairs: Iterable[Tuple[Sequence[int], Scalar]]) -> "Polynomial":
        """由 (指数, 系数) 序列构造，重复指数求和"""
        acc: Dict[MultiIndex, float] = {}
        for alpha, c in pairs:
            key = _as_index(alpha, dimension)
            acc[key] = acc.get(key, 0.0) + float(c)
        return cls(dimension, acc)

    @classmethod
    def zero(cls, dimension: int) -> "Polynomial":
        return cls(dimension)

    @classmethod
    def constant(cls, dimension: int, c: Scalar) -> "Polynomial":
        return cls(dimension, {(0,) * dimension: c})

    @classmethod
    def variable(cls, dimension: int, i: int) -> "Polynomial":
        """第 i 个坐标 x_i（从 0 开始）"""
        if not 0 <= i < dimension:
            raise InputError(f"variable index {i} out of range for dimension {dimension}")
        alpha = [0] * dimension
        alpha[i] = 1
        return cls(dimension, {tuple(alpha): 1.0})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: Scalar = 1.0) -> "Polynomial":
        return cls(len(alpha), {tuple(alpha): c})

    # ---------- 属性 ----------
    @property
    def dimension(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[MultiIndex, float]:
        return self._terms

    @property
    def degree(self) -> int:
        """最高总次数；零多项式约定为 0"""
        return max((sum(a) for a in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, alpha: Sequence[int]) -> float:
        return self._terms.get(tuple(alpha), 0.0)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # ---------- 运算 ----------
    def _check(self, other: "Polynomial") -> None:
        if other._n != self._n:
            raise InputError(f"dimension mismatch: {self._n} vs {other._n}")

    def _lift(self, other: object) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, Real):
            return Polynomial.constant(self._n, float(other))
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "Polynomial":
        g = self._lift(other)
        if g is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for a, c in g._terms.items():
            acc[a] = acc.get(a, 0.0) + c
        return Polynomial(self._n, acc)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return self.scale(-1.0)

    def __sub__(self, other: object) -> "Polynomial":
        g = self._lift(other)
        if g is NotImplemented:
            return NotImplemented
        return self + (-g)

    def __rsub__(self, other: object) -> "Polynomial":
        return (-self) + other

    def scale(self, c: Scalar) -> "Polynomial":
        c = float(c)
        return Polynomial(self._n, {a: c * v for a, v in self._terms.items()})

    def __mul__(self, other: object) -> "Polynomial":
        if isinstance(other, Real):
            return self.scale(float(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        acc: Dict[MultiIndex, float] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                key = tuple(i + j for i, j in zip(a, b))
                acc[key] = acc.get(key, 0.0) + ca * cb
        return Polynomial(self._n, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if int(k) != k or k < 0:
            raise InputError(f"power must be a nonnegative integer, got {k}")
        out = Polynomial.constant(self._n, 1.0)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x: Sequence[float]) -> float:
        from .evaluate import evaluate

        return evaluate(self, x)

    # ---------- 比较 ----------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._n == other._n and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        from .codec import to_text

        return f"Polynomial(n={self._n}, {to_text(self)})"


# ---------- 函数式接口 ----------
def add(f: Polynomial, g: Polynomial) -> Polynomial:
    return f + g


def scale(f: Polynomial, c: Scalar) -> Polynomial:
    return f.scale(c)


def mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def prune(f: Polynomial, eps: float = 0.0) -> Polynomial:
    """丢弃 |c| < eps 的项；默认 eps=0 不丢弃任何项"""
    return Polynomial(f.dimension, {a: c for a, c in f.terms.items() if abs(c) >= eps})


def embed(f: Polynomial, n_total: int, offset: int = 0) -> Polynomial:
    """把 f 视为 n_total 维多项式，原变量放在 offset 起始位置"""
    if n_total < f.dimension + offset:
        raise InputError(f"cannot embed dimension {f.dimension} at offset {offset} into {n_total}")
    pad_l, pad_r = (0,) * offset, (0,) * (n_total - f.dimension - offset)
    return Polynomial(n_total, {pad_l + a + pad_r: c for a, c in f.terms.items()})
