"""
分级字典序单项式基
Graded-lexicographic monomial basis

y(x) = (1, x_1, ..., x_n, x_1^2, x_1x_2, ..., x_n^k)，长度 e(k,n) = C(n+k, k)
"""

from __future__ import annotations
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Dict, Iterator, List, Sequence, Tuple

from scipy.special import comb

from ..exceptions import CapacityError, InputError
from ..types import MultiIndex
from .polynomial import grlex_key

# Gram 块默认上限（约 200×200 量级，留一些余量）
DEFAULT_BASIS_LIMIT = 300


def basis_size(n: int, k: int) -> int:
    """e(k,n) = C(n+k, k)"""
    return int(comb(n + k, k, exact=True))


def graded_lex(n: int, k: int) -> Iterator[MultiIndex]:
    """按分级字典序枚举 |α| ≤ k 的全部多重指标，从常数项开始"""
    for t in range(k + 1):
        for combo in combinations_with_replacement(range(n), t):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            yield tuple(alpha)


def sort_graded_lex(alphas: Sequence[MultiIndex]) -> List[MultiIndex]:
    return sorted(set(alphas), key=grlex_key)


@dataclass(frozen=True)
class MonomialBasis:
    """单项式基 y(x)"""
    dimension: int
    degree: int
    monomials: Tuple[MultiIndex, ...]
    _index: Dict[MultiIndex, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._index.update({m: i for i, m in enumerate(self.monomials)})

    def __len__(self) -> int:
        return len(self.monomials)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.monomials)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.monomials[i]

    def index(self, alpha: Sequence[int]) -> int:
        return self._index[tuple(alpha)]

    def __contains__(self, alpha: object) -> bool:
        return tuple(alpha) in self._index  # type: ignore[arg-type]


def monomial_basis(n: int, k: int, limit: int = DEFAULT_BASIS_LIMIT) -> MonomialBasis:
    """
    构造 basis(n, k)

    Args:
        n: 变量个数（≥ 1）
        k: 最高次数（≥ 0）
        limit: 基长度上限，超出时抛 CapacityError

    Returns:
        MonomialBasis: 分级字典序，长度 C(n+k, k)
    """
    if n < 1 or k < 0:
        raise InputError(f"basis needs n >= 1 and k >= 0, got n={n}, k={k}")
    size = basis_size(n, k)
    if size > limit:
        raise CapacityError(f"basis(n={n}, k={k}) has {size} monomials, limit is {limit}", size, limit)
    return MonomialBasis(n, k, tuple(graded_lex(n, k)))
