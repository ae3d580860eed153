"""
Gram 参数化
Gram-matrix parameterization

y(x) y(x)ᵀ = Σ_α B_α x^α，f 为 SOS 当且仅当存在 Q ⪰ 0 使 ⟨Q, B_α⟩ = f_α 对所有 α 成立。

- GramLink: 单个 B_α（以 (i, j) 对稀疏存储，i ≤ j）
- gram_links / links_for_basis: 由单项式基生成全部链接
- gram_polynomial: 由 Q 精确重建 y(x)ᵀQy(x)
- polish_gram: 最小范数修正，使 ⟨Q, B_α⟩ 与目标系数舍入级一致
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from ..polycore import Polynomial, monomial_basis, sort_graded_lex, DEFAULT_BASIS_LIMIT
from ..types import MultiIndex


@dataclass(frozen=True)
class GramLink:
    """链接矩阵 B_α 及目标系数 f_α"""
    alpha: MultiIndex
    size: int
    rows: np.ndarray     # 上三角 (i, j) 对的行下标
    cols: np.ndarray
    target: float = 0.0

    @property
    def matrix(self) -> np.ndarray:
        B = np.zeros((self.size, self.size))
        B[self.rows, self.cols] = 1.0
        B[self.cols, self.rows] = 1.0
        return B

    @property
    def norm_sq(self) -> float:
        """‖B_α‖_F²：对角对计 1，非对角对计 2"""
        return float(np.sum(np.where(self.rows == self.cols, 1.0, 2.0)))

    def inner(self, Q: np.ndarray) -> float:
        """⟨Q, B_α⟩"""
        w = np.where(self.rows == self.cols, 1.0, 2.0)
        return float(np.sum(w * Q[self.rows, self.cols]))

    def sparse(self) -> Dict[Tuple[int, int], float]:
        return {(int(i), int(j)): 1.0 for i, j in zip(self.rows, self.cols)}

    def with_target(self, value: float) -> "GramLink":
        return GramLink(self.alpha, self.size, self.rows, self.cols, float(value))


def links_for_basis(monomials: Sequence[MultiIndex]) -> List[GramLink]:
    """按分级字典序返回基 monomials 的全部 B_α"""
    pairs: Dict[MultiIndex, List[Tuple[int, int]]] = {}
    for i, mi in enumerate(monomials):
        for j in range(i, len(monomials)):
            alpha = tuple(a + b for a, b in zip(mi, monomials[j]))
            pairs.setdefault(alpha, []).append((i, j))
    size = len(monomials)
    out = []
    for alpha in sort_graded_lex(list(pairs)):
        ij = np.array(pairs[alpha], dtype=int)
        out.append(GramLink(alpha, size, ij[:, 0], ij[:, 1]))
    return out


def gram_links(n: int, k: int, limit: int = DEFAULT_BASIS_LIMIT) -> List[GramLink]:
    """basis(n, k) 的链接骨架，共 e(2k, n) 个"""
    return links_for_basis(monomial_basis(n, k, limit).monomials)


def attach_targets(links: Sequence[GramLink], f: Polynomial) -> Tuple[List[GramLink], List[MultiIndex]]:
    """
    填入目标系数

    Returns:
        (带目标的链接, 无法由基表示的 f 的指数列表)
    """
    out = [link.with_target(f.coefficient(link.alpha)) for link in links]
    covered = {link.alpha for link in links}
    missing = [a for a in f.terms if a not in covered]
    return out, missing


def gram_polynomial(monomials: Sequence[MultiIndex], Q: np.ndarray) -> Polynomial:
    """y(x)ᵀ Q y(x)"""
    n = len(monomials[0])
    acc: Dict[MultiIndex, float] = {}
    for i, mi in enumerate(monomials):
        for j, mj in enumerate(monomials):
            if Q[i, j] != 0.0:
                alpha = tuple(a + b for a, b in zip(mi, mj))
                acc[alpha] = acc.get(alpha, 0.0) + float(Q[i, j])
    return Polynomial(n, acc)


def link_residual(Q: np.ndarray, links: Sequence[GramLink]) -> float:
    """max_α |⟨Q, B_α⟩ − f_α|"""
    return max((abs(link.inner(Q) - link.target) for link in links), default=0.0)


def polish_gram(Q: np.ndarray, links: Sequence[GramLink]) -> Tuple[np.ndarray, float]:
    """
    最小范数修正 Q，使链接方程精确成立

    B_α 支撑互不相交，修正量 ΔQ = Σ r_α B_α / ‖B_α‖² 在 Frobenius 范数下最小。

    Returns:
        (修正后的对称 Q, 修正前的最大链接残差)
    """
    P = 0.5 * (Q + Q.T)
    raw = link_residual(P, links)
    for link in links:
        r = link.target - link.inner(P)
        if r:
            d = r / link.norm_sq
            P[link.rows, link.cols] += d
            off = link.rows != link.cols
            P[link.cols[off], link.rows[off]] += d
    return P, raw


def prune_basis(monomials: Sequence[MultiIndex], f: Mapping[MultiIndex, float]) -> List[MultiIndex]:
    """
    对角一致性剪枝（可选）

    若 m 的平方 2m 在 f 中系数为 0，且 2m 不能由其余单项式对产生，则 Q_mm = 0，
    半正定性迫使 m 所在行列全为 0，可把 m 从基中删除；反复直到不动点。
    """
    keep = list(monomials)
    changed = True
    while changed:
        changed = False
        for m in list(keep):
            sq = tuple(2 * e for e in m)
            if f.get(sq, 0.0) != 0.0:
                continue
            others = any(
                tuple(a + b for a, b in zip(p, q)) == sq
                for i, p in enumerate(keep)
                for q in keep[i:]
                if p != m or q != m
            )
            if not others:
                keep.remove(m)
                changed = True
    return keep
