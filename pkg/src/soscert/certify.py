"""
SOS 判定与证书
SOS membership, SOS-matrix and SOS-convexity checks

- is_sos: Gram 可行性半定规划，成功时给出多项式级校验过的 Q
- is_sos_matrix: 标量化 zᵀF(x)z，基限制为关于 z 线性的单项式
- is_sos_convex: is_sos_matrix(hessian(f))

只有在求解器给出 Farkas 射线时才判定 refuted；数值失败一律为 indeterminate。
"""

from __future__ import annotations
from dataclasses import dataclass, field
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import CapacityError, CertificationError
from ..polycore import (
    Polynomial,
    SymmetricMatrixPoly,
    hessian,
    monomial_basis,
    DEFAULT_BASIS_LIMIT,
)
from ..solver import ConicSolver, ProgramBuilder, SolveReport, SolverConfig
from ..types import MultiIndex, SosStatus
from .gram import GramLink, attach_targets, gram_polynomial, links_for_basis, polish_gram, prune_basis

logger = logging.getLogger(__name__)


@dataclass
class CertConfig:
    """证书校验配置"""
    cert_tol: float = 1e-7          # 系数重建与最小特征值松弛
    polish_limit: float = 1e-5      # 修正前链接残差上限
    prune_basis: bool = False
    basis_limit: int = DEFAULT_BASIS_LIMIT
    attain_bound: float = 1e6       # 乘子规模超过此值时标记为“上确界逼近”


@dataclass
class SosCertificate:
    """Gram 证书 f = y(x)ᵀ Q y(x)"""
    basis_degree: int
    basis: Tuple[MultiIndex, ...]
    gram: np.ndarray
    residual: float
    min_eigenvalue: float

    def polynomial(self) -> Polynomial:
        return gram_polynomial(self.basis, self.gram)

    def to_dict(self) -> dict:
        return {
            "basisDegree": self.basis_degree,
            "gramBasis": [list(m) for m in self.basis],
            "gram": self.gram.tolist(),
            "residual": self.residual,
            "minEigenvalue": self.min_eigenvalue,
        }


@dataclass
class SosVerdict:
    """SOS / SOS-matrix / SOS-convex 判定结果"""
    status: SosStatus
    certificate: Optional[SosCertificate] = None
    report: Optional[SolveReport] = None
    reason: str = ""
    kind: str = "sos"

    @property
    def ok(self) -> bool:
        return self.status == "certified"


def certify_gram(
    Q: np.ndarray,
    links: Sequence[GramLink],
    basis: Sequence[MultiIndex],
    target: Polynomial,
    cfg: CertConfig,
    basis_degree: int,
) -> SosCertificate:
    """
    修正并独立校验 Gram 矩阵

    Raises:
        CertificationError: 修正前残差超限、重建残差超限或最小特征值低于 −cert_tol
    """
    P, raw = polish_gram(Q, links)
    if raw > cfg.polish_limit:
        raise CertificationError(f"Gram links violated by {raw:.3e} before polishing", raw)
    residual = (target - gram_polynomial(basis, P)).max_abs_coefficient()
    lam_min = float(np.linalg.eigvalsh(P)[0]) if P.size else 0.0
    if residual > cfg.cert_tol:
        raise CertificationError(f"reconstruction residual {residual:.3e} exceeds {cfg.cert_tol:g}", residual)
    if lam_min < -cfg.cert_tol:
        raise CertificationError(f"Gram matrix has eigenvalue {lam_min:.3e}", residual)
    return SosCertificate(basis_degree, tuple(basis), P, residual, lam_min)


def _gram_feasibility(
    target: Polynomial,
    basis: Sequence[MultiIndex],
    basis_degree: int,
    kind: str,
    cfg: CertConfig,
    solver_cfg: Optional[SolverConfig],
) -> SosVerdict:
    links, missing = attach_targets(links_for_basis(basis), target)
    if missing:
        return SosVerdict("refuted", reason=f"monomial {list(missing[0])} is outside the Gram support", kind=kind)
    builder = ProgramBuilder([len(basis)], name=f"{kind}-gram")
    for link in links:
        builder.add_row(link.target, psd={0: link.sparse()}, label=str(list(link.alpha)))
    report = ConicSolver(solver_cfg).solve(builder.build())
    if report.status == "primal_infeasible":
        return SosVerdict("refuted", report=report, reason=report.message, kind=kind)
    if report.status != "optimal":
        return SosVerdict("indeterminate", report=report, reason=report.message, kind=kind)
    try:
        cert = certify_gram(report.psd[0], links, basis, target, cfg, basis_degree)
    except CertificationError as e:
        logger.warning(f"{kind}: solver reported optimal but certificate failed: {e}")
        return SosVerdict("indeterminate", report=report, reason=str(e), kind=kind)
    return SosVerdict("certified", cert, report, kind=kind)


def _trivial(target: Polynomial, basis: Sequence[MultiIndex], kind: str) -> SosVerdict:
    Q = np.zeros((len(basis), len(basis)))
    return SosVerdict("certified", SosCertificate(0, tuple(basis), Q, 0.0, 0.0), kind=kind, reason="zero polynomial")


def is_sos(
    f: Polynomial,
    cfg: Optional[CertConfig] = None,
    solver_cfg: Optional[SolverConfig] = None,
) -> SosVerdict:
    """
    判定 f ∈ Σ²

    Args:
        f: 多项式
        cfg: 证书配置
        solver_cfg: 内点法配置

    Returns:
        SosVerdict: certified 时携带 k = deg f / 2 的 Gram 证书
    """
    cfg = cfg or CertConfig()
    if f.degree % 2:
        return SosVerdict("refuted", reason=f"odd degree {f.degree}")
    k = f.degree // 2
    basis: List[MultiIndex] = list(monomial_basis(f.dimension, k, cfg.basis_limit).monomials)
    if f.is_zero():
        return _trivial(f, basis[:1], "sos")
    if cfg.prune_basis:
        basis = prune_basis(basis, dict(f.terms))
        if not basis:
            return SosVerdict("refuted", reason="pruned basis is empty")
    return _gram_feasibility(f, basis, k, "sos", cfg, solver_cfg)


def scalarize(F: SymmetricMatrixPoly) -> Polynomial:
    """zᵀF(x)z，z 追加在 x 之后"""
    n, s = F.dimension, F.size
    acc = {}
    for i in range(s):
        for j in range(s):
            for alpha, c in F[i, j].terms.items():
                z = [0] * s
                z[i] += 1
                z[j] += 1
                key = tuple(alpha) + tuple(z)
                acc[key] = acc.get(key, 0.0) + c
    return Polynomial(n + s, acc)


def is_sos_matrix(
    F: SymmetricMatrixPoly,
    cfg: Optional[CertConfig] = None,
    solver_cfg: Optional[SolverConfig] = None,
) -> SosVerdict:
    """F 是否为 SOS-matrix：zᵀF(x)z 在基 {x^β z_i : |β| ≤ deg F / 2} 上是否 SOS"""
    cfg = cfg or CertConfig()
    n, s = F.dimension, F.size
    if F.degree % 2:
        return SosVerdict("refuted", reason=f"odd matrix degree {F.degree}", kind="sos-matrix")
    half = F.degree // 2
    xs = monomial_basis(n, half, cfg.basis_limit).monomials
    basis = [beta + tuple(1 if t == i else 0 for t in range(s)) for beta in xs for i in range(s)]
    if len(basis) > cfg.basis_limit:
        raise CapacityError(
            f"scalarized basis has {len(basis)} monomials, limit is {cfg.basis_limit}", len(basis), cfg.basis_limit
        )
    target = scalarize(F)
    if target.is_zero():
        return _trivial(target, basis, "sos-matrix")
    return _gram_feasibility(target, basis, half, "sos-matrix", cfg, solver_cfg)


def is_sos_convex(
    f: Polynomial,
    cfg: Optional[CertConfig] = None,
    solver_cfg: Optional[SolverConfig] = None,
) -> SosVerdict:
    """SOS-convex 当且仅当 Hessian 为 SOS-matrix"""
    verdict = is_sos_matrix(hessian(f), cfg, solver_cfg)
    verdict.kind = "sos-convex"
    return verdict
