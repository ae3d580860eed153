"""
对偶规划构造
Dual program builders

所有对偶均为最大化形式的 ConicProgram，变量布局统一为：
- 非负块 [δ_1..δ_r, λ_1..λ_m]（线性分式 LP 额外追加一个松弛变量）
- 自由块 [μ]（参数化对偶中为 θ）
- PSD 块 0：Gram 矩阵 Q（sos 形式）或 LMI 矩阵 Z（lmi 形式）

sos 形式逐系数匹配：Σδ_j (p_j)_α + Σλ_i (g_i)_α − μ q̂_α − ⟨Q, B_α⟩ = 0，外加 Σδ_j = 1。
"""

from __future__ import annotations
import logging
from typing import List, Optional

import numpy as np

from ..exceptions import InputError
from ..polycore import Polynomial, quadratic_data, DEFAULT_BASIS_LIMIT
from ..soscert import CertConfig, gram_links, is_sos_convex
from ..solver import ConicProgram, ProgramBuilder, SolverConfig
from .problems import LinearFractionalData, MinimaxProblem, RationalMinimaxProblem

logger = logging.getLogger(__name__)


def _sos_program(
    P: MinimaxProblem,
    mu_poly: Polynomial,
    d: int,
    limit: int,
    rhs_poly: Optional[Polynomial] = None,
    name: str = "",
) -> ConicProgram:
    """Gram 参数化的通用装配：μ 列携带 −mu_poly，等式右端为 rhs_poly"""
    n, r, m = P.dimension, P.r, P.m
    links = gram_links(n, d // 2, limit)
    builder = ProgramBuilder([links[0].size], r + m, 1, name=name)
    polys = P.objectives + P.constraints
    for link in links:
        alpha = link.alpha
        nonneg = {j: p.coefficient(alpha) for j, p in enumerate(polys) if p.coefficient(alpha)}
        free = {0: -mu_poly.coefficient(alpha)} if mu_poly.coefficient(alpha) else {}
        coef = {k: -v for k, v in link.sparse().items()}
        rhs = rhs_poly.coefficient(alpha) if rhs_poly is not None else 0.0
        builder.add_row(rhs, psd={0: coef}, nonneg=nonneg, free=free, label=f"alpha{list(alpha)}")
    builder.add_row(1.0, nonneg={j: 1.0 for j in range(r)}, label="simplex")
    builder.set_objective(free={0: 1.0})
    return builder.build()


def build_dual(P: MinimaxProblem, basis_limit: int = DEFAULT_BASIS_LIMIT) -> ConicProgram:
    """
    构造 SOS 对偶的半定规划形式

    Args:
        P: 极小极大问题
        basis_limit: Gram 块规模上限

    Returns:
        ConicProgram: 一个 e(d/2,n) PSD 块、r+m 个非负变量、自由 μ；最大化 μ
    """
    d = P.degree_bound
    return _sos_program(P, Polynomial.constant(P.dimension, 1.0), d, basis_limit, name=P.name or "dual")


def _check_denominator(P: RationalMinimaxProblem, cert_cfg: Optional[CertConfig], solver_cfg: Optional[SolverConfig]) -> None:
    q = P.denominator
    if q.degree <= 1:
        return
    verdict = is_sos_convex(-q, cert_cfg, solver_cfg)
    if not verdict.ok:
        raise InputError(
            f"denominator of degree {q.degree} is not affine and -q is not certified SOS-convex "
            f"({verdict.status}: {verdict.reason})",
            "denominator",
        )


def build_fractional_dual(
    P: RationalMinimaxProblem,
    basis_limit: int = DEFAULT_BASIS_LIMIT,
    cert_cfg: Optional[CertConfig] = None,
    solver_cfg: Optional[SolverConfig] = None,
) -> ConicProgram:
    """构造分式 SOS 对偶：μ 列携带 −q_α；要求 q 仿射或 −q 为 SOS-convex"""
    _check_denominator(P, cert_cfg, solver_cfg)
    d = P.degree_bound
    return _sos_program(P, P.denominator, d, basis_limit, name=P.name or "fractional-dual")


def build_parametric_dual(
    P: RationalMinimaxProblem, mu_bar: float, basis_limit: int = DEFAULT_BASIS_LIMIT
) -> ConicProgram:
    """
    构造参数化对偶：sup θ s.t. Σδ_j p_j + Σλ_i g_i − μ̄q − θ ∈ Σ²_d

    值 ≥ 0 当且仅当 μ̄ ≤ 分式问题下确界，可作为对偶侧二分的交叉检验。
    """
    d = P.degree_bound
    return _sos_program(
        P,
        Polynomial.constant(P.dimension, 1.0),
        d,
        basis_limit,
        rhs_poly=P.denominator.scale(mu_bar),
        name=f"{P.name or 'parametric'}[mu={mu_bar:.6g}]",
    )


def _lmi_block(f: Polynomial) -> np.ndarray:
    """[[2α, aᵀ], [a, 2A]]"""
    A, a, alpha = quadratic_data(f)
    n = f.dimension
    M = np.zeros((n + 1, n + 1))
    M[0, 0] = 2.0 * alpha
    M[0, 1:] = a
    M[1:, 0] = a
    M[1:, 1:] = 2.0 * A
    return M


def build_quadratic_dual(P: MinimaxProblem) -> ConicProgram:
    """
    构造二次情形的单个 LMI 对偶

        Σδ_j [[2α_j, a_jᵀ],[a_j, 2A_j]] + Σλ_i [[2γ_i, c_iᵀ],[c_i, 2C_i]] − μ·Q_0 ⪰ 0

    Q_0 = [[2, 0],[0, 0]]；若 P 为分式问题，Q_0 取 q 的同型矩阵。
    """
    for k, p in enumerate(P.polynomials()):
        if p.degree > 2:
            raise InputError(f"quadratic dual needs degree <= 2, polynomial {k} has degree {p.degree}")
    n, r, m = P.dimension, P.r, P.m
    if isinstance(P, RationalMinimaxProblem):
        Q0 = _lmi_block(P.denominator)
    else:
        Q0 = np.zeros((n + 1, n + 1))
        Q0[0, 0] = 2.0
    blocks: List[np.ndarray] = [_lmi_block(p) for p in P.objectives + P.constraints]
    builder = ProgramBuilder([n + 1], r + m, 1, name=P.name or "quadratic-dual")
    for i in range(n + 1):
        for j in range(i, n + 1):
            nonneg = {k: B[i, j] for k, B in enumerate(blocks) if B[i, j]}
            free = {0: -Q0[i, j]} if Q0[i, j] else {}
            # ⟨Z, E_ij⟩ = Z_ij
            e = {(i, j): -1.0} if i == j else {(i, j): -0.5}
            builder.add_row(0.0, psd={0: e}, nonneg=nonneg, free=free, label=f"Z[{i},{j}]")
    builder.add_row(1.0, nonneg={j: 1.0 for j in range(r)}, label="simplex")
    builder.set_objective(free={0: 1.0})
    return builder.build()


def build_quadratic_fractional_dual(P: RationalMinimaxProblem) -> ConicProgram:
    """二次分式 LMI 对偶：μ 列为 [[2β, bᵀ],[b, 2B]]"""
    if not isinstance(P, RationalMinimaxProblem):
        raise InputError("quadratic-fractional dual needs a denominator", "denominator")
    return build_quadratic_dual(P)


def build_linear_fractional_lp(data: LinearFractionalData) -> ConicProgram:
    """
    线性分式问题的 LP 对偶

        Σδ_j a_j + Σλ_i c_i − μb = 0
        Σδ_j α_j + Σλ_i γ_i − μβ − s = 0,  s ≥ 0
        Σδ_j = 1,  δ, λ ≥ 0
    """
    r, n = data.a.shape
    m = data.c.shape[0]
    builder = ProgramBuilder([], r + m + 1, 1, name="linear-fractional-lp")
    for k in range(n):
        nonneg = {j: data.a[j, k] for j in range(r) if data.a[j, k]}
        nonneg.update({r + i: data.c[i, k] for i in range(m) if data.c[i, k]})
        free = {0: -data.b[k]} if data.b[k] else {}
        builder.add_row(0.0, nonneg=nonneg, free=free, label=f"coord{k}")
    nonneg = {j: float(data.alpha[j]) for j in range(r)}
    nonneg.update({r + i: float(data.gamma[i]) for i in range(m)})
    nonneg[r + m] = -1.0
    builder.add_row(0.0, nonneg=nonneg, free={0: -data.beta}, label="constant")
    builder.add_row(1.0, nonneg={j: 1.0 for j in range(r)}, label="simplex")
    builder.set_objective(free={0: 1.0})
    return builder.build()

