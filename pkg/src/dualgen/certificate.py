"""
对偶证书
Dual certificates

extract_certificate 把求解器输出整理为可人工核对的 (δ, λ, μ, Q)：
- δ 截断负值并归一到单纯形，λ 截断负值
- Q 经最小范数修正后，用多项式算术独立重建 Σδ_j p_j + Σλ_i g_i − μq̂ − y(x)ᵀQy(x)
- 乘子规模超过 attain_bound 时标记为 “supremum (approached)”

kkt_multipliers / normal_cone_certificate 在已知极小点处构造乘子并检验其对偶可行性。
"""

from __future__ import annotations
from dataclasses import dataclass
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import nnls

from ..exceptions import CertificationError, PreconditionError
from ..polycore import CompiledPolynomial, Polynomial, monomial_basis
from ..soscert import CertConfig, SosVerdict, attach_targets, certify_gram, is_sos, links_for_basis
from ..solver import SolveReport, SolverConfig
from ..types import Attainment, CertificatePayload, DualForm, MultiIndex
from .problems import MinimaxProblem, RationalMinimaxProblem

logger = logging.getLogger(__name__)

# δ, λ 允许的负值
_SIGN_SLACK = 1e-9


@dataclass
class DualCertificate:
    """对偶证书 (δ, λ, μ, Q)"""
    delta: np.ndarray
    lambda_: np.ndarray
    mu: float
    gram: np.ndarray
    basis: Tuple[MultiIndex, ...]
    identity_residual: float
    min_eigenvalue: float
    form: DualForm
    attainment: Attainment
    theta: float = 0.0   # 参数化对偶的 θ；其余形式为 0

    def multiplier_polynomial(self, P: MinimaxProblem) -> Polynomial:
        """Σδ_j p_j + Σλ_i g_i − μq̂ − θ"""
        return _combination(P, self.delta, self.lambda_, self.mu) - self.theta

    def bound_violation(self, P: MinimaxProblem, x: np.ndarray) -> float:
        """弱对偶：μ·q̂(x) + θ − max_j p_j(x)，应 ≤ 0"""
        qx = P.denominator(x) if isinstance(P, RationalMinimaxProblem) else 1.0
        return self.mu * qx + self.theta - P.max_objective(x)

    def to_dict(self) -> CertificatePayload:
        return {
            "delta": self.delta.tolist(),
            "lambda": self.lambda_.tolist(),
            "mu": self.mu,
            "gramBasis": [list(m) for m in self.basis],
            "gram": self.gram.tolist(),
            "identityResidual": self.identity_residual,
            "minEigenvalue": self.min_eigenvalue,
            "form": self.form,
            "theta": self.theta,
        }


def _combination(P: MinimaxProblem, delta: np.ndarray, lam: np.ndarray, mu: float) -> Polynomial:
    n = P.dimension
    h = Polynomial.zero(n)
    for dj, p in zip(delta, P.objectives):
        h = h + p.scale(dj)
    for li, g in zip(lam, P.constraints):
        h = h + g.scale(li)
    q = P.denominator if isinstance(P, RationalMinimaxProblem) else Polynomial.constant(n, 1.0)
    return h - q.scale(mu)


def _clip(v: np.ndarray, name: str) -> np.ndarray:
    if v.size and v.min() < -1e-6:
        raise CertificationError(f"{name} has entry {v.min():.3e} below zero")
    if v.size and v.min() < -_SIGN_SLACK:
        logger.debug(f"clipping {name} entries down to {v.min():.3e}")
    return np.maximum(v, 0.0)


def extract_certificate(
    P: MinimaxProblem,
    report: SolveReport,
    form: DualForm = "sos",
    cfg: Optional[CertConfig] = None,
    mu_bar: Optional[float] = None,
) -> DualCertificate:
    """
    从最优求解报告中提取对偶证书

    Args:
        P: 原问题（分式问题时 q̂ = q，否则 q̂ = 1）
        report: status 必须为 optimal
        form: sos（Gram 参数化）、lmi（二次 LMI，Q = Z/2）、lp（线性分式 LP）
            或 parametric（自由变量为 θ，μ 固定为 mu_bar）
        cfg: 证书容差与基规模上限
        mu_bar: parametric 形式的固定水平 μ̄

    Raises:
        PreconditionError: 报告不是 optimal；parametric 形式缺少 mu_bar 或分母
        CertificationError: 恒等式残差或最小特征值超出容差
    """
    cfg = cfg or CertConfig()
    if report.status != "optimal":
        raise PreconditionError(f"certificate extraction needs an optimal report, got {report.status}")
    r, m, n = P.r, P.m, P.dimension
    delta = _clip(np.asarray(report.nonneg[:r], dtype=float), "delta")
    total = delta.sum()
    if total <= 0:
        raise CertificationError("delta sums to zero")
    delta = delta / total
    lam = _clip(np.asarray(report.nonneg[r:r + m], dtype=float), "lambda")
    theta = 0.0
    if form == "parametric":
        if mu_bar is None or not isinstance(P, RationalMinimaxProblem):
            raise PreconditionError("parametric certificates need a rational problem and its level mu_bar")
        mu, theta = float(mu_bar), float(report.free[0])
    else:
        mu = float(report.free[0])
    h = _combination(P, delta, lam, mu) - theta

    if form in ("sos", "parametric"):
        k = P.degree_bound // 2
        basis: List[MultiIndex] = list(monomial_basis(n, k, cfg.basis_limit).monomials)
        Q = report.psd[0]
    elif form == "lmi":
        k = 1
        basis = list(monomial_basis(n, 1, cfg.basis_limit).monomials)
        Q = report.psd[0] / 2.0
    elif form == "lp":
        # 常数 Σδα + Σλγ − μβ = s ≥ 0 即 1×1 Gram
        k = 0
        basis = [(0,) * n]
        Q = np.array([[max(float(report.nonneg[r + m]), 0.0)]])
    else:
        raise PreconditionError(f"no certificate layout for form {form!r}")
    links, _ = attach_targets(links_for_basis(basis), h)
    cert = certify_gram(Q, links, basis, h, cfg, k)
    scale = max(np.abs(lam).max(initial=0.0), np.abs(cert.gram).max(initial=0.0), abs(mu), abs(theta))
    attainment: Attainment = "optimal (attained)" if scale <= cfg.attain_bound else "supremum (approached)"
    return DualCertificate(
        delta, lam, mu, cert.gram, cert.basis, cert.residual, cert.min_eigenvalue, form, attainment, theta
    )


@dataclass
class KktMultipliers:
    """已知极小点处的乘子"""
    point: np.ndarray
    delta: np.ndarray
    lambda_: np.ndarray
    value: float
    active_objectives: List[int]
    active_constraints: List[int]
    stationarity: float


def kkt_multipliers(P: MinimaxProblem, x_star: np.ndarray, tol: float = 1e-6, weight: float = 1e3) -> KktMultipliers:
    """
    法锥路线：在 x* 处求 δ ∈ Δ（支撑在活跃目标上）与 λ ≥ 0（支撑在活跃约束上）

    使 Σδ_j ∇p_j(x*) + Σλ_i ∇g_i(x*) ≈ 0，用带单纯形罚项的非负最小二乘求解。
    """
    x = np.asarray(x_star, dtype=float)
    vals = np.array([p(x) for p in P.objectives])
    top = vals.max()
    act_p = [j for j, v in enumerate(vals) if v >= top - tol]
    act_g = [i for i, g in enumerate(P.constraints) if abs(g(x)) <= tol]
    cols = [CompiledPolynomial(P.objectives[j]).gradient(x) for j in act_p]
    cols += [CompiledPolynomial(P.constraints[i]).gradient(x) for i in act_g]
    G = np.array(cols).T.reshape(P.dimension, len(cols))
    simplex = np.r_[np.ones(len(act_p)), np.zeros(len(act_g))] * weight
    w, _ = nnls(np.vstack([G, simplex]), np.r_[np.zeros(P.dimension), weight])
    s = w[: len(act_p)].sum()
    w = w / s if s > 0 else w
    delta = np.zeros(P.r)
    delta[act_p] = w[: len(act_p)]
    lam = np.zeros(P.m)
    lam[act_g] = w[len(act_p):]
    return KktMultipliers(x, delta, lam, float(top), act_p, act_g, float(np.linalg.norm(G @ w)))


def normal_cone_certificate(
    P: MinimaxProblem,
    x_star: np.ndarray,
    cfg: Optional[CertConfig] = None,
    solver_cfg: Optional[SolverConfig] = None,
) -> Tuple[KktMultipliers, SosVerdict]:
    """以 (δ̄, λ̄, max_j p_j(x*)) 为候选，检验 Σδ̄_j p_j + Σλ̄_i g_i − max_j p_j(x*) 是否 SOS"""
    if isinstance(P, RationalMinimaxProblem):
        raise PreconditionError("normal-cone certificate is defined for polynomial minimax problems")
    kkt = kkt_multipliers(P, x_star)
    h = _combination(P, kkt.delta, kkt.lambda_, kkt.value)
    return kkt, is_sos(h, cfg, solver_cfg)
