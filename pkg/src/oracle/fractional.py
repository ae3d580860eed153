"""
分式问题预言机
Fractional primal oracle

对 μ 二分：φ(μ) = inf_x max_j {p_j(x) − μq(x)} ≥ 0 当且仅当分式问题下确界 ≥ μ。
每个参数化问题由 EpigraphOracle 求解；括号序列嵌套且按几何速率收缩。
"""

from __future__ import annotations
import logging
from typing import List, Optional, Tuple

import numpy as np

from ..dualgen import MinimaxProblem, RationalMinimaxProblem
from ..exceptions import PreconditionError
from .epigraph import EpigraphOracle, OracleConfig, OracleResult, box_arrays, sample_feasible_points

logger = logging.getLogger(__name__)

# 下界外推的最大步数
_MAX_LOWER_STEPS = 60


def _feasible_point(P: RationalMinimaxProblem, oracle: EpigraphOracle) -> Tuple[Optional[np.ndarray], OracleResult]:
    """可行点 x̄：最小化 max_i g_i；无约束时取搜索盒中心"""
    if not P.constraints:
        lo, hi = box_arrays(oracle.cfg.box, P.dimension)
        center = (lo + hi) / 2.0
        return center, OracleResult("solved", 0.0, center, [], 0.0, False, box=(lo.tolist(), hi.tolist()))
    res = oracle.solve(MinimaxProblem(P.dimension, P.constraints, (), name="feasibility"))
    ok = res.status == "solved" and res.value is not None and res.value <= oracle.cfg.cp_tol
    return (res.minimizer if ok else None), res


def check_fractional_preconditions(
    P: RationalMinimaxProblem,
    x_bar: np.ndarray,
    cfg: OracleConfig,
    samples: int = 200,
    box=None,
) -> List[str]:
    """
    在采样可行点上检查 q > 0（违反则抛错）与 p_j ≥ 0（违反只记警告）

    Raises:
        PreconditionError: 某个可行样本处 q ≤ 0
    """
    rng = np.random.default_rng(cfg.seed)
    pts = sample_feasible_points(P, samples, cfg.box if box is None else box, rng, center=x_bar)
    pts = np.vstack([x_bar[None, :], pts])
    warnings: List[str] = []
    for x in pts:
        qx = P.denominator(x)
        if qx <= 0.0:
            raise PreconditionError(f"denominator is {qx:.6g} <= 0 at feasible point {x.tolist()}")
    for x in pts:
        neg = [j for j, p in enumerate(P.objectives) if p(x) < -cfg.cp_tol]
        if neg:
            msg = f"objective {neg[0]} is negative at feasible point {x.tolist()}"
            logger.warning(msg)
            warnings.append(msg)
            break
    return warnings


def solve_fractional_primal(P: RationalMinimaxProblem, cfg: Optional[OracleConfig] = None) -> OracleResult:
    """
    二分求分式问题的下确界

    Args:
        P: 分式极小极大问题
        cfg: 预言机配置（cp_tol 同时作为二分宽度与 |φ(μ)| 的停止阈值）

    Returns:
        OracleResult: value 为 μ，brackets 为嵌套括号序列，boundary_flag 取自最后一次参数化求解
    """
    cfg = cfg or OracleConfig()
    oracle = EpigraphOracle(cfg)
    x_bar, feas = _feasible_point(P, oracle)
    if x_bar is None:
        feas.status = "infeasible"
        feas.value = None
        return feas
    box = np.stack(feas.box, axis=1) if feas.box[0] else None
    warnings = check_fractional_preconditions(P, x_bar, cfg, box=box)

    cache = {}

    def F(mu: float) -> OracleResult:
        if mu not in cache:
            cache[mu] = oracle.solve(P.parametric(mu))
        return cache[mu]

    def sign_ok(res: OracleResult) -> bool:
        return res.status == "solved" and res.value is not None and res.value >= 0.0

    hi = P.max_ratio(x_bar)
    lo = min(0.0, hi)
    step = max(1.0, abs(hi))
    for _ in range(_MAX_LOWER_STEPS):
        if sign_ok(F(lo)):
            break
        lo = hi - step
        step *= 2.0
    else:
        raise PreconditionError("could not bracket the fractional optimum from below")

    brackets: List[Tuple[float, float]] = [(lo, hi)]
    last = F(hi)
    mu = hi
    while hi - lo > cfg.cp_tol:
        mid = 0.5 * (lo + hi)
        res = F(mid)
        last, mu = res, mid
        if res.value is not None and abs(res.value) <= cfg.cp_tol:
            brackets.append((lo, hi))
            break
        if sign_ok(res):
            lo = mid
        else:
            hi = mid
        brackets.append((lo, hi))
    logger.debug("fractional bisection: %d brackets, final [%g, %g]", len(brackets), lo, hi)

    x = last.minimizer
    qx = P.denominator(x)
    ratios = np.array([p(x) / qx for p in P.objectives]) if qx > 0 else np.zeros(P.r)
    active = [j for j, v in enumerate(ratios) if v >= ratios.max() - cfg.active_tol]
    return OracleResult(
        status="solved",
        value=float(mu),
        minimizer=x,
        active_set=active,
        feasibility_residual=last.feasibility_residual,
        boundary_flag=last.boundary_flag,
        lower_bound=float(lo),
        box=last.box,
        iterations=len(brackets) - 1,
        expansions=last.expansions,
        brackets=brackets,
        warnings=warnings + last.warnings,
    )
