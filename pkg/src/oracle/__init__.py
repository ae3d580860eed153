"""
原问题预言机模块
Primal oracle

独立于锥求解器的原问题参考解：
- epigraph: 上图形式割平面 + 精化，Slater 点搜索，可行点采样
- fractional: 对 μ 二分求分式问题的下确界
"""

from .epigraph import (
    OracleConfig,
    OracleResult,
    EpigraphOracle,
    SlaterResult,
    box_arrays,
    solve_primal,
    find_slater_point,
    sample_feasible_points,
)
from .fractional import solve_fractional_primal, check_fractional_preconditions

__all__ = [
    "OracleConfig",
    "OracleResult",
    "EpigraphOracle",
    "SlaterResult",
    "box_arrays",
    "solve_primal",
    "find_slater_point",
    "sample_feasible_points",
    "solve_fractional_primal",
    "check_fractional_preconditions",
]
