"""
数据类型定义模块
Type definitions module

定义各模块共享的 Literal 状态别名与 JSON 负载 TypedDict：
- 求解器状态、SOS 判定状态、预言机状态
- 问题种类、对偶形式、间隙结论、可达性标签
"""

from typing import Literal, TypedDict, Dict, List, Optional, Tuple

MultiIndex = Tuple[int, ...]

# 锥规划求解状态
SolveStatus = Literal["optimal", "primal_infeasible", "dual_infeasible", "indeterminate"]

# SOS / SOS-matrix / SOS-convex 判定
SosStatus = Literal["certified", "refuted", "indeterminate"]

# 原问题预言机
OracleStatus = Literal["solved", "infeasible"]

ProblemKind = Literal["minimax", "fractional", "linear-fractional", "robust"]

# 对偶形式：Gram 参数化 / 单个 LMI / 线性规划 / 参数化对偶
DualForm = Literal["sos", "lmi", "lp", "parametric"]

Attainment = Literal["optimal (attained)", "supremum (approached)"]

Verdict = Literal[
    "zero-gap confirmed",
    "zero-gap (advisory)",
    "gap detected",
    "gap detected (advisory)",
    "infeasible",
    "primal unbounded or dual infeasible",
    "indeterminate",
]


# "lambda" 是关键字，只能用函数式写法
CertificatePayload = TypedDict(
    "CertificatePayload",
    {
        "delta": List[float],
        "lambda": List[float],
        "mu": float,
        "gramBasis": List[List[int]],
        "gram": List[List[float]],
        "identityResidual": float,
        "minEigenvalue": float,
        "form": DualForm,
        "theta": float,
    },
)


class OraclePayload(TypedDict):
    status: OracleStatus
    value: Optional[float]
    minimizer: List[float]
    activeSet: List[int]
    feasibilityResidual: float
    boundaryFlag: bool
    lowerBound: Optional[float]
    box: Dict[str, List[float]]
    iterations: int
    expansions: int
    brackets: List[List[float]]
    warnings: List[str]
