"""
对偶构造模块
Dual program generation

由原问题描述构造各类对偶规划，并把求解器输出整理为可核对的证书：
- problems: MinimaxProblem / RationalMinimaxProblem / LinearFractionalData
- builders: SOS 对偶、分式 SOS 对偶、二次 LMI、二次分式、线性分式 LP、参数化对偶
- robust: 有限情景与多面体（顶点）鲁棒对应
- certificate: 证书提取与已知极小点处的法锥检验
"""

from .problems import MinimaxProblem, RationalMinimaxProblem, LinearFractionalData, linear_fractional_data, even_bound
from .builders import (
    build_dual,
    build_fractional_dual,
    build_parametric_dual,
    build_quadratic_dual,
    build_quadratic_fractional_dual,
    build_linear_fractional_lp,
)
from .robust import RobustProblem, robust_counterpart, check_affine_in_parameters, vertex_scenarios, worst_case
from .certificate import DualCertificate, extract_certificate, KktMultipliers, kkt_multipliers, normal_cone_certificate

__all__ = [
    "MinimaxProblem",
    "RationalMinimaxProblem",
    "LinearFractionalData",
    "linear_fractional_data",
    "even_bound",
    "build_dual",
    "build_fractional_dual",
    "build_parametric_dual",
    "build_quadratic_dual",
    "build_quadratic_fractional_dual",
    "build_linear_fractional_lp",
    "RobustProblem",
    "robust_counterpart",
    "check_affine_in_parameters",
    "vertex_scenarios",
    "worst_case",
    "DualCertificate",
    "extract_certificate",
    "KktMultipliers",
    "kkt_multipliers",
    "normal_cone_certificate",
]
