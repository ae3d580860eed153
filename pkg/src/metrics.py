"""
对偶性指标模块
Duality metrics

- 间隙判定：对偶值与预言机值之差，结合 Slater 与贴边标志给出结论
- 弱对偶检查：证书界在可行样本上不得超过 max_j p_j
- 汇总表：批量/自检结果的 pandas 表格
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .types import SolveStatus, Verdict

if TYPE_CHECKING:
    import pandas as pd


@dataclass
class GapCfg:
    """零间隙判定容差：|gap| ≤ max(abs_tol, rel_tol·|primal|)"""
    abs_tol: float = 1e-4
    rel_tol: float = 1e-4
    weak_duality_tol: float = 1e-6
    parametric_check: bool = True   # 分式问题在 gap 中附加参数化对偶的符号检验


def gap_tolerance(primal: float, cfg: GapCfg) -> float:
    return max(cfg.abs_tol, cfg.rel_tol * abs(primal))


def gap_verdict(
    dual_status: SolveStatus,
    dual_value: Optional[float],
    primal_value: Optional[float],
    oracle_feasible: bool,
    slater: bool,
    boundary: bool,
    cfg: GapCfg,
) -> Tuple[Verdict, Optional[float]]:
    """
    给出间隙结论

    Returns:
        (结论, 间隙 primal − dual)
    """
    if dual_status == "primal_infeasible":
        return "primal unbounded or dual infeasible", None
    if dual_status == "dual_infeasible" or not oracle_feasible:
        return "infeasible", None
    if dual_status != "optimal" or dual_value is None or primal_value is None:
        return "indeterminate", None
    gap = primal_value - dual_value
    advisory = not slater or boundary
    if abs(gap) <= gap_tolerance(primal_value, cfg):
        return ("zero-gap (advisory)" if advisory else "zero-gap confirmed"), gap
    return ("gap detected (advisory)" if advisory else "gap detected"), gap


def weak_duality_violations(bounds: np.ndarray, values: np.ndarray, tol: float = 1e-6) -> List[int]:
    """bounds[k] = μ·q̂(x_k)，values[k] = max_j p_j(x_k)；返回违反 bounds ≤ values + tol 的下标"""
    return [int(k) for k in np.flatnonzero(np.asarray(bounds) > np.asarray(values) + tol)]


def summary_table(rows: Iterable[Mapping[str, object]], columns: Optional[List[str]] = None) -> pd.DataFrame:
    """批量结果汇总表（pandas 延迟导入，单文件命令不加载）"""
    import pandas as pd

    df = pd.DataFrame(list(rows))
    if columns:
        df = df.reindex(columns=[c for c in columns if c in df.columns])
    return df
