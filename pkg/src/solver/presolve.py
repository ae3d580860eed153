"""
预处理
Presolve

- 零行：rhs 为 0 则删除，否则直接判定不可行
- 行缩放为单位范数，首个非零元归一为正号
- 去重：同向行保留一条；同向但 rhs 不同则判定不可行
- 记录保留行与缩放系数，用于还原乘子 y
"""

from __future__ import annotations
from dataclasses import dataclass, replace
import logging
from typing import Dict

import numpy as np

from .program import ConicProgram

logger = logging.getLogger(__name__)

# 行系数比较的舍入位数
_KEY_DECIMALS = 11


@dataclass(frozen=True)
class PresolvedProgram:
    """预处理结果"""
    program: ConicProgram
    kept: np.ndarray           # 原行号
    scales: np.ndarray         # 保留行的带符号缩放系数
    original_rows: int
    infeasible: bool = False
    message: str = ""

    @property
    def dropped(self) -> int:
        return self.original_rows - int(self.kept.shape[0])

    def recover_multipliers(self, y: np.ndarray) -> np.ndarray:
        """预处理后的乘子 y' 还原到原始行：y[kept] = scale * y'"""
        out = np.zeros(self.original_rows)
        out[self.kept] = self.scales * y
        return out


def _row_matrix(prog: ConicProgram) -> np.ndarray:
    m = prog.num_rows
    parts = [Ak.reshape(m, -1) for Ak in prog.a_psd] + [prog.a_nonneg, prog.a_free]
    return np.hstack(parts) if parts else np.zeros((m, 0))


def presolve(prog: ConicProgram, rhs_tol: float = 1e-9) -> PresolvedProgram:
    """
    删除零行与重复行并做行缩放

    Args:
        prog: 原始锥规划
        rhs_tol: 判定 rhs 相同/为零的相对容差

    Returns:
        PresolvedProgram: infeasible=True 时 program 为原规划
    """
    m = prog.num_rows
    rows = _row_matrix(prog)
    norms = np.linalg.norm(rows, axis=1)
    kept, scales = [], []
    seen: Dict[bytes, int] = {}
    rhs_seen: Dict[int, float] = {}
    for i in range(m):
        bi = float(prog.b[i])
        if norms[i] == 0.0:
            if abs(bi) > rhs_tol:
                msg = f"row {prog.row_labels[i] if prog.row_labels else i} reads 0 = {bi!r}"
                logger.info(f"presolve: contradictory row, {msg}")
                return PresolvedProgram(prog, np.arange(m), np.ones(m), m, True, msg)
            continue
        row = rows[i] / norms[i]
        lead = row[np.flatnonzero(np.abs(row) > 1e-14)[0]]
        sign = 1.0 if lead > 0 else -1.0
        row = sign * row
        rhs = sign * bi / norms[i]
        key = np.round(row, _KEY_DECIMALS).tobytes()
        if key in seen:
            first = seen[key]
            if abs(rhs_seen[first] - rhs) > rhs_tol * max(1.0, abs(rhs)):
                msg = f"rows {first} and {i} have the same direction but different right-hand sides"
                logger.info(f"presolve: {msg}")
                return PresolvedProgram(prog, np.arange(m), np.ones(m), m, True, msg)
            continue
        seen[key] = i
        rhs_seen[i] = rhs
        kept.append(i)
        scales.append(sign / norms[i])

    idx = np.array(kept, dtype=int)
    sc = np.array(scales, dtype=float)
    out = replace(
        prog,
        a_psd=tuple(Ak[idx] * sc[:, None, None] for Ak in prog.a_psd),
        a_nonneg=prog.a_nonneg[idx] * sc[:, None],
        a_free=prog.a_free[idx] * sc[:, None],
        b=prog.b[idx] * sc,
        row_labels=tuple(prog.row_labels[i] for i in idx) if prog.row_labels else (),
    )
    if m - idx.shape[0]:
        logger.debug(f"presolve: dropped {m - idx.shape[0]} of {m} rows")
    return PresolvedProgram(out, idx, sc, m)
