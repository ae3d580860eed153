"""
块结构锥规划
Block-structured conic program

    maximize   Σ_k ⟨C_k, X_k⟩ + c_lᵀ x_l + c_fᵀ x_f
    subject to Σ_k ⟨A_k[i], X_k⟩ + a_l[i]ᵀ x_l + a_f[i]ᵀ x_f = b_i
               X_k ⪰ 0,  x_l ≥ 0,  x_f 自由

ProgramBuilder 逐行装配等式约束，build() 生成不可变的 ConicProgram。
"""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import CapacityError, InputError

# PSD 块系数：稠密对称矩阵，或 {(i, j): v} 稀疏表（i ≠ j 时自动对称填充）
BlockCoef = Union[np.ndarray, Mapping[Tuple[int, int], float]]


@dataclass(frozen=True)
class ConicProgram:
    """块结构锥规划（最大化形式）"""
    psd_blocks: Tuple[int, ...]
    nonneg_dim: int
    free_dim: int
    a_psd: Tuple[np.ndarray, ...]      # 每块形状 (m, s, s)
    a_nonneg: np.ndarray               # (m, nonneg_dim)
    a_free: np.ndarray                 # (m, free_dim)
    b: np.ndarray                      # (m,)
    c_psd: Tuple[np.ndarray, ...]      # 每块 (s, s)
    c_nonneg: np.ndarray
    c_free: np.ndarray
    row_labels: Tuple[str, ...] = ()
    name: str = ""

    @property
    def num_rows(self) -> int:
        return int(self.b.shape[0])

    @property
    def num_variables(self) -> int:
        return sum(s * (s + 1) // 2 for s in self.psd_blocks) + self.nonneg_dim + self.free_dim

    def validate(self, symmetry_tol: float = 1e-12) -> None:
        """检查维度一致与系数对称"""
        m = self.num_rows
        if len(self.a_psd) != len(self.psd_blocks) or len(self.c_psd) != len(self.psd_blocks):
            raise InputError("PSD coefficient list does not match declared blocks")
        for k, (s, Ak, Ck) in enumerate(zip(self.psd_blocks, self.a_psd, self.c_psd)):
            if Ak.shape != (m, s, s) or Ck.shape != (s, s):
                raise InputError(f"PSD block {k} coefficients have shape {Ak.shape}, expected {(m, s, s)}")
            if np.abs(Ak - Ak.transpose(0, 2, 1)).max(initial=0.0) > symmetry_tol:
                raise InputError(f"PSD block {k} has a non-symmetric row coefficient")
            if np.abs(Ck - Ck.T).max(initial=0.0) > symmetry_tol:
                raise InputError(f"PSD block {k} has a non-symmetric objective coefficient")
        if self.a_nonneg.shape != (m, self.nonneg_dim) or self.c_nonneg.shape != (self.nonneg_dim,):
            raise InputError("nonnegative block coefficients do not match declared size")
        if self.a_free.shape != (m, self.free_dim) or self.c_free.shape != (self.free_dim,):
            raise InputError("free block coefficients do not match declared size")
        arrays = [self.b, self.a_nonneg, self.a_free, self.c_nonneg, self.c_free, *self.a_psd, *self.c_psd]
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise InputError("program data contains NaN or Inf")

    def check_capacity(self, max_variables: int, max_block: int) -> None:
        big = max(self.psd_blocks, default=0)
        if big > max_block:
            raise CapacityError(f"PSD block of size {big} exceeds limit {max_block}", big, max_block)
        if self.num_variables > max_variables:
            raise CapacityError(
                f"program has {self.num_variables} variables, limit is {max_variables}",
                self.num_variables,
                max_variables,
            )

    def objective(self, psd: Sequence[np.ndarray], nonneg: np.ndarray, free: np.ndarray) -> float:
        val = sum(float(np.sum(C * X)) for C, X in zip(self.c_psd, psd))
        return val + float(self.c_nonneg @ nonneg) + float(self.c_free @ free)

    def apply(self, psd: Sequence[np.ndarray], nonneg: np.ndarray, free: np.ndarray) -> np.ndarray:
        """计算 A(x)"""
        out = self.a_nonneg @ nonneg + self.a_free @ free
        for Ak, X in zip(self.a_psd, psd):
            out = out + Ak.reshape(self.num_rows, -1) @ X.reshape(-1)
        return out


@dataclass
class ProgramBuilder:
    """逐行装配 ConicProgram"""
    psd_blocks: Sequence[int]
    nonneg_dim: int = 0
    free_dim: int = 0
    name: str = ""
    _rows: List[Tuple[Dict[int, BlockCoef], Dict[int, float], Dict[int, float], float, str]] = field(
        default_factory=list, repr=False
    )
    _c_psd: Dict[int, BlockCoef] = field(default_factory=dict, repr=False)
    _c_nonneg: Dict[int, float] = field(default_factory=dict, repr=False)
    _c_free: Dict[int, float] = field(default_factory=dict, repr=False)

    def add_row(
        self,
        rhs: float,
        psd: Optional[Dict[int, BlockCoef]] = None,
        nonneg: Optional[Mapping[int, float]] = None,
        free: Optional[Mapping[int, float]] = None,
        label: str = "",
    ) -> int:
        """追加一行等式约束，返回行号"""
        self._rows.append((dict(psd or {}), dict(nonneg or {}), dict(free or {}), float(rhs), label))
        return len(self._rows) - 1

    def set_objective(
        self,
        psd: Optional[Dict[int, BlockCoef]] = None,
        nonneg: Optional[Mapping[int, float]] = None,
        free: Optional[Mapping[int, float]] = None,
    ) -> None:
        self._c_psd = dict(psd or {})
        self._c_nonneg = dict(nonneg or {})
        self._c_free = dict(free or {})

    @staticmethod
    def _fill(target: np.ndarray, coef: BlockCoef) -> None:
        if isinstance(coef, np.ndarray):
            target += (coef + coef.T) / 2.0
            return
        for (i, j), v in coef.items():
            if i == j:
                target[i, i] += v
            else:
                target[i, j] += v
                target[j, i] += v

    def build(self) -> ConicProgram:
        m = len(self._rows)
        sizes = tuple(int(s) for s in self.psd_blocks)
        a_psd = [np.zeros((m, s, s)) for s in sizes]
        a_l = np.zeros((m, self.nonneg_dim))
        a_f = np.zeros((m, self.free_dim))
        b = np.zeros(m)
        labels = []
        for r, (psd, nonneg, free, rhs, label) in enumerate(self._rows):
            for k, coef in psd.items():
                self._fill(a_psd[k][r], coef)
            for j, v in nonneg.items():
                a_l[r, j] += v
            for j, v in free.items():
                a_f[r, j] += v
            b[r] = rhs
            labels.append(label or f"r{r}")
        c_psd = [np.zeros((s, s)) for s in sizes]
        for k, coef in self._c_psd.items():
            self._fill(c_psd[k], coef)
        c_l = np.zeros(self.nonneg_dim)
        for j, v in self._c_nonneg.items():
            c_l[j] += v
        c_f = np.zeros(self.free_dim)
        for j, v in self._c_free.items():
            c_f[j] += v
        prog = ConicProgram(
            psd_blocks=sizes,
            nonneg_dim=self.nonneg_dim,
            free_dim=self.free_dim,
            a_psd=tuple(a_psd),
            a_nonneg=a_l,
            a_free=a_f,
            b=b,
            c_psd=tuple(c_psd),
            c_nonneg=c_l,
            c_free=c_f,
            row_labels=tuple(labels),
            name=self.name,
        )
        prog.validate()
        return prog
