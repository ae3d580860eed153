"""
锥规划求解模块
Conic solver

- program: ConicProgram 与逐行装配器 ProgramBuilder
- presolve: 零行/重复行删除、行缩放与乘子还原
- ipm: HSD 原始-对偶内点法（NT 缩放 + Mehrotra 预测校正）
- dump: 稀疏文本转储，便于与外部求解器交叉核对
"""

from .program import ConicProgram, ProgramBuilder
from .presolve import PresolvedProgram, presolve
from .ipm import ConicSolver, SolverConfig, SolveReport, Residuals, solve
from .dump import dump_program, load_program, write_program

__all__ = [
    "ConicProgram",
    "ProgramBuilder",
    "PresolvedProgram",
    "presolve",
    "ConicSolver",
    "SolverConfig",
    "SolveReport",
    "Residuals",
    "solve",
    "dump_program",
    "load_program",
    "write_program",
]
