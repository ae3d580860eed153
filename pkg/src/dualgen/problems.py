"""
原问题描述
Primal problem descriptions

- MinimaxProblem: min max_j p_j(x) s.t. g_i(x) ≤ 0
- RationalMinimaxProblem: min max_j p_j(x)/q(x) s.t. g_i(x) ≤ 0
- LinearFractionalData: 全仿射分式问题的数据 (a_j, α_j, b, β, c_i, γ_i)
"""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import InputError
from ..polycore import Polynomial


def even_bound(degrees: Sequence[int]) -> int:
    """不小于所有次数的最小偶数"""
    d = max(degrees, default=0)
    return d + (d % 2)


@dataclass(frozen=True)
class MinimaxProblem:
    """极小极大多项式规划"""
    dimension: int
    objectives: Tuple[Polynomial, ...]
    constraints: Tuple[Polynomial, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not self.objectives:
            raise InputError("at least one objective is required", "objectives")
        for where, polys in (("objectives", self.objectives), ("constraints", self.constraints)):
            for k, p in enumerate(polys):
                if p.dimension != self.dimension:
                    raise InputError(f"dimension {p.dimension} does not match {self.dimension}", f"{where}.{k}")

    @property
    def r(self) -> int:
        return len(self.objectives)

    @property
    def m(self) -> int:
        return len(self.constraints)

    def polynomials(self) -> Tuple[Polynomial, ...]:
        return self.objectives + self.constraints

    @property
    def degree_bound(self) -> int:
        return even_bound([p.degree for p in self.polynomials()])

    def max_objective(self, x: np.ndarray) -> float:
        return max(p(x) for p in self.objectives)

    def max_violation(self, x: np.ndarray) -> float:
        return max((g(x) for g in self.constraints), default=-np.inf)

    def shifted(self, c: float) -> "MinimaxProblem":
        return MinimaxProblem(self.dimension, tuple(p + c for p in self.objectives), self.constraints, self.name)


@dataclass(frozen=True)
class RationalMinimaxProblem(MinimaxProblem):
    """分式极小极大规划：要求可行集上 p_j ≥ 0、q > 0（仅采样检验）"""
    denominator: Polynomial = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        super().__post_init__()
        if self.denominator is None:
            raise InputError("a denominator is required", "denominator")
        if self.denominator.dimension != self.dimension:
            raise InputError(f"dimension {self.denominator.dimension} does not match {self.dimension}", "denominator")

    def polynomials(self) -> Tuple[Polynomial, ...]:
        return self.objectives + self.constraints + (self.denominator,)

    def max_ratio(self, x: np.ndarray) -> float:
        q = self.denominator(x)
        return max(p(x) / q for p in self.objectives)

    def parametric(self, mu: float) -> MinimaxProblem:
        """参数化问题 min max_j p_j − μq"""
        objs = tuple(p - self.denominator.scale(mu) for p in self.objectives)
        return MinimaxProblem(self.dimension, objs, self.constraints, f"{self.name}[mu={mu:.6g}]")


@dataclass(frozen=True)
class LinearFractionalData:
    """
    线性分式数据

    p_j = a_jᵀx + α_j，q = bᵀx + β，g_i = c_iᵀx + γ_i
    """
    a: np.ndarray        # (r, n)
    alpha: np.ndarray    # (r,)
    b: np.ndarray        # (n,)
    beta: float
    c: np.ndarray        # (m, n)
    gamma: np.ndarray    # (m,)

    def __post_init__(self):
        r, n = np.shape(self.a)
        if np.shape(self.alpha) != (r,) or np.shape(self.b) != (n,):
            raise InputError("linear-fractional objective data has inconsistent shapes")
        if np.ndim(self.c) != 2 or np.shape(self.c)[1:] != (n,) or np.shape(self.gamma) != (np.shape(self.c)[0],):
            raise InputError("linear-fractional constraint data has inconsistent shapes")
        if r < 1:
            raise InputError("at least one objective is required", "objectives")

    @property
    def n(self) -> int:
        return int(np.shape(self.a)[1])

    def to_problem(self) -> RationalMinimaxProblem:
        n = self.n

        def affine(coef, const) -> Polynomial:
            terms = {tuple(1 if t == i else 0 for t in range(n)): v for i, v in enumerate(coef)}
            terms[(0,) * n] = const
            return Polynomial(n, terms)

        return RationalMinimaxProblem(
            n,
            tuple(affine(aj, al) for aj, al in zip(self.a, self.alpha)),
            tuple(affine(ci, gi) for ci, gi in zip(self.c, self.gamma)),
            denominator=affine(self.b, self.beta),
        )


def _affine_parts(p: Polynomial, where: str) -> Tuple[np.ndarray, float]:
    if p.degree > 1:
        raise InputError(f"expected an affine polynomial, got degree {p.degree}", where)
    n = p.dimension
    coef = np.zeros(n)
    for alpha, c in p.terms.items():
        if sum(alpha):
            coef[alpha.index(1)] = c
    return coef, p.coefficient((0,) * n)


def linear_fractional_data(P: RationalMinimaxProblem) -> LinearFractionalData:
    """从全仿射的分式问题中提取 (a_j, α_j, b, β, c_i, γ_i)"""
    objs = [_affine_parts(p, f"objectives.{j}") for j, p in enumerate(P.objectives)]
    cons = [_affine_parts(g, f"constraints.{i}") for i, g in enumerate(P.constraints)]
    b, beta = _affine_parts(P.denominator, "denominator")
    n = P.dimension
    return LinearFractionalData(
        a=np.array([o[0] for o in objs]),
        alpha=np.array([o[1] for o in objs]),
        b=b,
        beta=float(beta),
        c=np.array([g[0] for g in cons]).reshape(len(cons), n),
        gamma=np.array([g[1] for g in cons]),
    )
