"""
鲁棒对应问题
Robust counterparts

不确定参数 v 取有限情景，或取多面体 co{v¹..v^s} 且 f(x, v) 关于 v 仿射；
两种情形都化为对所有情景同时施加约束的极小极大问题。
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Literal, Sequence, Tuple

import numpy as np

from ..exceptions import InputError
from ..polycore import Polynomial, restrict
from .problems import MinimaxProblem, even_bound

RobustMode = Literal["finite", "polytopic"]


def check_affine_in_parameters(template: Polynomial, n: int, where: str = "") -> None:
    """检查模板 f(x, v) 关于尾部参数 v 至多一次（结构性检查）"""
    for alpha in template.terms:
        if sum(alpha[n:]) > 1:
            raise InputError(f"template is not affine in the uncertain parameters (term {list(alpha)})", where or None)


def vertex_scenarios(template: Polynomial, n: int, vertices: Sequence[Sequence[float]], where: str = "") -> Tuple[Polynomial, ...]:
    """模板在各顶点处的情景多项式"""
    if not vertices:
        raise InputError("scenario list is empty", where or None)
    p = template.dimension - n
    out = []
    for k, v in enumerate(vertices):
        if len(v) != p:
            raise InputError(f"vertex has {len(v)} coordinates, template expects {p}", f"{where}.vertices.{k}")
        out.append(restrict(template, n, v))
    return tuple(out)


def worst_case(template: Polynomial, n: int, x: Sequence[float], points: np.ndarray) -> float:
    """max_v f(x, v)，v 取 points 的各行"""
    if template.dimension == n:
        return template(x)
    x = np.asarray(x, dtype=float)
    return max(template(np.concatenate([x, v])) for v in np.atleast_2d(points))


@dataclass(frozen=True)
class RobustProblem:
    """不确定极小极大问题 (RP) 的情景描述"""
    dimension: int
    objective: Tuple[Polynomial, ...]
    constraints: Tuple[Tuple[Polynomial, ...], ...] = ()
    mode: RobustMode = "finite"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(self.objective))
        object.__setattr__(self, "constraints", tuple(tuple(c) for c in self.constraints))
        if not self.objective:
            raise InputError("objective scenario list is empty", "scenarios.objective")
        for i, scen in enumerate(self.constraints):
            if not scen:
                raise InputError("constraint scenario list is empty", f"scenarios.constraints.{i}")
        for p in self.objective + tuple(g for scen in self.constraints for g in scen):
            if p.dimension != self.dimension:
                raise InputError(f"scenario polynomial has dimension {p.dimension}, expected {self.dimension}")

    @property
    def degree_bound(self) -> int:
        polys = self.objective + tuple(g for scen in self.constraints for g in scen)
        return even_bound([p.degree for p in polys])

    @classmethod
    def polytopic(
        cls,
        dimension: int,
        objective: Tuple[Polynomial, Sequence[Sequence[float]]],
        constraints: Sequence[Tuple[Polynomial, Sequence[Sequence[float]]]] = (),
        name: str = "",
    ) -> "RobustProblem":
        """
        由模板与顶点构造

        Args:
            dimension: 决策变量个数 n
            objective: (f_0(x, v_0), 顶点列表)
            constraints: [(f_i(x, v_i), 顶点列表), ...]
        """
        tmpl, verts = objective
        check_affine_in_parameters(tmpl, dimension, "scenarios.objective")
        obj = vertex_scenarios(tmpl, dimension, verts, "scenarios.objective")
        cons = []
        for i, (t, vs) in enumerate(constraints):
            check_affine_in_parameters(t, dimension, f"scenarios.constraints.{i}")
            cons.append(vertex_scenarios(t, dimension, vs, f"scenarios.constraints.{i}"))
        return cls(dimension, obj, tuple(cons), "polytopic", name)


def robust_counterpart(U: RobustProblem) -> MinimaxProblem:
    """目标 = 目标情景；约束 = 所有约束情景依次拼接"""
    cons = tuple(g for scen in U.constraints for g in scen)
    return MinimaxProblem(U.dimension, U.objective, cons, U.name or "robust-counterpart")
