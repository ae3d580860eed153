"""
原问题预言机
Epigraph cutting-plane oracle

上图形式：min z s.t. p_j(x) ≤ z, g_i(x) ≤ 0, x ∈ box
- Kelley 割平面：HiGHS 求解主 LP，梯度来自 polycore 的精确导数
- SLSQP 局部精化（从割平面最优点与网格最优点出发）
- n ≤ 2 时追加稠密网格扫描（带种子抖动）
- 极小点贴边时按 expand_factor 扩大搜索盒，最多 max_expansions 次（tenacity 按结果重试）

与锥求解器完全独立，只依赖 scipy.optimize。
"""

from __future__ import annotations
from dataclasses import dataclass, field, replace
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog, minimize
from tenacity import Retrying, retry_if_result, stop_after_attempt

from ..dualgen import MinimaxProblem
from ..exceptions import InputError
from ..polycore import CompiledPolynomial
from ..types import OraclePayload, OracleStatus

BoxSpec = Union[Tuple[float, float], Sequence[Tuple[float, float]]]


@dataclass
class OracleConfig:
    """预言机配置"""
    box: BoxSpec = (-10.0, 10.0)
    grid_points: int = 41
    cp_max_iter: int = 200
    cp_tol: float = 1e-6
    expand_factor: float = 4.0
    max_expansions: int = 3
    refine: bool = True
    seed: int = 0
    active_tol: float = 1e-6
    boundary_tol: float = 1e-6
    slater_margin: float = 1e-6

    def __post_init__(self):
        if self.grid_points < 2:
            raise InputError(f"grid_points must be >= 2, got {self.grid_points}", "oracle.grid_points")
        if self.expand_factor <= 1.0:
            raise InputError(f"expand_factor must exceed 1, got {self.expand_factor}", "oracle.expand_factor")
        box = np.asarray(self.box, dtype=float)
        lo, hi = (box[0], box[1]) if box.ndim == 1 else (box[:, 0], box[:, 1])
        if np.any(np.asarray(lo) >= np.asarray(hi)):
            raise InputError(f"box must be nonempty, got {self.box}", "oracle.box")


@dataclass
class OracleResult:
    """预言机结果"""
    status: OracleStatus
    value: Optional[float]
    minimizer: np.ndarray
    active_set: List[int]
    feasibility_residual: float
    boundary_flag: bool
    lower_bound: Optional[float] = None
    box: Tuple[List[float], List[float]] = ([], [])
    iterations: int = 0
    expansions: int = 0
    brackets: List[Tuple[float, float]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    def to_dict(self) -> OraclePayload:
        return {
            "status": self.status,
            "value": self.value,
            "minimizer": self.minimizer.tolist(),
            "activeSet": list(self.active_set),
            "feasibilityResidual": self.feasibility_residual,
            "boundaryFlag": self.boundary_flag,
            "lowerBound": self.lower_bound,
            "box": {"lo": list(self.box[0]), "hi": list(self.box[1])},
            "iterations": self.iterations,
            "expansions": self.expansions,
            "brackets": [list(b) for b in self.brackets],
            "warnings": list(self.warnings),
        }


def box_arrays(box: BoxSpec, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """标量区间或逐变量区间 → (lo, hi) 数组"""
    arr = np.asarray(box, dtype=float)
    if arr.ndim == 1:
        return np.full(n, arr[0]), np.full(n, arr[1])
    if arr.shape != (n, 2):
        raise InputError(f"box has shape {arr.shape}, expected ({n}, 2)", "box")
    return arr[:, 0].copy(), arr[:, 1].copy()


def _needs_larger_box(res: OracleResult) -> bool:
    return res.boundary_flag or res.status == "infeasible"


class EpigraphOracle:
    """割平面 + 局部精化的原问题求解器"""

    def __init__(self, cfg: Optional[OracleConfig] = None):
        self.cfg = cfg or OracleConfig()
        self._log = logging.getLogger(self.__class__.__name__)

    def solve(self, P: MinimaxProblem) -> OracleResult:
        """
        求解极小极大问题，必要时扩大搜索盒

        Args:
            P: 极小极大问题（假定凸，但不做验证）

        Returns:
            OracleResult: 扩盒用尽后仍贴边时 boundary_flag 为 True
        """
        lo0, hi0 = box_arrays(self.cfg.box, P.dimension)
        center, half = (lo0 + hi0) / 2.0, (hi0 - lo0) / 2.0
        rng = np.random.default_rng(self.cfg.seed)
        tried: List[OracleResult] = []

        def attempt() -> OracleResult:
            k = len(tried)
            grow = self.cfg.expand_factor ** k
            res = self.solve_in_box(P, center - grow * half, center + grow * half, rng)
            res.expansions = k
            if k:
                self._log.info("%s: box expansion %d, status=%s boundary=%s", P.name or "problem", k, res.status, res.boundary_flag)
            tried.append(res)
            return res

        retrying = Retrying(
            stop=stop_after_attempt(self.cfg.max_expansions + 1),
            retry=retry_if_result(_needs_larger_box),
            retry_error_callback=lambda state: state.outcome.result(),
        )
        return retrying(attempt)

    def solve_in_box(self, P: MinimaxProblem, lo: np.ndarray, hi: np.ndarray, rng: np.random.Generator) -> OracleResult:
        cfg = self.cfg
        n = P.dimension
        objs = [CompiledPolynomial(p) for p in P.objectives]
        cons = [CompiledPolynomial(g) for g in P.constraints]

        def F(x: np.ndarray) -> float:
            return max(o.value(x) for o in objs)

        def G(x: np.ndarray) -> float:
            return max((g.value(x) for g in cons), default=-np.inf)

        # ---------- Kelley 割平面 ----------
        A_ub: List[np.ndarray] = []
        b_ub: List[float] = []

        def add_cuts(x: np.ndarray, z: Optional[float]) -> None:
            for o in objs:
                v = o.value(x)
                if z is None or v > z + 1e-12:
                    gr = o.gradient(x)
                    A_ub.append(np.r_[gr, -1.0])
                    b_ub.append(float(gr @ x - v))
            for g in cons:
                v = g.value(x)
                if z is None or v > 0.0:
                    gr = g.gradient(x)
                    A_ub.append(np.r_[gr, 0.0])
                    b_ub.append(float(gr @ x - v))

        add_cuts((lo + hi) / 2.0, None)
        bounds = [(float(a), float(b)) for a, b in zip(lo, hi)] + [(None, None)]
        cost = np.r_[np.zeros(n), 1.0]
        lb, ub = -np.inf, np.inf
        best: Optional[np.ndarray] = None
        last: Optional[np.ndarray] = None
        it = 0
        for it in range(1, cfg.cp_max_iter + 1):
            lp = linprog(cost, A_ub=np.array(A_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
            if lp.status == 2:
                return self._infeasible(P, lo, hi, it, "cutting-plane master LP is infeasible over the box")
            if lp.status != 0:
                self._log.debug("master LP stopped: %s", lp.message)
                break
            xk, zk = lp.x[:n], float(lp.x[n])
            last = xk
            lb = max(lb, zk)
            if G(xk) <= cfg.cp_tol:
                fk = F(xk)
                if fk < ub:
                    ub, best = fk, xk
            if ub - lb <= cfg.cp_tol:
                break
            add_cuts(xk, zk)

        # ---------- 网格扫描 ----------
        candidates = [c for c in (best, last) if c is not None]
        if n <= 2:
            gx = self._grid_best(objs, cons, lo, hi, rng)
            if gx is not None:
                candidates.append(gx)

        # ---------- SLSQP 精化 ----------
        if cfg.refine:
            for x0 in list(candidates):
                xr = self._refine(objs, cons, x0, lo, hi)
                if xr is not None:
                    candidates.append(xr)

        feasible = [c for c in candidates if G(c) <= cfg.cp_tol]
        if not feasible:
            return self._infeasible(P, lo, hi, it, "no feasible point found")
        x_best = min(feasible, key=F)
        value = F(x_best)
        vals = np.array([o.value(x_best) for o in objs])
        active = [j for j, v in enumerate(vals) if v >= value - cfg.active_tol]
        width = np.maximum(1.0, hi - lo)
        boundary = bool(np.any(np.minimum(x_best - lo, hi - x_best) <= cfg.boundary_tol * width))
        return OracleResult(
            status="solved",
            value=float(value),
            minimizer=np.asarray(x_best, dtype=float),
            active_set=active,
            feasibility_residual=float(max(0.0, G(x_best))),
            boundary_flag=boundary,
            lower_bound=float(min(lb, value)) if np.isfinite(lb) else None,
            box=(lo.tolist(), hi.tolist()),
            iterations=it,
        )

    def _infeasible(self, P: MinimaxProblem, lo, hi, it: int, why: str) -> OracleResult:
        self._log.debug("%s: %s", P.name or "problem", why)
        return OracleResult(
            status="infeasible",
            value=None,
            minimizer=(lo + hi) / 2.0,
            active_set=[],
            feasibility_residual=float("inf"),
            boundary_flag=False,
            box=(lo.tolist(), hi.tolist()),
            iterations=it,
            warnings=[why],
        )

    def _grid_best(self, objs, cons, lo, hi, rng) -> Optional[np.ndarray]:
        k = self.cfg.grid_points
        axes = []
        for a, b in zip(lo, hi):
            t = np.linspace(a, b, k)
            h = (b - a) / (k - 1)
            t[1:-1] += rng.uniform(-0.25, 0.25, size=k - 2) * h
            axes.append(t)
        X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
        Fv = np.max(np.stack([o.values(X) for o in objs]), axis=0)
        if cons:
            Gv = np.max(np.stack([g.values(X) for g in cons]), axis=0)
            Fv = np.where(Gv <= 0.0, Fv, np.inf)
        i = int(np.argmin(Fv))
        return X[i] if np.isfinite(Fv[i]) else None

    def _refine(self, objs, cons, x0: np.ndarray, lo, hi) -> Optional[np.ndarray]:
        n = len(x0)
        z0 = max(o.value(x0) for o in objs)
        constraints = [
            {"type": "ineq", "fun": (lambda v, o=o: v[n] - o.value(v[:n])), "jac": (lambda v, o=o: np.r_[-o.gradient(v[:n]), 1.0])}
            for o in objs
        ] + [
            {"type": "ineq", "fun": (lambda v, g=g: -g.value(v[:n])), "jac": (lambda v, g=g: np.r_[-g.gradient(v[:n]), 0.0])}
            for g in cons
        ]
        bounds = [(float(a), float(b)) for a, b in zip(lo, hi)] + [(None, None)]
        try:
            res = minimize(
                lambda v: v[n],
                np.r_[x0, z0],
                jac=lambda v: np.r_[np.zeros(n), 1.0],
                method="SLSQP",
                bounds=bounds,
                constraints=constraints,
                options={"ftol": 1e-12, "maxiter": 500},
            )
        except (ValueError, ArithmeticError) as e:
            self._log.debug("SLSQP refinement failed: %s", e)
            return None
        x = np.clip(res.x[:n], lo, hi)
        return x if np.all(np.isfinite(x)) else None


def solve_primal(P: MinimaxProblem, cfg: Optional[OracleConfig] = None) -> OracleResult:
    return EpigraphOracle(cfg).solve(P)


@dataclass
class SlaterResult:
    """Slater 点搜索结果"""
    found: bool
    point: Optional[np.ndarray]
    max_constraint: Optional[float]


def find_slater_point(P: MinimaxProblem, cfg: Optional[OracleConfig] = None) -> SlaterResult:
    """最小化 max_i g_i（不扩盒），值 ≤ −slater_margin 即找到严格内点"""
    cfg = cfg or OracleConfig()
    if not P.constraints:
        return SlaterResult(True, np.zeros(P.dimension), None)
    aux = MinimaxProblem(P.dimension, P.constraints, (), name="slater")
    res = EpigraphOracle(replace(cfg, max_expansions=0)).solve(aux)
    if res.status != "solved" or res.value is None:
        return SlaterResult(False, None, None)
    found = res.value <= -cfg.slater_margin
    return SlaterResult(found, res.minimizer if found else None, res.value)


def sample_feasible_points(
    P: MinimaxProblem,
    count: int,
    box: BoxSpec,
    rng: np.random.Generator,
    center: Optional[np.ndarray] = None,
    max_draws: int = 200_000,
) -> np.ndarray:
    """
    可行点拒绝采样

    一半样本取自整个盒子，一半取自 center 周围逐级缩小的邻域（可行集很薄时仍能取到点）。
    """
    n = P.dimension
    lo, hi = box_arrays(box, n)
    cons = [CompiledPolynomial(g, with_gradient=False) for g in P.constraints]

    def feasible(X: np.ndarray) -> np.ndarray:
        if not cons:
            return np.ones(X.shape[0], dtype=bool)
        return np.max(np.stack([g.values(X) for g in cons]), axis=0) <= 0.0

    out: List[np.ndarray] = []
    drawn = 0
    batch = max(64, 4 * count)
    radius = (hi - lo) / 4.0
    while sum(len(o) for o in out) < count and drawn < max_draws:
        X = rng.uniform(lo, hi, size=(batch, n))
        if center is not None:
            local = center + rng.uniform(-1.0, 1.0, size=(batch, n)) * radius
            X = np.vstack([X[: batch // 2], np.clip(local[: batch - batch // 2], lo, hi)])
            radius = np.maximum(radius / 2.0, 1e-4 * (hi - lo))
        drawn += batch
        out.append(X[feasible(X)])
    pts = np.vstack(out) if out else np.zeros((0, n))
    return pts[:count]
