"""
原始-对偶内点法
Primal-dual interior-point conic solver

齐次自对偶嵌入（HSD），锥为 R^f（自由）× R^l_+ × 若干 PSD 块：
- Nesterov–Todd 缩放，Mehrotra 预测-校正
- 稠密 Schur 补 M = A W Aᵀ，Cholesky 分解 + 一次迭代精化，失败时退回 LU / 最小二乘
- 自由变量直接进入嵌入，经第二层 Schur 补 A_fᵀ M⁻¹ A_f 消元
- τ/κ 判定不可行（Farkas 射线）与无界（改进射线）

内部使用最小化形式 min cᵀx + c_fᵀu，c = −C。
"""

from __future__ import annotations
from dataclasses import dataclass, field
import logging
from typing import Callable, List, Optional, Tuple
import warnings

import numpy as np
from scipy import linalg as sla

from ..exceptions import NumericalError
from ..types import SolveStatus
from .presolve import PresolvedProgram, presolve
from .program import ConicProgram

logger = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    """内点法配置"""
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    infeas_tol: float = 1e-9        # τ < infeas_tol·κ 视为不可行/无界
    step_fraction: float = 0.98
    regularization: float = 1e-10   # Schur 补对角静态正则
    breakdown_relax: float = 10.0   # 分解失败时按 relax·tol 接受当前迭代
    eig_floor: float = 1e-12        # 回退步的特征值下限（相对）
    max_variables: int = 200_000
    max_block: int = 400
    presolve: bool = True


@dataclass(frozen=True)
class Residuals:
    """相对残差三元组：原始可行性、对偶可行性、对偶间隙"""
    primal: float
    dual: float
    gap: float


@dataclass
class SolveReport:
    """求解结果"""
    status: SolveStatus
    value: Optional[float] = None          # ⟨C, X⟩（最大化目标）
    dual_value: Optional[float] = None     # 由乘子恢复的上界 bᵀy
    psd: List[np.ndarray] = field(default_factory=list)
    nonneg: np.ndarray = field(default_factory=lambda: np.zeros(0))
    free: np.ndarray = field(default_factory=lambda: np.zeros(0))
    y: np.ndarray = field(default_factory=lambda: np.zeros(0))
    residuals: Residuals = Residuals(float("inf"), float("inf"), float("inf"))
    iterations: int = 0
    ray: Optional[np.ndarray] = None       # primal_infeasible: Farkas y；dual_infeasible: 改进方向（展平）
    history: List[Tuple[float, float, float]] = field(default_factory=list)
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Factor:
    """对称正定矩阵求解器：Cholesky → LU → 最小二乘，带一次迭代精化"""

    def __init__(self, M: np.ndarray):
        self.M = M
        self.kind = "cholesky"
        try:
            self._f = sla.cho_factor(M, lower=True, check_finite=False)
            self._solve: Callable[[np.ndarray], np.ndarray] = lambda r: sla.cho_solve(self._f, r, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            try:
                self.kind = "lu"
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", sla.LinAlgWarning)
                    lu = sla.lu_factor(M, check_finite=False)
                if not np.all(np.isfinite(lu[0])) or np.min(np.abs(np.diag(lu[0])), initial=1.0) == 0.0:
                    raise np.linalg.LinAlgError("singular")
                self._solve = lambda r: sla.lu_solve(lu, r, check_finite=False)
            except (np.linalg.LinAlgError, ValueError):
                self.kind = "lstsq"
                self._solve = lambda r: np.linalg.lstsq(M, r, rcond=None)[0]
            logger.debug("Schur complement of order %d not positive definite; using %s", M.shape[0], self.kind)

    def solve(self, r: np.ndarray) -> np.ndarray:
        x = self._solve(r)
        return x + self._solve(r - self.M @ x)


class _Layout:
    """展平向量中各锥块的位置"""

    def __init__(self, sizes: Tuple[int, ...], nonneg: int):
        self.sizes = sizes
        self.offsets = []
        off = 0
        for s in sizes:
            self.offsets.append(off)
            off += s * s
        self.l_off = off
        self.nonneg = nonneg
        self.N = off + nonneg
        self.nu = sum(sizes) + nonneg

    def mats(self, v: np.ndarray) -> List[np.ndarray]:
        return [v[o:o + s * s].reshape(s, s) for o, s in zip(self.offsets, self.sizes)]

    def lin(self, v: np.ndarray) -> np.ndarray:
        return v[self.l_off:]

    def pack(self, mats: List[np.ndarray], lin: np.ndarray) -> np.ndarray:
        return np.concatenate([m.reshape(-1) for m in mats] + [lin])

    def identity(self) -> np.ndarray:
        return self.pack([np.eye(s) for s in self.sizes], np.ones(self.nonneg))


@dataclass
class _Scaling:
    """NT 缩放：每块 R, R⁻¹, W = RRᵀ, λ；非负块 w, λ"""
    R: List[np.ndarray]
    Rinv: List[np.ndarray]
    W: List[np.ndarray]
    lam: List[np.ndarray]
    w: np.ndarray
    lam_l: np.ndarray


@dataclass
class _Iterate:
    """嵌入变量 (x, s, y, u, τ, κ)"""
    x: np.ndarray
    s: np.ndarray
    y: np.ndarray
    u: np.ndarray
    tau: float
    kappa: float

    def unpack(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float, float]:
        return self.x, self.s, self.y, self.u, self.tau, self.kappa


class ConicSolver:
    """
    稠密原始-对偶内点求解器

    一个实例持有一份工作区，同一时刻只执行一次 solve；不同实例可并发。
    """

    def __init__(self, cfg: Optional[SolverConfig] = None):
        self.cfg = cfg or SolverConfig()
        self._log = logging.getLogger(self.__class__.__name__)

    # ============ 对外接口 ============
    def solve(self, prog: ConicProgram) -> SolveReport:
        """
        求解锥规划

        Args:
            prog: 最大化形式的块结构锥规划

        Returns:
            SolveReport: 状态、目标值、各块变量、残差与迭代次数
        """
        prog.validate()
        prog.check_capacity(self.cfg.max_variables, self.cfg.max_block)
        if self.cfg.presolve:
            pre = presolve(prog)
        else:
            pre = PresolvedProgram(prog, np.arange(prog.num_rows), np.ones(prog.num_rows), prog.num_rows)
        if pre.infeasible:
            return SolveReport(status="primal_infeasible", message=f"presolve: {pre.message}")
        report = self._run(pre.program)
        report.y = pre.recover_multipliers(report.y) if report.y.shape[0] == pre.program.num_rows else report.y
        if report.status == "primal_infeasible" and report.ray is not None:
            report.ray = pre.recover_multipliers(report.ray)
        self._log.info(
            "%s: status=%s value=%s iterations=%d", prog.name or "program", report.status, report.value, report.iterations
        )
        return report

    # ============ 主循环 ============
    def _run(self, prog: ConicProgram) -> SolveReport:
        cfg = self.cfg
        L = _Layout(prog.psd_blocks, prog.nonneg_dim)
        m = prog.num_rows
        A = np.hstack([Ak.reshape(m, -1) for Ak in prog.a_psd] + [prog.a_nonneg]) if L.N else np.zeros((m, 0))
        Au = prog.a_free
        b = prog.b
        c = -L.pack(list(prog.c_psd), prog.c_nonneg)
        cu = -prog.c_free
        f = prog.free_dim

        x = L.identity()
        s = L.identity()
        y = np.zeros(m)
        u = np.zeros(f)
        tau = kappa = 1.0

        def residuals(x, s, y, u, tau, kappa):
            r_p = b * tau - Au @ u - A @ x
            r_du = cu * tau - Au.T @ y
            r_d = c * tau - A.T @ y - s
            r_g = float(c @ x + cu @ u - b @ y + kappa)
            mu = (float(x @ s) + tau * kappa) / (L.nu + 1)
            return r_p, r_du, r_d, r_g, mu

        r_p0, r_du0, r_d0, r_g0, mu0 = residuals(x, s, y, u, tau, kappa)
        n_p0 = max(1.0, np.linalg.norm(r_p0))
        n_d0 = max(1.0, np.hypot(np.linalg.norm(r_d0), np.linalg.norm(r_du0)))
        n_g0 = max(1.0, abs(r_g0))

        history: List[Tuple[float, float, float]] = []
        status: SolveStatus = "indeterminate"
        message = "iteration limit reached"
        prev: Optional[_Iterate] = None
        backed_off = False
        it = 0
        for it in range(cfg.max_iter + 1):
            r_p, r_du, r_d, r_g, mu = residuals(x, s, y, u, tau, kappa)
            pobj = float(c @ x + cu @ u)
            dobj = float(b @ y)
            rho_p = np.linalg.norm(r_p) / n_p0
            rho_d = np.hypot(np.linalg.norm(r_d), np.linalg.norm(r_du)) / n_d0
            rho_A = abs(pobj - dobj) / (tau + abs(dobj))
            rho_g = abs(r_g) / n_g0
            rho_mu = mu / mu0
            history.append((float(rho_p), float(rho_d), float(rho_A)))
            if not all(np.isfinite(v) for v in (rho_p, rho_d, rho_A, rho_g, tau, kappa)):
                message = "non-finite iterate"
                break
            self._log.debug(
                "it=%d rho_p=%.2e rho_d=%.2e rho_A=%.2e tau=%.2e kappa=%.2e", it, rho_p, rho_d, rho_A, tau, kappa
            )
            if rho_p <= cfg.feas_tol and rho_d <= cfg.feas_tol and rho_A <= cfg.gap_tol:
                status, message = "optimal", "converged"
                break
            inf1 = rho_p <= cfg.feas_tol and rho_d <= cfg.feas_tol and rho_g <= cfg.feas_tol and tau < cfg.infeas_tol * max(1.0, kappa)
            inf2 = rho_mu <= cfg.feas_tol and tau < cfg.infeas_tol * min(1.0, kappa)
            if inf1 or inf2:
                if dobj > 0:
                    status, message = "primal_infeasible", "Farkas certificate found"
                elif pobj < 0:
                    status, message = "dual_infeasible", "improving ray found"
                else:
                    message = "tau vanished without a strict certificate"
                break
            if it == cfg.max_iter:
                break
            try:
                step = self._iteration(L, A, Au, b, c, cu, x, s, y, u, tau, kappa, r_p, r_du, r_d, r_g, mu)
            except (np.linalg.LinAlgError, NumericalError, FloatingPointError) as e:
                relax = cfg.breakdown_relax
                if rho_p <= relax * cfg.feas_tol and rho_d <= relax * cfg.feas_tol and rho_A <= relax * cfg.gap_tol:
                    status, message = "optimal", f"converged within {relax:g}x tolerance before breakdown: {e}"
                    self._log.warning(message)
                    break
                if prev is None or backed_off:
                    message = f"linear algebra breakdown: {e}"
                    self._log.warning(message)
                    break
                backed_off = True
                self._log.warning("breakdown at iteration %d (%s); retrying with half the last step", it, e)
                x, s, y, u, tau, kappa = self._back_off(L, prev, _Iterate(x, s, y, u, tau, kappa)).unpack()
                continue
            prev, backed_off = _Iterate(x, s, y, u, tau, kappa), False
            x, s, y, u, tau, kappa = step

        report = SolveReport(status=status, iterations=it, history=history, message=message)
        report.residuals = Residuals(*history[-1]) if history else report.residuals
        if status == "optimal":
            xs, us = x / tau, u / tau
            report.psd = [0.5 * (X + X.T) for X in L.mats(xs)]
            report.nonneg = L.lin(xs).copy()
            report.free = us
            report.y = y / tau
            report.value = -float(c @ xs + cu @ us)
            report.dual_value = -float(b @ y) / tau
        elif status == "primal_infeasible":
            report.ray = y / max(np.linalg.norm(y), 1e-300)
            report.y = report.ray.copy()
        elif status == "dual_infeasible":
            ray = np.concatenate([x, u])
            report.ray = ray / max(np.linalg.norm(ray), 1e-300)
        return report

    def _back_off(self, L: _Layout, prev: _Iterate, cur: _Iterate) -> _Iterate:
        """
        回退半步：取 prev 与 cur 的中点

        PSD 块重新对称化并把特征值抬到 eig_floor·max(1, λ_max) 以上；非负块与 τ, κ 同样取下限。
        """
        floor = self.cfg.eig_floor
        x = prev.x + 0.5 * (cur.x - prev.x)
        s = prev.s + 0.5 * (cur.s - prev.s)
        for v in (x, s):
            for o, sz in zip(L.offsets, L.sizes):
                B = v[o:o + sz * sz].reshape(sz, sz)
                w, V = np.linalg.eigh(0.5 * (B + B.T))
                w = np.maximum(w, floor * max(1.0, float(w[-1])))
                v[o:o + sz * sz] = ((V * w) @ V.T).reshape(-1)
            lin = L.lin(v)
            lin[:] = np.maximum(lin, floor * max(1.0, float(lin.max(initial=0.0))))
        tau = max(prev.tau + 0.5 * (cur.tau - prev.tau), floor)
        kappa = max(prev.kappa + 0.5 * (cur.kappa - prev.kappa), floor)
        return _Iterate(x, s, prev.y + 0.5 * (cur.y - prev.y), prev.u + 0.5 * (cur.u - prev.u), tau, kappa)

    # ============ 单步 ============
    def _nt_scaling(self, L: _Layout, x: np.ndarray, s: np.ndarray) -> _Scaling:
        R, Rinv, W, lams = [], [], [], []
        for X, S in zip(L.mats(x), L.mats(s)):
            L1 = np.linalg.cholesky(0.5 * (X + X.T))
            L2 = np.linalg.cholesky(0.5 * (S + S.T))
            _, lam, Vt = np.linalg.svd(L2.T @ L1)
            if lam.min(initial=1.0) <= 0:
                raise NumericalError("degenerate NT scaling")
            Rk = L1 @ Vt.T / np.sqrt(lam)[None, :]
            L1inv = sla.solve_triangular(L1, np.eye(L1.shape[0]), lower=True)
            Rinvk = (np.sqrt(lam)[:, None] * Vt) @ L1inv
            R.append(Rk)
            Rinv.append(Rinvk)
            W.append(Rk @ Rk.T)
            lams.append(lam)
        xl, sl = L.lin(x), L.lin(s)
        return _Scaling(R, Rinv, W, lams, np.sqrt(xl / sl), np.sqrt(xl * sl))

    @staticmethod
    def _apply_w(L: _Layout, sc: _Scaling, v: np.ndarray) -> np.ndarray:
        """W(v)：PSD 块 W V W，非负块 w² v"""
        return L.pack([Wk @ Vk @ Wk for Wk, Vk in zip(sc.W, L.mats(v))], sc.w ** 2 * L.lin(v))

    def _schur(self, L: _Layout, sc: _Scaling, A: np.ndarray) -> np.ndarray:
        m = A.shape[0]
        M = np.zeros((m, m))
        for o, s, Wk in zip(L.offsets, L.sizes, sc.W):
            Ab = A[:, o:o + s * s].reshape(m, s, s)
            T = np.matmul(np.matmul(Wk, Ab), Wk)
            M += Ab.reshape(m, -1) @ T.reshape(m, -1).T
        Al = A[:, L.l_off:]
        M += (Al * sc.w ** 2) @ Al.T
        M = 0.5 * (M + M.T)
        M[np.diag_indices_from(M)] += self.cfg.regularization
        return M

    def _iteration(self, L, A, Au, b, c, cu, x, s, y, u, tau, kappa, r_p, r_du, r_d, r_g, mu):
        cfg = self.cfg
        sc = self._nt_scaling(L, x, s)
        Mf = _Factor(self._schur(L, sc, A))
        f = Au.shape[1]
        Su = None
        MinvAu = None
        if f:
            MinvAu = Mf.solve(Au)
            Su = _Factor(0.5 * (Au.T @ MinvAu + (Au.T @ MinvAu).T))

        def kkt(h1: np.ndarray, h2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            t = Mf.solve(h1)
            if not f:
                return t, np.zeros(0)
            du = Su.solve(Au.T @ t - h2)
            return t - MinvAu @ du, du

        Wc = self._apply_w(L, sc, c)
        AWc = A @ Wc
        cWc = float(c @ Wc)
        p_y, p_u = kkt(AWc + b, cu)
        coef = float((AWc - b) @ p_y + cu @ p_u) - cWc - kappa / tau

        def direction(rhs_mats, rhs_lin, rhs_tk, eta):
            # dx + W(ds) = g，g 由缩放空间右端项还原
            G = []
            for Rk, lam, rk in zip(sc.R, sc.lam, rhs_mats):
                Gk = 2.0 * rk / (lam[:, None] + lam[None, :])
                G.append(Rk @ Gk @ Rk.T)
            g = L.pack(G, sc.w * rhs_lin / sc.lam_l)
            Wrd = self._apply_w(L, sc, r_d)
            h1 = eta * r_p - A @ (g - eta * Wrd)
            h2 = eta * r_du
            v_y, v_u = kkt(h1, h2)
            const = float(c @ g) - eta * float(c @ Wrd) + float((AWc - b) @ v_y) + float(cu @ v_u) + rhs_tk / tau
            dtau = (-eta * r_g - const) / coef
            dy = v_y + p_y * dtau
            du = v_u + p_u * dtau
            ds = eta * r_d - A.T @ dy + c * dtau
            dx = g - self._apply_w(L, sc, ds)
            dkappa = (rhs_tk - kappa * dtau) / tau
            return dx, ds, dy, du, dtau, dkappa

        def scaled(dx, ds):
            sx = [Ri @ D @ Ri.T for Ri, D in zip(sc.Rinv, L.mats(dx))]
            ss = [Rk.T @ D @ Rk for Rk, D in zip(sc.R, L.mats(ds))]
            return sx, ss, L.lin(dx) / sc.w, L.lin(ds) * sc.w

        def max_step(d):
            dx, ds, _, _, dtau, dkappa = d
            sx, ss, lx, ls = scaled(dx, ds)
            alpha = np.inf
            for lam, Dx, Ds in zip(sc.lam, sx, ss):
                inv = 1.0 / np.sqrt(lam)
                for D in (Dx, Ds):
                    e = np.linalg.eigvalsh(inv[:, None] * (0.5 * (D + D.T)) * inv[None, :])[0]
                    if e < 0:
                        alpha = min(alpha, -1.0 / e)
            for val, dv in ((L.lin(x), L.lin(dx)), (L.lin(s), L.lin(ds)), (np.array([tau]), np.array([dtau])), (np.array([kappa]), np.array([dkappa]))):
                neg = dv < 0
                if np.any(neg):
                    alpha = min(alpha, float(np.min(-val[neg] / dv[neg])))
            return alpha

        # 预测步
        rhs_aff = [-np.diag(lam ** 2) for lam in sc.lam]
        d_aff = direction(rhs_aff, -sc.lam_l ** 2, -tau * kappa, 1.0)
        alpha_aff = min(1.0, max_step(d_aff))
        gamma = (1.0 - alpha_aff) ** 2 * min(0.1, 1.0 - alpha_aff)

        # 校正步
        sx, ss, lx, ls = scaled(d_aff[0], d_aff[1])
        rhs_cor = []
        for lam, Dx, Ds in zip(sc.lam, sx, ss):
            cross = 0.5 * (Dx @ Ds + Ds @ Dx)
            rhs_cor.append(gamma * mu * np.eye(lam.shape[0]) - np.diag(lam ** 2) - cross)
        rhs_lin = gamma * mu - sc.lam_l ** 2 - lx * ls
        rhs_tk = gamma * mu - tau * kappa - d_aff[4] * d_aff[5]
        d = direction(rhs_cor, rhs_lin, rhs_tk, 1.0 - gamma)
        alpha = min(1.0, cfg.step_fraction * max_step(d))
        dx, ds, dy, du, dtau, dkappa = d
        x = x + alpha * dx
        s = s + alpha * ds
        for o, sz in zip(L.offsets, L.sizes):
            for v in (x, s):
                B = v[o:o + sz * sz].reshape(sz, sz)
                v[o:o + sz * sz] = (0.5 * (B + B.T)).reshape(-1)
        return x, s, y + alpha * dy, u + alpha * du, tau + alpha * dtau, kappa + alpha * dkappa


def solve(prog: ConicProgram, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """便捷入口：每次调用使用独立的求解器实例"""
    return ConicSolver(cfg).solve(prog)
