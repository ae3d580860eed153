"""
对偶验证流水线
Duality verification pipeline

把问题文件分派到各个命令，并产出 RunReport：
- check: SOS / SOS-convex 判定（目标、约束、非仿射分母的 −q）
- dualize: 构造对偶规划，可导出稀疏文本
- solve: 内点法求解对偶并提取证书；分式问题附带预言机结果
- oracle: 原问题预言机
- gap: 对偶值 vs 预言机值，Slater 检查、弱对偶抽样、法锥交叉检验
- robustify: 鲁棒问题 → 等价极小极大问题文件
- selftest / batch: 内置实例自检与目录批处理

退出码：0 求解/验证成功，1 不可行/被否定，2 原问题无界，3 数值不确定，4 输入错误
"""

from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, replace
import json
import logging
import math
from pathlib import Path
from time import perf_counter
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from . import __version__
from .config import Settings
from .dualgen import (
    DualCertificate,
    MinimaxProblem,
    RationalMinimaxProblem,
    RobustProblem,
    build_dual,
    build_fractional_dual,
    build_linear_fractional_lp,
    build_parametric_dual,
    build_quadratic_dual,
    build_quadratic_fractional_dual,
    extract_certificate,
    linear_fractional_data,
    normal_cone_certificate,
    robust_counterpart,
)
from .exceptions import CapacityError, CertificationError, InputError, PreconditionError, SosDualError
from .metrics import gap_tolerance, gap_verdict, summary_table, weak_duality_violations
from .oracle import OracleResult, find_slater_point, sample_feasible_points, solve_fractional_primal, solve_primal
from .polycore import Polynomial
from .problemfile import counterpart_file, digest, load, serialize, to_problem
from .schemas import ProblemFile, RunReport
from .soscert import SosVerdict, is_sos, is_sos_convex
from .solver import ConicProgram, ConicSolver, SolveReport, dump_program
from .types import DualForm

PROBLEMS_DIR = Path(__file__).resolve().parents[1] / "problems"

COMMANDS = ("check", "dualize", "solve", "oracle", "gap", "robustify")

EXIT_OK, EXIT_REFUTED, EXIT_UNBOUNDED, EXIT_NUMERICAL, EXIT_INPUT = 0, 1, 2, 3, 4

# 求解器状态 → (报告状态, 退出码)
_SOLVE_STATUS = {
    "optimal": ("optimal", EXIT_OK),
    "primal_infeasible": ("primal unbounded or dual infeasible", EXIT_UNBOUNDED),
    "dual_infeasible": ("infeasible", EXIT_REFUTED),
    "indeterminate": ("indeterminate", EXIT_NUMERICAL),
}

_VERDICT_EXIT = {
    "zero-gap confirmed": EXIT_OK,
    "zero-gap (advisory)": EXIT_OK,
    "gap detected": EXIT_REFUTED,
    "gap detected (advisory)": EXIT_NUMERICAL,
    "infeasible": EXIT_REFUTED,
    "primal unbounded or dual infeasible": EXIT_UNBOUNDED,
    "indeterminate": EXIT_NUMERICAL,
}

# (文件, 命令, 参数, 检查字段, 期望值, 容差)
SELFTEST_CASES: List[Tuple[str, str, Dict[str, Any], str, float, float]] = [
    ("quartic_pair.json", "gap", {}, "dualValue", 0.0, 1e-6),
    ("frac_unattained.json", "solve", {"fractional": True}, "value", 0.0, 1e-6),
    ("frac_quadratic.json", "solve", {}, "value", 2.0 * math.sqrt(5.0) - 4.0, 1e-5),
    ("linfrac.json", "solve", {"linear_fractional": True}, "value", 0.5, 1e-6),
    ("robust_two_scenario.yml", "gap", {}, "dualValue", 2.0, 1e-4),
]


def exit_code_for(exc: SosDualError) -> int:
    """异常 → 退出码"""
    if isinstance(exc, (InputError, CapacityError, PreconditionError)):
        return EXIT_INPUT
    return EXIT_NUMERICAL


@dataclass
class RunFlags:
    """命令参数"""
    sos: bool = False
    quadratic: bool = False
    fractional: bool = False
    linear_fractional: bool = False
    robust: bool = False
    out: Optional[str] = None
    dump_sdp: Optional[str] = None
    emit_cert: Optional[str] = None


@dataclass
class DualSetup:
    """选定的对偶形式"""
    problem: MinimaxProblem
    program: ConicProgram
    form: DualForm


class DualityPipeline:
    """按命令编排 soscert / dualgen / solver / oracle 的流水线"""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Args:
            settings: 全局设置（含 CLI 覆盖）
        """
        self.settings = settings or Settings()
        self.logger = logging.getLogger(__name__)
        self._timings: Dict[str, float] = {}

    # ------------------------------------------------------------------

    @contextmanager
    def _timed(self, stage: str) -> Iterator[None]:
        t0 = perf_counter()
        try:
            yield
        finally:
            self._timings[stage] = self._timings.get(stage, 0.0) + perf_counter() - t0

    def _report(self, command: str, pf: Optional[ProblemFile], **fields: Any) -> RunReport:
        return RunReport(
            command=command,
            input_digest=digest(pf) if pf is not None else None,
            tool_version=__version__,
            timings=dict(self._timings),
            **fields,
        )

    def error_report(self, command: str, pf: Optional[ProblemFile], exc: SosDualError) -> RunReport:
        return self._report(command, pf, status="error", exit_code=exit_code_for(exc), message=str(exc))

    def run(self, command: str, pf: Optional[ProblemFile], flags: Optional[RunFlags] = None) -> RunReport:
        """
        执行单个命令

        Args:
            command: check / dualize / solve / oracle / gap / robustify / selftest
            pf: 已解析的问题文件（selftest 为 None）
            flags: 命令参数

        Returns:
            RunReport: 下游异常被转换为 status=error 与相应退出码
        """
        flags = flags or RunFlags()
        self._timings = {}
        handlers = {
            "check": self.check,
            "dualize": self.dualize,
            "solve": self.solve,
            "oracle": self.oracle,
            "gap": self.gap,
            "robustify": self.robustify,
        }
        try:
            if command == "selftest":
                return self.selftest()
            if command not in handlers:
                raise InputError(f"unknown command {command!r}")
            if pf is None:
                raise InputError(f"command {command!r} needs a problem file")
            return handlers[command](pf, flags)
        except SosDualError as e:
            self.logger.warning(f"{command} failed ({type(e).__name__}): {e}")
            return self.error_report(command, pf, e)

    # ------------------------------------------------------------------

    def _problem(self, pf: ProblemFile, flags: RunFlags) -> MinimaxProblem:
        P = to_problem(pf)
        if flags.robust and not isinstance(P, RobustProblem):
            raise InputError(f"--robust needs kind 'robust', got {pf.kind!r}", "kind")
        if isinstance(P, RobustProblem):
            return robust_counterpart(P)
        if (flags.fractional or flags.linear_fractional) and not isinstance(P, RationalMinimaxProblem):
            raise InputError(f"fractional duals need a denominator (kind {pf.kind!r})", "denominator")
        return P

    def _oracle_settings(self, pf: ProblemFile):
        cfg = self.settings.oracle
        return replace(cfg, box=pf.box) if pf.box is not None else cfg

    def _setup(self, pf: ProblemFile, flags: RunFlags) -> DualSetup:
        """按问题种类与参数选择对偶形式"""
        P = self._problem(pf, flags)
        limit = self.settings.cert.basis_limit
        with self._timed("dualize"):
            if isinstance(P, RationalMinimaxProblem):
                if flags.linear_fractional or (pf.kind == "linear-fractional" and not flags.quadratic and not flags.fractional):
                    prog, form = build_linear_fractional_lp(linear_fractional_data(P)), "lp"
                elif flags.quadratic:
                    prog, form = build_quadratic_fractional_dual(P), "lmi"
                else:
                    prog, form = build_fractional_dual(P, limit, self.settings.cert, self.settings.solver), "sos"
            elif flags.quadratic:
                prog, form = build_quadratic_dual(P), "lmi"
            else:
                prog, form = build_dual(P, limit), "sos"
        self.logger.info(
            f"built {form} dual '{prog.name}': psd {list(prog.psd_blocks)}, nonneg {prog.nonneg_dim}, "
            f"free {prog.free_dim}, rows {prog.num_rows}"
        )
        return DualSetup(P, prog, form)  # type: ignore[arg-type]

    @staticmethod
    def _program_summary(setup: DualSetup) -> Dict[str, Any]:
        prog = setup.program
        return {
            "name": prog.name,
            "form": setup.form,
            "psdBlocks": list(prog.psd_blocks),
            "nonnegDim": prog.nonneg_dim,
            "freeDim": prog.free_dim,
            "rows": prog.num_rows,
        }

    def _dump(self, setup: DualSetup, path: Optional[str]) -> Optional[str]:
        if not path:
            return None
        out = dump_program(setup.program, path)
        self.logger.info(f"program written to {out}")
        return str(out)

    @staticmethod
    def _write_json(path: str, payload: Any) -> None:
        Path(path).write_text(json.dumps(payload, indent=2, allow_nan=False), encoding="utf-8")

    def _solve_dual(self, setup: DualSetup) -> Tuple[SolveReport, Optional[DualCertificate], Optional[str]]:
        """求解对偶并在 optimal 时提取证书；证书失败返回原因而不抛出"""
        with self._timed("solve"):
            rep = ConicSolver(self.settings.solver).solve(setup.program)
        self.logger.info(f"solver status {rep.status} after {rep.iterations} iterations, value {rep.value}")
        if rep.status != "optimal":
            return rep, None, rep.message or None
        try:
            with self._timed("certify"):
                cert = extract_certificate(setup.problem, rep, setup.form, self.settings.cert)
        except CertificationError as e:
            self.logger.warning(f"certificate rejected: {e}")
            return rep, None, str(e)
        return rep, cert, None

    def _primal(self, P: MinimaxProblem, pf: ProblemFile) -> OracleResult:
        cfg = self._oracle_settings(pf)
        with self._timed("oracle"):
            if isinstance(P, RationalMinimaxProblem):
                return solve_fractional_primal(P, cfg)
            return solve_primal(P, cfg)

    # ------------------------------------------------------------------

    def _roles(self, pf: ProblemFile, P: MinimaxProblem, flags: RunFlags) -> List[Tuple[str, Polynomial]]:
        roles = [(f"objectives.{j}", p) for j, p in enumerate(P.objectives)]
        if flags.sos:
            return roles
        roles += [(f"constraints.{i}", g) for i, g in enumerate(P.constraints)]
        if isinstance(P, RationalMinimaxProblem) and P.denominator.degree > 1:
            roles.append(("-denominator", -P.denominator))
        return roles

    def check(self, pf: ProblemFile, flags: RunFlags) -> RunReport:
        """对问题中的多项式逐个判定 SOS（--sos）或 SOS-convex（默认）"""
        P = self._problem(pf, flags)
        test = is_sos if flags.sos else is_sos_convex
        rows: List[Dict[str, Any]] = []
        verdicts: List[SosVerdict] = []
        with self._timed("check"):
            for role, f in self._roles(pf, P, flags):
                v = test(f, self.settings.cert, self.settings.solver)
                verdicts.append(v)
                row: Dict[str, Any] = {"role": role, "kind": v.kind, "status": v.status}
                if v.reason:
                    row["reason"] = v.reason
                if v.certificate is not None:
                    row["certificate"] = v.certificate.to_dict()
                rows.append(row)
        statuses = {v.status for v in verdicts}
        if "refuted" in statuses:
            status, code = "refuted", EXIT_REFUTED
        elif "indeterminate" in statuses:
            status, code = "indeterminate", EXIT_NUMERICAL
        else:
            status, code = "certified", EXIT_OK
        if flags.emit_cert:
            self._write_json(flags.emit_cert, {"checks": [r for r in rows if "certificate" in r]})
        residual = max((v.certificate.residual for v in verdicts if v.certificate is not None), default=None)
        return self._report("check", pf, status=status, exit_code=code, checks=rows, residual=residual, output=flags.emit_cert)

    def dualize(self, pf: ProblemFile, flags: RunFlags) -> RunReport:
        setup = self._setup(pf, flags)
        out = self._dump(setup, flags.out or flags.dump_sdp)
        return self._report("dualize", pf, status="built", exit_code=EXIT_OK, program=self._program_summary(setup), output=out)

    def solve(self, pf: ProblemFile, flags: RunFlags) -> RunReport:
        """求解对偶；分式问题在对偶最优时附带预言机结果（用于判断下确界是否达到）"""
        setup = self._setup(pf, flags)
        out = self._dump(setup, flags.dump_sdp)
        rep, cert, reason = self._solve_dual(setup)
        status, code = _SOLVE_STATUS[rep.status]
        if rep.status == "optimal" and cert is None:
            status, code = "indeterminate", EXIT_NUMERICAL
        fields: Dict[str, Any] = dict(
            status=status,
            exit_code=code,
            value=rep.value if rep.status == "optimal" else None,
            dual_value=rep.dual_value if rep.status == "optimal" else None,
            program=self._program_summary(setup),
            message=reason,
            output=out,
        )
        if cert is not None:
            fields.update(attainment=cert.attainment, certificate=cert.to_dict(), residual=cert.identity_residual)
            if flags.emit_cert:
                self._write_json(flags.emit_cert, cert.to_dict())
        else:
            fields["residual"] = max(rep.residuals.primal, rep.residuals.dual)
        warnings: List[str] = []
        if isinstance(setup.problem, RationalMinimaxProblem) and rep.status == "optimal":
            res = self._primal(setup.problem, pf)
            fields.update(oracle=res.to_dict(), primal_value=res.value)
            warnings += res.warnings
        return self._report("solve", pf, warnings=warnings, **fields)

    def oracle(self, pf: ProblemFile, flags: RunFlags) -> RunReport:
        P = self._problem(pf, flags)
        res = self._primal(P, pf)
        code = EXIT_OK if res.solved else EXIT_REFUTED
        return self._report(
            "oracle", pf, status=res.status, exit_code=code, value=res.value, primal_value=res.value,
            oracle=res.to_dict(), warnings=list(res.warnings),
        )

    def _weak_duality(self, P: MinimaxProblem, cert: DualCertificate, res: OracleResult, pf: ProblemFile) -> Dict[str, Any]:
        """在可行样本上检查 μ·q̂(x) ≤ max_j p_j(x) + tol"""
        cfg = self._oracle_settings(pf)
        rng = np.random.default_rng(cfg.seed)
        box = np.stack(res.box, axis=1) if res.box[0] else cfg.box
        pts = sample_feasible_points(P, 100, box, rng, center=res.minimizer)
        if res.solved:
            pts = np.vstack([res.minimizer[None, :], pts])
        values = np.array([P.max_objective(x) for x in pts])
        bounds = values + np.array([cert.bound_violation(P, x) for x in pts])
        bad = weak_duality_violations(bounds, values, self.settings.gap.weak_duality_tol)
        return {"name": "weak-duality", "samples": int(len(pts)), "violations": len(bad)}

    def _normal_cone(self, P: MinimaxProblem, res: OracleResult) -> Dict[str, Any]:
        """法锥路径：已知极小点处的 KKT 乘子是否给出对偶可行点"""
        try:
            kkt, verdict = normal_cone_certificate(P, res.minimizer, self.settings.cert, self.settings.solver)
        except SosDualError as e:
            return {"name": "normal-cone", "status": "indeterminate", "reason": str(e)}
        return {
            "name": "normal-cone",
            "status": verdict.status,
            "delta": kkt.delta.tolist(),
            "lambda": kkt.lambda_.tolist(),
            "stationarity": kkt.stationarity,
        }

    def _parametric_bracket(self, P: RationalMinimaxProblem, value: float) -> Dict[str, Any]:
        """
        对偶侧交叉检验：在 μ̄ = v ∓ ε 处求参数化对偶

        φ(μ̄) 关于 μ̄ 递减且在分式下确界处变号：下方 θ ≥ −tol，上方 θ ≤ tol 或对偶不可行。
        """
        eps = gap_tolerance(value, self.settings.gap)
        tol = self.settings.gap.weak_duality_tol
        solver = ConicSolver(self.settings.solver)
        levels = [value - eps, value + eps]
        reps = [solver.solve(build_parametric_dual(P, mu_bar, self.settings.cert.basis_limit)) for mu_bar in levels]
        thetas = [rep.value if rep.status == "optimal" else None for rep in reps]
        below, above = reps
        if below.status == "indeterminate" or above.status == "indeterminate":
            status = "indeterminate"
        elif (
            below.status == "optimal"
            and thetas[0] >= -tol
            and (above.status == "primal_infeasible" or (above.status == "optimal" and thetas[1] <= tol))
        ):
            status = "consistent"
        else:
            status = "inconsistent"
        return {
            "name": "parametric-bracket",
            "status": status,
            "levels": levels,
            "theta": thetas,
            "solverStatus": [rep.status for rep in reps],
        }

    def gap(self, pf: ProblemFile, flags: RunFlags) -> RunReport:
        """对偶值 vs 预言机值"""
        setup = self._setup(pf, flags)
        P = setup.problem
        out = self._dump(setup, flags.dump_sdp)
        rep, cert, reason = self._solve_dual(setup)
        res = self._primal(P, pf)
        with self._timed("slater"):
            slater = find_slater_point(P, self._oracle_settings(pf))
        dual_status = rep.status if (rep.status != "optimal" or cert is not None) else "indeterminate"
        dual_value = rep.value if rep.status == "optimal" else None
        verdict, gap = gap_verdict(
            dual_status, dual_value, res.value, res.solved, slater.found, res.boundary_flag, self.settings.gap
        )
        self.logger.info(f"gap verdict '{verdict}' (dual {dual_value}, primal {res.value})")
        checks: List[Dict[str, Any]] = []
        warnings = list(res.warnings)
        if not slater.found:
            warnings.append("no Slater point found; gap test is advisory")
        if res.boundary_flag:
            warnings.append("oracle minimizer on the search-box boundary; infimum may not be attained")
        if cert is not None and res.solved:
            with self._timed("weak_duality"):
                wd = self._weak_duality(P, cert, res, pf)
            checks.append(wd)
            if wd["violations"]:
                warnings.append(f"weak duality violated at {wd['violations']} sampled points")
        if res.solved and not isinstance(P, RationalMinimaxProblem) and setup.form != "lp":
            with self._timed("normal_cone"):
                checks.append(self._normal_cone(P, res))
        if isinstance(P, RationalMinimaxProblem) and dual_value is not None and self.settings.gap.parametric_check:
            with self._timed("parametric"):
                bracket = self._parametric_bracket(P, dual_value)
            checks.append(bracket)
            if bracket["status"] == "inconsistent":
                warnings.append("parametric dual does not change sign around the dual value")
        if flags.emit_cert and cert is not None:
            self._write_json(flags.emit_cert, cert.to_dict())
        fields: Dict[str, Any] = dict(
            status=verdict,
            exit_code=_VERDICT_EXIT[verdict],
            value=dual_value,
            dual_value=dual_value,
            primal_value=res.value,
            gap=gap,
            slater=slater.found,
            verdict=verdict,
            oracle=res.to_dict(),
            checks=checks,
            program=self._program_summary(setup),
            message=reason,
            output=out,
            warnings=warnings,
        )
        if cert is not None:
            fields.update(attainment=cert.attainment, certificate=cert.to_dict(), residual=cert.identity_residual)
        return self._report("gap", pf, **fields)

    def robustify(self, pf: ProblemFile, flags: RunFlags) -> RunReport:
        """写出鲁棒对应的极小极大问题文件"""
        with self._timed("robustify"):
            counterpart = counterpart_file(pf)
        text = serialize(counterpart)
        if flags.out:
            Path(flags.out).write_text(text + "\n", encoding="utf-8")
        return self._report(
            "robustify", pf, status="built", exit_code=EXIT_OK, output=flags.out,
            problem=json.loads(text),
        )

    # ------------------------------------------------------------------

    def selftest(self, problems_dir: Optional[Union[str, Path]] = None) -> RunReport:
        """运行 problems/ 中的内置实例并与已知值比较"""
        base = Path(problems_dir) if problems_dir else PROBLEMS_DIR
        rows: List[Dict[str, Any]] = []
        for name, command, opts, key, expected, tol in SELFTEST_CASES:
            rep = DualityPipeline(self.settings).run(command, load(base / name), RunFlags(**opts))
            got = rep.to_json_dict().get(key)
            ok = got is not None and abs(got - expected) <= tol
            rows.append({"file": name, "command": command, "expected": expected, "value": got, "ok": ok, "status": rep.status})
            self.logger.info(f"selftest {name}: {'ok' if ok else 'FAILED'} ({key}={got}, expected {expected})")
        passed = all(r["ok"] for r in rows)
        return self._report(
            "selftest", None, status="passed" if passed else "failed",
            exit_code=EXIT_OK if passed else EXIT_REFUTED, checks=rows,
        )


def _problem_files(directory: Path) -> List[Path]:
    return sorted(p for p in directory.iterdir() if p.suffix in (".json", ".yml", ".yaml") and p.is_file())


def run_file(settings: Settings, command: str, path: Union[str, Path], flags: Optional[RunFlags] = None) -> RunReport:
    """读取文件并运行一个命令；读取失败同样产出报告"""
    pipeline = DualityPipeline(settings)
    try:
        pf = load(path)
    except InputError as e:
        return pipeline.error_report(command, None, e)
    return pipeline.run(command, pf, flags)


def run_batch(
    settings: Settings, command: str, directory: Union[str, Path], flags: Optional[RunFlags] = None, jobs: int = 1
) -> Tuple[RunReport, List[RunReport]]:
    """
    目录批处理：每个文件一条独立流水线

    Returns:
        (汇总报告, 各文件报告)
    """
    d = Path(directory)
    if not d.is_dir():
        raise InputError(f"not a directory: {d}")
    files = _problem_files(d)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        reports = list(pool.map(lambda p: run_file(settings, command, p, flags), files))
    rows = [
        {"file": p.name, "status": r.status, "exitCode": r.exit_code, "value": r.value, "verdict": r.verdict}
        for p, r in zip(files, reports)
    ]
    table = summary_table(rows, ["file", "status", "exitCode", "value", "verdict"])
    logging.getLogger(__name__).info("batch summary\n%s", table.to_string(index=False))
    code = max((r.exit_code for r in reports), default=EXIT_OK)
    summary = RunReport(
        command=f"batch:{command}",
        status="completed",
        exit_code=code,
        tool_version=__version__,
        checks=rows,
    )
    return summary, reports
