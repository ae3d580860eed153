"""
锥求解器测试
Conic solver tests

- 小型 LP / SDP 的最优值
- 预处理：矛盾行、重复行
- 齐次自对偶嵌入的不可行 / 无界判定
- 容量检查与文本转储
- 随机严格可行 SDP、确定性、分解失败后的回退
"""

import numpy as np
import pytest
from scipy.linalg import LinAlgWarning

from src.exceptions import CapacityError
from src.solver import ConicSolver, ProgramBuilder, SolverConfig, dump_program, load_program, presolve, solve
from src.solver.ipm import _Factor


def test_lp_optimum():
    # max x0 s.t. x0 + x1 = 1, x ≥ 0
    b = ProgramBuilder([], 2, 0, name="lp")
    b.add_row(1.0, nonneg={0: 1.0, 1: 1.0})
    b.set_objective(nonneg={0: 1.0})
    rep = solve(b.build())
    assert rep.status == "optimal"
    assert rep.value == pytest.approx(1.0, abs=1e-6)
    assert rep.dual_value == pytest.approx(1.0, abs=1e-6)
    assert rep.nonneg[0] == pytest.approx(1.0, abs=1e-6)


def test_sdp_minimum_trace():
    # max −tr X s.t. 2 X01 = 2, X ⪰ 0 → X = [[1,1],[1,1]]
    b = ProgramBuilder([2], name="trace")
    b.add_row(2.0, psd={0: {(0, 1): 1.0}})
    b.set_objective(psd={0: -np.eye(2)})
    prog = b.build()
    rep = solve(prog)
    assert rep.status == "optimal"
    assert rep.value == pytest.approx(-2.0, abs=1e-6)
    np.testing.assert_allclose(rep.psd[0], np.ones((2, 2)), atol=1e-5)
    assert rep.residuals.primal <= 1e-8
    np.testing.assert_allclose(prog.apply(rep.psd, rep.nonneg, rep.free), prog.b, atol=1e-6)
    assert prog.objective(rep.psd, rep.nonneg, rep.free) == pytest.approx(rep.value, abs=1e-6)


def test_free_variable_bound():
    # max μ s.t. X00 + μ = 3, X ⪰ 0 (1×1) → μ = 3
    b = ProgramBuilder([1], 0, 1)
    b.add_row(3.0, psd={0: {(0, 0): 1.0}}, free={0: 1.0})
    b.set_objective(free={0: 1.0})
    rep = solve(b.build())
    assert rep.status == "optimal"
    assert rep.free[0] == pytest.approx(3.0, abs=1e-6)


def test_contradictory_rows_are_primal_infeasible():
    # q = 1 且 q = −1
    b = ProgramBuilder([1])
    b.add_row(1.0, psd={0: {(0, 0): 1.0}})
    b.add_row(-1.0, psd={0: {(0, 0): 1.0}})
    rep = solve(b.build())
    assert rep.status == "primal_infeasible"
    assert "presolve" in rep.message


def test_zero_row_with_rhs_is_primal_infeasible():
    b = ProgramBuilder([], 1)
    b.add_row(1.0)
    b.set_objective(nonneg={0: 1.0})
    assert solve(b.build()).status == "primal_infeasible"


def test_farkas_infeasibility_detected():
    # x0 + x1 = −1, x ≥ 0
    b = ProgramBuilder([], 2)
    b.add_row(-1.0, nonneg={0: 1.0, 1: 1.0})
    b.set_objective(nonneg={0: 1.0})
    rep = solve(b.build())
    assert rep.status == "primal_infeasible"
    assert rep.ray is not None


def test_unbounded_objective_is_dual_infeasible():
    # max μ s.t. x0 − μ = 0, x0 ≥ 0
    b = ProgramBuilder([], 1, 1)
    b.add_row(0.0, nonneg={0: 1.0}, free={0: -1.0})
    b.set_objective(free={0: 1.0})
    rep = solve(b.build())
    assert rep.status == "dual_infeasible"
    assert rep.ray is not None


def test_presolve_drops_duplicates_and_recovers_multipliers():
    b = ProgramBuilder([], 2)
    b.add_row(1.0, nonneg={0: 1.0, 1: 1.0})
    b.add_row(2.0, nonneg={0: 2.0, 1: 2.0})
    b.add_row(0.0)
    b.set_objective(nonneg={0: 1.0})
    prog = b.build()
    pre = presolve(prog)
    assert not pre.infeasible
    assert pre.dropped == 2
    y = pre.recover_multipliers(np.array([1.0]))
    assert y.shape == (3,)
    assert y[0] == pytest.approx(1.0 / np.sqrt(2.0))
    rep = solve(prog)
    assert rep.status == "optimal"
    assert rep.y.shape == (3,)
    assert rep.value == pytest.approx(1.0, abs=1e-6)


def test_capacity_limits():
    b = ProgramBuilder([5])
    b.add_row(1.0, psd={0: np.eye(5)})
    with pytest.raises(CapacityError):
        ConicSolver(SolverConfig(max_block=4)).solve(b.build())


def test_dump_and_load(tmp_path):
    b = ProgramBuilder([2], 1, 1, name="dumped")
    b.add_row(1.0, psd={0: {(0, 0): 1.0, (0, 1): 0.5}}, nonneg={0: 1.0}, free={0: -1.0})
    b.add_row(0.25, psd={0: {(1, 1): 2.0}})
    b.set_objective(psd={0: {(0, 1): -1.0}}, free={0: 1.0})
    prog = b.build()
    path = dump_program(prog, tmp_path / "p.sdp")
    text = path.read_text()
    assert text.splitlines()[1] == "blocks psd 2 nonneg 1 free 1"
    assert "0 psd0 0 1 0.5" in text
    back = load_program(path)
    np.testing.assert_array_equal(back.a_psd[0], prog.a_psd[0])
    np.testing.assert_array_equal(back.b, prog.b)
    np.testing.assert_array_equal(back.c_psd[0], prog.c_psd[0])
    np.testing.assert_array_equal(back.c_free, prog.c_free)


def _random_feasible_sdp(rng, s, m):
    """X₀ ≻ 0 给出 b，y₀ 与 S₀ ≻ 0 给出 C：原始与对偶都严格可行"""
    B = rng.normal(size=(s, s))
    X0 = B @ B.T / s + np.eye(s)
    R = rng.normal(size=(s, s))
    S0 = R @ R.T / s + np.eye(s)
    y0 = rng.normal(size=m)
    As = []
    b = ProgramBuilder([s], name=f"feasible-{s}x{m}")
    for _ in range(m):
        G = rng.normal(size=(s, s))
        Ak = 0.5 * (G + G.T)
        As.append(Ak)
        b.add_row(float(np.sum(Ak * X0)), psd={0: Ak})
    C = sum(yk * Ak for yk, Ak in zip(y0, As)) - S0
    b.set_objective(psd={0: C})
    return b.build(), float(np.sum(C * X0)), float(y0 @ [np.sum(Ak * X0) for Ak in As])


def _gap_within_guard(rep, cfg):
    return abs(rep.value - rep.dual_value) <= 10.0 * cfg.gap_tol * (1.0 + abs(rep.dual_value))


def test_random_feasible_sdp_battery():
    rng = np.random.default_rng(0)
    cfg = SolverConfig()
    for _ in range(100):
        s = int(rng.integers(2, 5))
        m = int(rng.integers(1, s * (s + 1) // 2 + 1))
        prog, lower, upper = _random_feasible_sdp(rng, s, m)
        rep = solve(prog, cfg)
        assert rep.status == "optimal", rep.message
        assert lower - 1e-6 <= rep.value <= upper + 1e-6
        assert _gap_within_guard(rep, cfg)


def test_repeated_solves_are_bit_identical():
    prog, _, _ = _random_feasible_sdp(np.random.default_rng(5), 3, 4)
    a, b = ConicSolver().solve(prog), ConicSolver().solve(prog)
    assert a.iterations == b.iterations
    assert a.history == b.history
    assert a.value == b.value
    np.testing.assert_array_equal(a.psd[0], b.psd[0])
    np.testing.assert_array_equal(a.y, b.y)


def _fail_on_calls(monkeypatch, calls):
    """让第 k 次（从 0 计）单步调用抛出分解失败"""
    original = ConicSolver._iteration
    seen = {"n": 0}

    def step(self, *args):
        k = seen["n"]
        seen["n"] += 1
        if k in calls:
            raise np.linalg.LinAlgError("Matrix is not positive definite")
        return original(self, *args)

    monkeypatch.setattr(ConicSolver, "_iteration", step)


def test_breakdown_near_optimum_keeps_last_iterate(monkeypatch):
    prog, _, _ = _random_feasible_sdp(np.random.default_rng(33), 3, 5)
    ref = solve(prog, SolverConfig(feas_tol=1e-14, gap_tol=1e-14, max_iter=60))
    k = next(i for i, h in enumerate(ref.history) if max(h) <= 1e-6)
    # 第 k 个迭代点在 5·tol 处：严格容差不满足，放宽 10 倍满足
    tol = max(ref.history[k]) / 5.0
    _fail_on_calls(monkeypatch, {k})
    rep = solve(prog, SolverConfig(feas_tol=tol, gap_tol=tol))
    assert rep.status == "optimal"
    assert rep.iterations == k
    assert "before breakdown" in rep.message
    assert rep.value == pytest.approx(ref.value, abs=1e-4 * max(1.0, abs(ref.value)))


def test_breakdown_far_from_optimum_backs_off_and_recovers(monkeypatch):
    prog, _, _ = _random_feasible_sdp(np.random.default_rng(33), 3, 5)
    ref = solve(prog)
    _fail_on_calls(monkeypatch, {2})
    rep = solve(prog)
    assert rep.status == "optimal"
    assert rep.value == pytest.approx(ref.value, abs=1e-6 * max(1.0, abs(ref.value)))


def test_repeated_breakdown_is_indeterminate(monkeypatch):
    prog, _, _ = _random_feasible_sdp(np.random.default_rng(33), 3, 5)
    _fail_on_calls(monkeypatch, set(range(2, 500)))
    rep = solve(prog)
    assert rep.status == "indeterminate"
    assert "linear algebra breakdown" in rep.message


def test_singular_schur_fallback_is_silent(recwarn):
    f = _Factor(np.ones((2, 2)))
    assert f.kind == "lstsq"
    np.testing.assert_allclose(f.solve(np.array([2.0, 2.0])), [1.0, 1.0], atol=1e-12)
    assert not [w for w in recwarn if issubclass(w.category, LinAlgWarning)]


@pytest.mark.slow
def test_sos_dual_programs_converge(problem_factory):
    from src.dualgen import build_dual

    rng = np.random.default_rng(123)
    cfg = SolverConfig()
    for _ in range(300):
        rep = solve(build_dual(problem_factory(rng)), cfg)
        assert rep.status == "optimal", rep.message
        assert _gap_within_guard(rep, cfg)
