"""
原问题预言机测试
Primal oracle tests

- 割平面 + 网格 + SLSQP 的极小值、可行性与活跃集
- 不可行判定与 Slater 点搜索
- 分式二分：贴边标志、括号嵌套与前提检查
"""

import math

import numpy as np
import pytest

from src.dualgen import MinimaxProblem, RationalMinimaxProblem
from src.exceptions import InputError, PreconditionError
from src.oracle import (
    EpigraphOracle,
    OracleConfig,
    find_slater_point,
    sample_feasible_points,
    solve_fractional_primal,
    solve_primal,
)
from src.polycore import Polynomial

X = Polynomial.variable(1, 0)
X1, X2 = Polynomial.variable(2, 0), Polynomial.variable(2, 1)


def test_quartic_pair_primal(quartic_pair):
    res = solve_primal(quartic_pair)
    assert res.solved
    assert res.value == pytest.approx(0.0, abs=1e-5)
    assert res.minimizer[0] == pytest.approx(0.0, abs=1e-3)
    assert not res.boundary_flag
    assert res.lower_bound is not None and res.lower_bound <= res.value + 1e-6
    assert res.value == pytest.approx(quartic_pair.max_objective(res.minimizer), abs=1e-9)


def test_halfspace_projection():
    P = MinimaxProblem(2, (X1 ** 2 + X2 ** 2,), (1 - X1,))
    res = solve_primal(P)
    assert res.value == pytest.approx(1.0, abs=1e-5)
    np.testing.assert_allclose(res.minimizer, [1.0, 0.0], atol=1e-3)
    assert res.feasibility_residual <= 1e-6
    assert P.max_violation(res.minimizer) <= 1e-6


def test_symmetric_pair_active_set():
    P = MinimaxProblem(1, ((X - 1) ** 2, (X + 1) ** 2))
    res = solve_primal(P, OracleConfig(active_tol=1e-4))
    assert res.value == pytest.approx(1.0, abs=1e-5)
    assert res.active_set == [0, 1]


def test_infeasible_problem():
    P = MinimaxProblem(1, (X ** 2,), (X ** 2 + 1,))
    res = solve_primal(P)
    assert res.status == "infeasible"
    assert res.value is None
    assert res.to_dict()["status"] == "infeasible"


def test_boundary_flag_for_unbounded_below_direction():
    # min −x：每次扩盒后仍贴右边界
    P = MinimaxProblem(1, (-X,))
    res = solve_primal(P, OracleConfig(max_expansions=1))
    assert res.boundary_flag
    assert res.expansions == 1
    assert res.box == ([-40.0], [40.0])


@pytest.mark.parametrize(
    "constraints,found",
    [
        ((-X - 2,), True),
        ((X ** 2, -(X ** 2)), False),
        ((), True),
    ],
)
def test_find_slater_point(constraints, found):
    P = MinimaxProblem(1, (X ** 2,), constraints)
    res = find_slater_point(P)
    assert res.found is found
    if found:
        assert max((g(res.point) for g in constraints), default=-1.0) <= -1e-6


def test_slater_point_of_unit_disk():
    P = MinimaxProblem(2, (X1 ** 2,), (X1 ** 2 + X2 ** 2 - 1,))
    res = find_slater_point(P)
    assert res.found
    np.testing.assert_allclose(res.point, [0.0, 0.0], atol=1e-3)


def test_sample_feasible_points(rng):
    P = MinimaxProblem(2, (X1,), (X1 ** 2 + X2 ** 2 - 1,))
    pts = sample_feasible_points(P, 50, (-10.0, 10.0), rng, center=np.zeros(2))
    assert pts.shape == (50, 2)
    assert np.all(np.sum(pts ** 2, axis=1) <= 1.0)


def test_oracle_config_validation():
    with pytest.raises(InputError):
        OracleConfig(grid_points=1)
    with pytest.raises(InputError):
        OracleConfig(box=(1.0, -1.0))


# ---------- 分式 ----------


def test_reciprocal_infimum_is_not_attained():
    P = RationalMinimaxProblem(1, (Polynomial.constant(1, 1.0),), (1 - X,), denominator=X)
    res = solve_fractional_primal(P)
    assert res.solved
    assert 0.0 <= res.value <= 2e-3
    assert res.boundary_flag


def test_quadratic_over_affine():
    P = RationalMinimaxProblem(1, (X ** 2 + 1,), (-X,), denominator=X + 2)
    res = solve_fractional_primal(P)
    assert res.value == pytest.approx(2.0 * math.sqrt(5.0) - 4.0, abs=1e-5)
    assert res.minimizer[0] == pytest.approx(math.sqrt(5.0) - 2.0, abs=1e-2)


def test_affine_ratio_brackets_are_nested():
    P = RationalMinimaxProblem(1, (X + 1,), (-X, X - 1), denominator=X + 2)
    res = solve_fractional_primal(P)
    assert res.value == pytest.approx(0.5, abs=1e-5)
    for (lo0, hi0), (lo1, hi1) in zip(res.brackets, res.brackets[1:]):
        assert lo0 <= lo1 <= hi1 <= hi0
    lo, hi = res.brackets[-1]
    assert lo <= res.value <= hi


def test_nonpositive_denominator_is_precondition_violation():
    P = RationalMinimaxProblem(1, (Polynomial.constant(1, 1.0),), (), denominator=X)
    with pytest.raises(PreconditionError):
        solve_fractional_primal(P)


def test_oracle_seed_reproducible(quartic_pair):
    a = EpigraphOracle(OracleConfig(seed=3)).solve(quartic_pair)
    b = EpigraphOracle(OracleConfig(seed=3)).solve(quartic_pair)
    assert a.value == b.value
    np.testing.assert_array_equal(a.minimizer, b.minimizer)
