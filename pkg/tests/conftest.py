"""
测试公共夹具
Shared test fixtures

- 固定种子的随机数发生器
- 随机 SOS-凸实例工厂（凸二次 + 可分偶次项，保证存在 Slater 点）
- 文件型问题的构造辅助
"""

from __future__ import annotations
import json
from pathlib import Path
from typing import Callable, List

import numpy as np
import pytest

from src.dualgen import MinimaxProblem
from src.polycore import Polynomial

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"


def x(n: int, i: int) -> Polynomial:
    return Polynomial.variable(n, i)


def convex_quadratic(rng: np.random.Generator, n: int, scale: float = 1.0) -> Polynomial:
    """xᵀAx + aᵀx + α，A = BBᵀ + 0.1I"""
    B = rng.normal(size=(n, n))
    A = scale * (B @ B.T / n + 0.1 * np.eye(n))
    a = rng.normal(size=n)
    terms = {(0,) * n: float(rng.normal())}
    for i in range(n):
        e = [0] * n
        e[i] = 1
        terms[tuple(e)] = float(a[i])
        for j in range(i, n):
            e2 = [0] * n
            e2[i] += 1
            e2[j] += 1
            terms[tuple(e2)] = terms.get(tuple(e2), 0.0) + float(A[i, j] if i == j else 2.0 * A[i, j])
    return Polynomial(n, terms)


def separable_even(rng: np.random.Generator, n: int, degree: int = 4) -> Polynomial:
    """Σ c_i x_i^degree，c_i ≥ 0"""
    terms = {}
    for i in range(n):
        e = [0] * n
        e[i] = degree
        terms[tuple(e)] = float(rng.uniform(0.0, 0.5))
    return Polynomial(n, terms)


def random_sos_convex_problem(rng: np.random.Generator, quartic: bool = True) -> MinimaxProblem:
    """
    随机 SOS-凸极小极大实例：n ≤ 3, r ≤ 3, m ≤ 3

    约束形如 ‖x − c‖² + 可分项 − ρ，原点附近严格可行（Slater 点）。
    """
    n = int(rng.integers(1, 4))
    r = int(rng.integers(1, 4))
    m = int(rng.integers(0, 4))
    objs = []
    for _ in range(r):
        p = convex_quadratic(rng, n)
        if quartic:
            p = p + separable_even(rng, n)
        objs.append(p)
    cons = []
    for _ in range(m):
        c = rng.uniform(-0.5, 0.5, size=n)
        g = sum(((x(n, i) - float(c[i])) ** 2 for i in range(n)), Polynomial.zero(n))
        if quartic:
            g = g + separable_even(rng, n)
        # 原点处 g(0) = ‖c‖² + 0 − ρ < 0
        rho = float(c @ c) + float(rng.uniform(0.5, 2.0))
        cons.append(g - rho)
    return MinimaxProblem(n, tuple(objs), tuple(cons), name="random")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def quartic_pair() -> MinimaxProblem:
    """min max{2x⁴ − x, 5x² + x} s.t. −x − 2 ≤ 0"""
    X = x(1, 0)
    return MinimaxProblem(1, (2 * X ** 4 - X, 5 * X ** 2 + X), (-X - 2,), name="quartic-pair")


@pytest.fixture
def problem_factory() -> Callable[[np.random.Generator], MinimaxProblem]:
    return random_sos_convex_problem


@pytest.fixture
def write_problem(tmp_path: Path) -> Callable[[dict, str], Path]:
    """把字典写成问题文件"""

    def _write(doc: dict, name: str = "problem.json") -> Path:
        p = tmp_path / name
        p.write_text(json.dumps(doc), encoding="utf-8")
        return p

    return _write


def terms_of(f: Polynomial) -> List[dict]:
    return [{"c": c, "p": list(a)} for a, c in f.terms.items()]
