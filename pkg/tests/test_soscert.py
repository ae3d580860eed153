"""
SOS 证书测试
SOS certification tests

- SOS 判定：接受显式平方和，拒绝在某点为负的多项式
- SOS-convex：Hessian 的 SOS-matrix 判定
- Gram 链接、最小范数修正与基剪枝
- 证书在样本点上的可靠性、加平方后的单调性、非负 SOS-凸多项式平移后为 SOS
"""

import numpy as np
import pytest
from scipy.optimize import minimize

from src.exceptions import CertificationError
from src.polycore import CompiledPolynomial, Polynomial, SymmetricMatrixPoly, hessian, monomial_basis
from src.soscert import (
    CertConfig,
    attach_targets,
    certify_gram,
    gram_links,
    gram_polynomial,
    is_sos,
    is_sos_convex,
    is_sos_matrix,
    link_residual,
    polish_gram,
    prune_basis,
    scalarize,
)
from tests.conftest import convex_quadratic, separable_even


def _check_certificate(f, verdict, tol=1e-7):
    assert verdict.status == "certified", verdict.reason
    cert = verdict.certificate
    assert cert.residual <= tol
    assert cert.min_eigenvalue >= -tol
    assert (f - cert.polynomial()).max_abs_coefficient() <= tol


def test_is_sos_accepts_quartic():
    # x⁴ + (5/2)x²
    f = Polynomial(1, {(4,): 1.0, (2,): 2.5})
    verdict = is_sos(f)
    _check_certificate(f, verdict)
    assert verdict.certificate.basis == ((0,), (1,), (2,))


@pytest.mark.parametrize("seed", range(5))
def test_is_sos_accepts_explicit_sums_of_squares(seed):
    rng = np.random.default_rng(seed)
    n = 2
    basis = monomial_basis(n, 2).monomials
    f = Polynomial.zero(n)
    for _ in range(6):
        q = Polynomial(n, {m: float(rng.normal()) for m in basis})
        f = f + q * q
    _check_certificate(f, is_sos(f))


def test_is_sos_rejects_negative_polynomial():
    # x² − 1 在 x = 0 处为 −1
    f = Polynomial(1, {(2,): 1.0, (0,): -1.0})
    verdict = is_sos(f)
    assert verdict.status == "refuted"
    assert verdict.certificate is None


def test_odd_degree_is_refuted_without_solving():
    verdict = is_sos(Polynomial(1, {(3,): 1.0}))
    assert verdict.status == "refuted"
    assert verdict.report is None


def test_zero_polynomial_is_trivially_sos():
    verdict = is_sos(Polynomial.zero(2))
    assert verdict.ok
    assert verdict.certificate.residual == 0.0


def test_pruned_basis_certificate():
    f = Polynomial(1, {(4,): 1.0})
    assert prune_basis(monomial_basis(1, 2).monomials, dict(f.terms)) == [(2,)]
    verdict = is_sos(f, CertConfig(prune_basis=True))
    _check_certificate(f, verdict)
    assert verdict.certificate.basis == ((2,),)


def test_is_sos_convex_accepts_octic():
    # x1⁸ + x1² + x1x2 + x2²
    f = Polynomial(2, {(8, 0): 1.0, (2, 0): 1.0, (1, 1): 1.0, (0, 2): 1.0})
    verdict = is_sos_convex(f)
    assert verdict.kind == "sos-convex"
    _check_certificate(scalarize(hessian(f)), verdict)


@pytest.mark.parametrize("seed", range(5))
def test_convex_quadratics_are_sos_convex(seed):
    rng = np.random.default_rng(seed)
    f = convex_quadratic(rng, 3)
    assert is_sos_convex(f).ok


def test_non_convex_polynomial_is_not_sos_convex():
    # x1²x2²：Hessian 在 (1,1) 处行列式为 4 − 16 < 0
    f = Polynomial(2, {(2, 2): 1.0})
    H = hessian(f).evaluate([1.0, 1.0])
    assert np.linalg.eigvalsh(H)[0] < 0
    assert not is_sos_convex(f).ok


def test_scalarize_constant_matrix():
    F = SymmetricMatrixPoly.constant(np.array([[2.0, 1.0], [1.0, 3.0]]), dimension=1)
    z = scalarize(F)
    assert z.dimension == 3
    assert dict(z.terms) == {(0, 2, 0): 2.0, (0, 1, 1): 2.0, (0, 0, 2): 3.0}
    assert is_sos_matrix(F).ok


def test_indefinite_constant_matrix_is_refuted():
    F = SymmetricMatrixPoly.constant(np.array([[1.0, 0.0], [0.0, -1.0]]), dimension=1)
    assert is_sos_matrix(F).status == "refuted"


def test_gram_links_reconstruct_polynomial(rng):
    basis = monomial_basis(2, 2).monomials
    B = rng.normal(size=(6, 6))
    Q = B @ B.T
    f = gram_polynomial(basis, Q)
    links, missing = attach_targets(gram_links(2, 2), f)
    assert not missing
    assert len(links) == 15
    assert link_residual(Q, links) <= 1e-12


def test_polish_gram_restores_links(rng):
    basis = monomial_basis(1, 2).monomials
    Q = np.diag([1.0, 2.0, 3.0])
    f = gram_polynomial(basis, Q)
    links, _ = attach_targets(gram_links(1, 2), f)
    noisy = Q + 1e-7 * rng.normal(size=(3, 3))
    P, raw = polish_gram(noisy, links)
    assert raw > 0
    assert link_residual(P, links) <= 1e-12
    np.testing.assert_allclose(P, P.T)


def test_certify_gram_rejects_indefinite_matrix():
    basis = monomial_basis(1, 1).monomials
    Q = np.array([[1.0, 0.0], [0.0, -1.0]])
    f = gram_polynomial(basis, Q)
    links, _ = attach_targets(gram_links(1, 1), f)
    with pytest.raises(CertificationError):
        certify_gram(Q, links, basis, f, CertConfig(), 1)


def _random_sum_of_squares(rng, n, k, count):
    basis = monomial_basis(n, k).monomials
    f = Polynomial.zero(n)
    for _ in range(count):
        q = Polynomial(n, {m: float(rng.normal()) for m in basis})
        f = f + q * q
    return f


def test_certificates_are_sound_on_samples():
    rng = np.random.default_rng(21)
    cases = [Polynomial(1, {(4,): 1.0, (2,): 2.5})] + [_random_sum_of_squares(rng, 2, 2, 3) for _ in range(4)]
    for f in cases:
        verdict = is_sos(f)
        assert verdict.status == "certified"
        g = verdict.certificate.polynomial()
        pts = rng.uniform(-2.0, 2.0, size=(1000, f.dimension))
        assert min(f(p) for p in pts) >= -1e-6
        assert min(g(p) for p in pts) >= -1e-6


def test_adding_a_square_keeps_certification(problem_factory):
    rng = np.random.default_rng(22)
    for _ in range(5):
        f = _random_sum_of_squares(rng, 2, 2, 2)
        sigma = _random_sum_of_squares(rng, 2, 2, 1)
        assert is_sos(sigma).status == "certified"
        assert is_sos(f).status == "certified"
        assert is_sos(f + sigma).status == "certified"
    # 目标函数减去其极小值后同样保持
    P = problem_factory(rng)
    while P.dimension != 2:
        P = problem_factory(rng)
    p = P.objectives[0]
    shifted = p - _minimum(p) + 1e-3
    assert is_sos(shifted).status == "certified"
    assert is_sos(shifted + _random_sum_of_squares(rng, 2, 2, 1)).status == "certified"


def _minimum(f):
    """网格起点 + BFGS 精化（凸多项式的全局极小）"""
    n = f.dimension
    axes = [np.linspace(-3.0, 3.0, 61)] * n
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    x0 = grid[np.argmin(CompiledPolynomial(f).values(grid))]
    cf = CompiledPolynomial(f)
    res = minimize(cf.value, x0, jac=cf.gradient, method="BFGS", options={"gtol": 1e-12})
    return min(float(res.fun), f(x0))


@pytest.mark.slow
def test_nonnegative_sos_convex_shift_is_sos():
    rng = np.random.default_rng(23)
    for _ in range(50):
        n = int(rng.integers(1, 3))
        f = convex_quadratic(rng, n) + separable_even(rng, n)
        assert is_sos_convex(f).status == "certified"
        assert is_sos(f - _minimum(f) + 1e-6).status == "certified"
