"""
多项式核心模块
Polynomial core

稀疏多元多项式算术、分级字典序单项式基与精确微分：
- polynomial: Polynomial 值对象及 add/scale/mul/prune/embed
- basis: basis(n,k) 与容量检查
- calculus: gradient / hessian / SymmetricMatrixPoly
- evaluate: 求值、向量化求值与 restrict
- codec: JSON 项表与文本
"""

from .polynomial import Polynomial, add, scale, mul, prune, embed, grlex_key
from .basis import MonomialBasis, monomial_basis, basis_size, graded_lex, sort_graded_lex, DEFAULT_BASIS_LIMIT
from .calculus import SymmetricMatrixPoly, derivative, gradient, hessian, quadratic_data
from .evaluate import evaluate, CompiledPolynomial, restrict
from .codec import to_terms, from_terms, to_text

__all__ = [
    "Polynomial",
    "add",
    "scale",
    "mul",
    "prune",
    "embed",
    "grlex_key",
    "MonomialBasis",
    "monomial_basis",
    "basis_size",
    "graded_lex",
    "sort_graded_lex",
    "DEFAULT_BASIS_LIMIT",
    "SymmetricMatrixPoly",
    "derivative",
    "gradient",
    "hessian",
    "quadratic_data",
    "evaluate",
    "CompiledPolynomial",
    "restrict",
    "to_terms",
    "from_terms",
    "to_text",
]
