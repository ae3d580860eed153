"""
多项式编码
Polynomial codec

JSON 项表 [{"c": 系数, "p": [指数...]}]，重复指数求和；以及人类可读文本
"""

from __future__ import annotations
from typing import Any, Dict, Iterable, List, Mapping

from ..exceptions import InputError
from .polynomial import Polynomial


def to_terms(f: Polynomial) -> List[Dict[str, Any]]:
    """按分级字典序输出项表"""
    return [{"c": c, "p": list(alpha)} for alpha, c in f.terms.items()]


def from_terms(dimension: int, terms: Iterable[Mapping[str, Any]], where: str = "") -> Polynomial:
    pairs = []
    for k, t in enumerate(terms):
        loc = f"{where}.{k}" if where else str(k)
        try:
            c, p = t["c"], t["p"]
        except (KeyError, TypeError) as e:
            raise InputError("term must be an object with keys 'c' and 'p'", loc) from e
        if len(p) != dimension:
            raise InputError(f"exponent vector has length {len(p)}, expected {dimension}", f"{loc}.p")
        pairs.append((p, c))
    return Polynomial.from_terms(dimension, pairs)


def _mono_text(alpha) -> str:
    parts = []
    for i, e in enumerate(alpha):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return "*".join(parts)


def to_text(f: Polynomial) -> str:
    """形如 2*x1^4 - x1 的文本"""
    if f.is_zero():
        return "0"
    out = []
    for alpha, c in sorted(f.terms.items(), key=lambda kv: (-sum(kv[0]), kv[0]), reverse=False):
        mono = _mono_text(alpha)
        mag = abs(c)
        coef = "" if mono and mag == 1.0 else f"{mag:g}"
        body = "*".join(p for p in (coef, mono) if p)
        sign = "-" if c < 0 else "+"
        out.append((sign, body))
    head_sign, head = out[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text
