"""
问题文件读写
Problem-file ingestion

- parse: 字节 → 规范化 ProblemFile（重复指数求和、按分级字典序排序、维度校验）
- to_problem: ProblemFile → MinimaxProblem / RationalMinimaxProblem / RobustProblem
- serialize / digest: 规范 JSON（浮点用最短往返 repr）与其 sha256
"""

from __future__ import annotations
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml
from pydantic import ValidationError

from .dualgen import MinimaxProblem, RationalMinimaxProblem, RobustProblem, robust_counterpart
from .exceptions import InputError
from .polycore import Polynomial, from_terms, to_terms
from .schemas import ProblemFile, RobustSection, Term, UncertainFunction

AnyProblem = Union[MinimaxProblem, RationalMinimaxProblem, RobustProblem]


def _loc(parts: Sequence[Any]) -> str:
    return ".".join(str(p) for p in parts)


def _load_document(data: Union[bytes, str]) -> Any:
    try:
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    except UnicodeDecodeError as e:
        raise InputError(f"input is not UTF-8 (byte {e.start})") from e
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"malformed JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from e
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1} column {mark.column + 1}" if mark else None
        raise InputError(f"malformed document: {e}", where) from e


def _canonical(poly: List[Term], n: int, where: str) -> List[Term]:
    p = from_terms(n, [t.model_dump() for t in poly], where)
    return [Term(**t) for t in to_terms(p)]


def _canonical_uncertain(u: UncertainFunction, n: int, mode: str, where: str) -> UncertainFunction:
    if mode == "finite":
        if u.template is not None or u.vertices is not None:
            raise InputError("finite mode takes 'scenarios', not 'template'/'vertices'", where)
        if not u.scenarios:
            raise InputError("scenario list is empty", f"{where}.scenarios")
        return UncertainFunction(scenarios=[_canonical(s, n, f"{where}.scenarios.{k}") for k, s in enumerate(u.scenarios)])
    if u.template is None or not u.vertices:
        raise InputError("polytopic mode needs 'template' and a nonempty 'vertices' list", where)
    dims = {len(t.p) for t in u.template}
    if len(dims) > 1:
        raise InputError("template exponent vectors have different lengths", f"{where}.template")
    total = dims.pop() if dims else n
    if total < n:
        raise InputError(f"template has {total} variables, fewer than the dimension {n}", f"{where}.template")
    for k, v in enumerate(u.vertices):
        if len(v) != total - n:
            raise InputError(f"vertex has {len(v)} coordinates, expected {total - n}", f"{where}.vertices.{k}")
    return UncertainFunction(template=_canonical(u.template, total, f"{where}.template"), vertices=u.vertices)


def canonicalize(pf: ProblemFile) -> ProblemFile:
    """语义校验并规范化"""
    n = pf.dimension
    if pf.kind != "robust" and not pf.objectives:
        raise InputError("at least one objective is required", "objectives")
    if pf.kind in ("fractional", "linear-fractional") and pf.denominator is None:
        raise InputError(f"kind {pf.kind!r} needs a denominator", "denominator")
    if pf.kind not in ("fractional", "linear-fractional") and pf.denominator is not None:
        raise InputError(f"kind {pf.kind!r} takes no denominator", "denominator")
    if pf.kind == "robust" and pf.scenarios is None:
        raise InputError("kind 'robust' needs a 'scenarios' section", "scenarios")
    if pf.kind != "robust" and pf.scenarios is not None:
        raise InputError(f"kind {pf.kind!r} takes no scenarios", "scenarios")
    if pf.box is not None and isinstance(pf.box, list) and len(pf.box) != n:
        raise InputError(f"box lists {len(pf.box)} intervals, expected {n}", "box")
    objs = [_canonical(p, n, f"objectives.{j}") for j, p in enumerate(pf.objectives)]
    cons = [_canonical(g, n, f"constraints.{i}") for i, g in enumerate(pf.constraints)]
    den = _canonical(pf.denominator, n, "denominator") if pf.denominator is not None else None
    scen = None
    if pf.scenarios is not None:
        mode = pf.scenarios.mode
        scen = RobustSection(
            mode=mode,
            objective=_canonical_uncertain(pf.scenarios.objective, n, mode, "scenarios.objective"),
            constraints=[
                _canonical_uncertain(u, n, mode, f"scenarios.constraints.{i}")
                for i, u in enumerate(pf.scenarios.constraints)
            ],
        )
    if pf.kind == "linear-fractional":
        for where, polys in (("objectives", objs), ("constraints", cons), ("denominator", [den])):
            for k, p in enumerate(polys):
                if any(sum(t.p) > 1 for t in p or []):
                    raise InputError("linear-fractional data must be affine", f"{where}.{k}" if where != "denominator" else where)
    return pf.model_copy(update={"objectives": objs, "constraints": cons, "denominator": den, "scenarios": scen})


def parse(data: Union[bytes, str]) -> ProblemFile:
    """
    解析问题文件

    Raises:
        InputError: 文档格式错误、未知 kind、维度不一致（带字段路径，如 objectives.0.2.p）
    """
    doc = _load_document(data)
    try:
        pf = ProblemFile.model_validate(doc)
    except ValidationError as e:
        err = e.errors()[0]
        raise InputError(err["msg"], _loc(err["loc"]) or None) from e
    return canonicalize(pf)


def load(path: Union[str, Path]) -> ProblemFile:
    p = Path(path)
    try:
        return parse(p.read_bytes())
    except FileNotFoundError as e:
        raise InputError(f"file not found: {p}") from e


def serialize(pf: ProblemFile) -> str:
    """规范 JSON：键排序、紧凑分隔、浮点 repr、禁止 NaN"""
    return json.dumps(pf.model_dump(exclude_none=True, mode="json"), sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(pf: ProblemFile) -> str:
    return hashlib.sha256(serialize(pf).encode("utf-8")).hexdigest()


def _poly(n: int, terms: Optional[List[Term]]) -> Polynomial:
    return from_terms(n, [t.model_dump() for t in terms or []])


def to_problem(pf: ProblemFile) -> AnyProblem:
    """ProblemFile → 领域对象"""
    n = pf.dimension
    name = pf.name or pf.kind
    objs = tuple(_poly(n, p) for p in pf.objectives)
    cons = tuple(_poly(n, g) for g in pf.constraints)
    if pf.kind == "minimax":
        return MinimaxProblem(n, objs, cons, name)
    if pf.kind in ("fractional", "linear-fractional"):
        return RationalMinimaxProblem(n, objs, cons, name, denominator=_poly(n, pf.denominator))
    rs = pf.scenarios
    assert rs is not None
    if rs.mode == "finite":
        obj = tuple(_poly(n, s) for s in rs.objective.scenarios or [])
        con = tuple(tuple(_poly(n, s) for s in u.scenarios or []) for u in rs.constraints)
        return RobustProblem(n, obj, con, "finite", name)

    def templ(u: UncertainFunction):
        total = len(u.template[0].p) if u.template else n
        return _poly(total, u.template), u.vertices or []

    return RobustProblem.polytopic(n, templ(rs.objective), [templ(u) for u in rs.constraints], name)


def from_minimax(P: MinimaxProblem, box=None) -> ProblemFile:
    """MinimaxProblem → ProblemFile（robustify 输出）"""
    return ProblemFile(
        kind="minimax",
        dimension=P.dimension,
        name=P.name or None,
        objectives=[[Term(**t) for t in to_terms(p)] for p in P.objectives],
        constraints=[[Term(**t) for t in to_terms(g)] for g in P.constraints],
        box=box,
    )


def counterpart_file(pf: ProblemFile) -> ProblemFile:
    """robust 文件 → 等价的 minimax 文件"""
    U = to_problem(pf)
    if not isinstance(U, RobustProblem):
        raise InputError(f"robustify needs kind 'robust', got {pf.kind!r}", "kind")
    return from_minimax(robust_counterpart(U), pf.box)
