"""
文件格式模型
File-format schemas

pydantic v2 模型，负责结构与类型校验，并发布 JSON schema：
- ProblemFile: 问题文件（JSON，也接受同结构 YAML）
- RunReport: 命令输出报告（camelCase 键，不含 NaN/Inf）

维度一致性、重复指数合并等语义检查在 problemfile 中完成。
"""

from __future__ import annotations
import math
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, model_validator
from pydantic.alias_generators import to_camel

from .types import ProblemKind


class Term(BaseModel):
    """单项 c·x^p"""
    model_config = ConfigDict(extra="forbid")

    c: float = Field(allow_inf_nan=False)
    p: List[NonNegativeInt]


Poly = List[Term]


class UncertainFunction(BaseModel):
    """不确定函数：有限情景，或关于参数仿射的模板 + 顶点"""
    model_config = ConfigDict(extra="forbid")

    scenarios: Optional[List[Poly]] = None
    template: Optional[Poly] = None
    vertices: Optional[List[List[float]]] = None


class RobustSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Literal["finite", "polytopic"] = "finite"
    objective: UncertainFunction
    constraints: List[UncertainFunction] = []


class ProblemFile(BaseModel):
    """问题文件"""
    model_config = ConfigDict(extra="forbid")

    kind: ProblemKind
    dimension: PositiveInt
    name: Optional[str] = None
    objectives: List[Poly] = []
    constraints: List[Poly] = []
    denominator: Optional[Poly] = None
    scenarios: Optional[RobustSection] = None
    box: Optional[Union[Tuple[float, float], List[Tuple[float, float]]]] = None


def _finite(obj: Any) -> Any:
    """把非有限浮点替换为 None"""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


class RunReport(BaseModel):
    """命令报告"""
    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)

    command: str
    status: str
    exit_code: int
    input_digest: Optional[str] = None
    tool_version: str = ""
    value: Optional[float] = None
    attainment: Optional[str] = None
    certificate: Optional[Dict[str, Any]] = None
    residual: Optional[float] = None
    dual_value: Optional[float] = None
    primal_value: Optional[float] = None
    gap: Optional[float] = None
    slater: Optional[bool] = None
    verdict: Optional[str] = None
    oracle: Optional[Dict[str, Any]] = None
    checks: Optional[List[Dict[str, Any]]] = None
    program: Optional[Dict[str, Any]] = None
    problem: Optional[Dict[str, Any]] = None
    output: Optional[str] = None
    message: Optional[str] = None
    warnings: List[str] = []
    timings: Dict[str, float] = {}

    @model_validator(mode="before")
    @classmethod
    def _drop_non_finite(cls, data: Any) -> Any:
        return _finite(data) if isinstance(data, dict) else data

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, exclude_none=True, mode="json")


def schema_for(name: str) -> Dict[str, Any]:
    models = {"problem": ProblemFile, "report": RunReport}
    return models[name].model_json_schema(by_alias=True)
