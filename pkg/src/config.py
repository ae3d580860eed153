"""
配置管理模块
Configuration management module

读取 YAML 配置与环境变量（支持 .env），提供统一的 Settings 对象：
- solver: 内点法容差与迭代上限
- cert: 证书容差与基规模上限
- oracle: 搜索盒、网格、割平面参数
- gap: 零间隙判定容差
- report / logging: 输出格式与日志

环境变量覆盖（前缀 SOSDUAL_）：FEAS_TOL, GAP_TOL, MAX_ITERS, PRESOLVE, CP_TOL, SEED, LOG_LEVEL, FORMAT
"""

from __future__ import annotations
from dataclasses import dataclass, field, fields, replace
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml
from dotenv import load_dotenv

from .exceptions import InputError
from .metrics import GapCfg
from .oracle import OracleConfig
from .soscert import CertConfig
from .solver import SolverConfig

DEFAULT_CONFIG = Path(__file__).resolve().parents[1] / "configs" / "default.yml"
ENV_PREFIX = "SOSDUAL_"

########################################################

# 环境变量后缀 → (Settings 分节, 字段)
ENV_OVERRIDES: Dict[str, Tuple[str, str]] = {
    "FEAS_TOL": ("solver", "feas_tol"),
    "GAP_TOL": ("solver", "gap_tol"),
    "MAX_ITERS": ("solver", "max_iter"),
    "PRESOLVE": ("solver", "presolve"),
    "CP_TOL": ("oracle", "cp_tol"),
    "SEED": ("oracle", "seed"),
    "FORMAT": ("report", "format"),
    "LOG_LEVEL": ("logging", "level"),
}

_TRUE, _FALSE = ("true", "1", "yes", "on"), ("false", "0", "no", "off")


def coerce_env(key: str, raw: str, current: Any) -> Any:
    """
    按字段当前值的类型转换环境变量字符串

    Raises:
        InputError: 无法转换（location 为变量名）
    """
    text = raw.strip()
    try:
        if isinstance(current, bool):
            if text.lower() not in _TRUE + _FALSE:
                raise ValueError(f"expected one of {_TRUE + _FALSE}")
            return text.lower() in _TRUE
        if isinstance(current, int):
            return int(text)
        if isinstance(current, float):
            return float(text)
    except ValueError as e:
        raise InputError(f"cannot parse {raw!r}: {e}", key) from e
    return text


########################################################


@dataclass
class ReportCfg:
    """报告输出配置"""
    format: str = "json"
    indent: int = 2


@dataclass
class LoggingCfg:
    """日志配置"""
    level: str = "WARNING"
    fmt: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    datefmt: str = "%Y-%m-%d %H:%M:%S"


def _section(cls, data: Dict[str, Any], name: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise InputError(f"unknown keys {sorted(unknown)}", name)
    try:
        return cls(**data)
    except (TypeError, ValueError) as e:
        raise InputError(str(e), name) from e


@dataclass
class Settings:
    """全局设置"""
    solver: SolverConfig = field(default_factory=SolverConfig)
    cert: CertConfig = field(default_factory=CertConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    gap: GapCfg = field(default_factory=GapCfg)
    report: ReportCfg = field(default_factory=ReportCfg)
    logging: LoggingCfg = field(default_factory=LoggingCfg)

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None, use_env: bool = True) -> "Settings":
        """
        加载配置

        Args:
            path: YAML 路径；为 None 时使用 configs/default.yml（不存在则全部取默认值）
            use_env: 是否应用 SOSDUAL_* 环境变量覆盖（会先加载 .env）

        Returns:
            Settings
        """
        p = Path(path) if path else DEFAULT_CONFIG
        data: Dict[str, Any] = {}
        if path or p.exists():
            try:
                data = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
            except FileNotFoundError as e:
                raise InputError(f"config file not found: {p}") from e
            except yaml.YAMLError as e:
                raise InputError(f"invalid YAML: {e}", str(p)) from e
        if not isinstance(data, dict):
            raise InputError("config root must be a mapping", str(p))
        oracle = dict(data.get("oracle") or {})
        if "box" in oracle:
            oracle["box"] = tuple(oracle["box"]) if not isinstance(oracle["box"][0], list) else [tuple(b) for b in oracle["box"]]
        settings = cls(
            solver=_section(SolverConfig, data.get("solver") or {}, "solver"),
            cert=_section(CertConfig, data.get("cert") or {}, "cert"),
            oracle=_section(OracleConfig, oracle, "oracle"),
            gap=_section(GapCfg, data.get("gap") or {}, "gap"),
            report=_section(ReportCfg, data.get("report") or {}, "report"),
            logging=_section(LoggingCfg, data.get("logging") or {}, "logging"),
        )
        return settings.apply_env() if use_env else settings

    def apply_env(self) -> "Settings":
        """SOSDUAL_* 覆盖（先加载 .env）；空字符串视为未设置"""
        load_dotenv()
        sections: Dict[str, Any] = {}
        for suffix, (section, name) in ENV_OVERRIDES.items():
            raw = os.getenv(ENV_PREFIX + suffix)
            if not raw:
                continue
            cfg = sections.get(section, getattr(self, section))
            value = coerce_env(ENV_PREFIX + suffix, raw, getattr(cfg, name))
            sections[section] = replace(cfg, **{name: value})
        return replace(self, **sections)

    def with_overrides(
        self,
        tol: Optional[float] = None,
        max_iters: Optional[int] = None,
        box: Optional[Tuple[float, float]] = None,
        seed: Optional[int] = None,
    ) -> "Settings":
        """CLI 参数覆盖：--tol 同时作用于内点法容差与割平面容差"""
        solver, oracle = self.solver, self.oracle
        if tol is not None:
            solver = replace(solver, feas_tol=tol, gap_tol=tol)
            oracle = replace(oracle, cp_tol=tol)
        if max_iters is not None:
            solver = replace(solver, max_iter=max_iters)
        if box is not None:
            oracle = replace(oracle, box=box)
        if seed is not None:
            oracle = replace(oracle, seed=seed)
        return replace(self, solver=solver, oracle=oracle)


def setup_logging(cfg: LoggingCfg) -> None:
    """stderr 单一 handler"""
    level = getattr(logging, str(cfg.level).upper(), logging.WARNING)
    logging.basicConfig(level=level, format=cfg.fmt, datefmt=cfg.datefmt, force=True)
