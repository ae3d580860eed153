"""
异常定义模块
Exception hierarchy

所有库级错误的基类与分类：
- InputError: 输入数据非法（带定位信息，CLI 退出码 4）
- CapacityError: 规模超过配置上限（退出码 4）
- PreconditionError: 定理前提在采样点上被违反
- CertificationError: 求解器声称最优但证书校验失败（退出码 3）
- NumericalError: 数值线性代数失败

数学结论（不可行、无界、非 SOS、未找到 Slater 点）以状态值返回，不抛异常。
"""

from __future__ import annotations
from typing import Optional


class SosDualError(Exception):
    """库内所有错误的基类"""


class InputError(SosDualError):
    """输入数据非法"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.message = message
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class CapacityError(SosDualError):
    """规模超过配置上限"""

    def __init__(self, message: str, size: int = 0, limit: int = 0):
        self.size = size
        self.limit = limit
        super().__init__(message)


class PreconditionError(SosDualError): ...


class CertificationError(SosDualError):
    """求解器报告最优，但恒等式或半正定性校验失败"""

    def __init__(self, message: str, residual: float = float("nan")):
        self.residual = residual
        super().__init__(message)


class NumericalError(SosDualError): ...
