# -*- coding: utf-8 -*-
"""
对数坐标轴布局
"""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Union

from ..errors import NonPositiveValueError

# 判断一个值是否恰好是整数次幂时允许的相对误差
_POWER_TOLERANCE = 1e-9


class Tick(NamedTuple):
    value: Union[int, float]
    pixel: float


def _power_value(base: int, k: int) -> Union[int, float]:
    return base ** k if k >= 0 else float(base) ** k


def _log(value: float, base: int) -> float:
    return math.log2(value) if base == 2 else math.log10(value) if base == 10 else math.log(value, base)


def _exact_power(value: float, base: int):
    """value 恰好是 base 的整数次幂时返回指数，否则返回 None"""
    k = round(_log(value, base))
    if math.isclose(value, _power_value(base, k), rel_tol=_POWER_TOLERANCE):
        return k
    return None


def power_bounds(min_v: float, max_v: float, base: int):
    """包住 [min_v, max_v] 的整数次幂指数区间 (k_lo, k_hi)"""
    if not (min_v > 0 and max_v > 0) or not (math.isfinite(min_v) and math.isfinite(max_v)):
        raise NonPositiveValueError(f"对数坐标的取值必须为正有限值: [{min_v}, {max_v}]")
    if min_v > max_v:
        raise ValueError("min_v 必须 ≤ max_v")
    if base not in (2, 10):
        raise ValueError("base 只能为 2 或 10")

    k_lo = _exact_power(min_v, base)
    if k_lo is None:
        k_lo = math.floor(_log(min_v, base))
    k_hi = _exact_power(max_v, base)
    if k_hi is None:
        k_hi = math.ceil(_log(max_v, base))
    if k_lo == k_hi:
        # 整个范围恰好是一个整数次幂，两侧各放宽一级
        k_lo, k_hi = k_lo - 1, k_hi + 1
    return k_lo, k_hi


@dataclass(frozen=True)
class LogAxis:
    """
    对数坐标轴：刻度在 base^k_lo .. base^k_hi，像素位置与 log(value) 成仿射关系

    inverted 为 True 时数值越大像素越小（SVG 的纵轴）。
    """
    base: int
    k_lo: int
    k_hi: int
    pixel_span: float
    offset: float = 0.0
    inverted: bool = False

    @classmethod
    def fit(cls, min_v: float, max_v: float, base: int, pixel_span: float,
            offset: float = 0.0, inverted: bool = False) -> "LogAxis":
        k_lo, k_hi = power_bounds(min_v, max_v, base)
        return cls(base, k_lo, k_hi, pixel_span, offset, inverted)

    @property
    def pixels_per_power(self) -> float:
        return self.pixel_span / (self.k_hi - self.k_lo)

    def to_px(self, value: float) -> float:
        if not value > 0:
            raise NonPositiveValueError(f"对数坐标不能表示非正值: {value}")
        fraction = (_log(value, self.base) - self.k_lo) / (self.k_hi - self.k_lo)
        if self.inverted:
            fraction = 1.0 - fraction
        return self.offset + fraction * self.pixel_span

    def ticks(self) -> List[Tick]:
        return [
            Tick(_power_value(self.base, k), self.to_px(_power_value(self.base, k)))
            for k in range(self.k_lo, self.k_hi + 1)
        ]


def layout_log_axis(min_v: float, max_v: float, base: int, pixel_span: int) -> List[Tick]:
    """
    计算对数坐标轴的刻度

    Args:
        min_v, max_v: 数据范围，0 < min_v ≤ max_v
        base: 2 或 10
        pixel_span: 轴的像素长度

    Returns:
        List[Tick]: (刻度值, 像素位置)，从 0 到 pixel_span

    Raises:
        NonPositiveValueError: 范围内有非正值
    """
    return LogAxis.fit(min_v, max_v, base, pixel_span).ticks()


def format_tick(value: Union[int, float], base: int) -> str:
    """刻度标签：base 2 直接写数值，base 10 写成 10^k"""
    if base == 10:
        k = _exact_power(value, 10)
        return f"10^{k}"
    if isinstance(value, int):
        return str(value)
    return f"{value:g}"
