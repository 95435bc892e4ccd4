# -*- coding: utf-8 -*-
"""
指标模块 - 每周期时间、强扩展加速比、弱扩展效率/减速比、吞吐量、
跨平台比较（竖线/横线/交叉点）、饱和点与理想参考线
"""

import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    EmptySeriesError, FamilyMismatchError, MissingPointError, NotOkError,
    OutOfRangeError, TooFewPointsError,
)
from .model import (
    Family, MetricKind, MetricPoint, RunRecord, RunStatus, Series, SeriesKey,
    SeriesPoint, dofs_per_node,
)

DEFAULT_SATURATION_THRESHOLD = 0.9


@dataclass(frozen=True)
class MetricSequence:
    """同一种指标的有序数据点，baseline_x 记录比值类指标的基准节点数"""
    kind: MetricKind
    points: Tuple[MetricPoint, ...]
    baseline_x: Optional[int] = None

    def __iter__(self) -> Iterator[MetricPoint]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, index) -> MetricPoint:
        return self.points[index]

    def value_at(self, x: int) -> Optional[float]:
        for point in self.points:
            if point.x == x:
                return point.value
        return None

    @property
    def values(self) -> List[float]:
        return [p.value for p in self.points]


class WeakScaling(NamedTuple):
    efficiency: MetricSequence
    slowdown: MetricSequence


@dataclass(frozen=True)
class IdealLine:
    """log2-log2 空间中的理想参考线：y(x) = anchor_y × (x/anchor_x)^slope"""
    anchor_x: int
    anchor_y: float
    slope: float

    def y(self, x: float) -> float:
        return self.anchor_y * (x / self.anchor_x) ** self.slope


@dataclass(frozen=True)
class CrossoverPoint:
    x: float
    y: float
    series_a: SeriesKey
    series_b: SeriesKey


@dataclass(frozen=True)
class SaturationPoint:
    dofs: int
    throughput: float
    fraction_of_peak: float
    saturated: bool = True


# ---- 单条记录 ----

def time_per_cycle(r: RunRecord) -> float:
    """每周期时间（秒），消除了运行周期数这一任意选择"""
    if r.status is not RunStatus.OK or r.wall_time_s is None:
        raise NotOkError(f"记录状态为 {r.status.value}，没有有效的运行时间")
    return r.wall_time_s / r.cycles


def throughput(r: RunRecord) -> float:
    """每节点吞吐量：DOF·cycles / s / node"""
    return dofs_per_node(r) / time_per_cycle(r)


def mean_time_per_cycle(records: Sequence[RunRecord]) -> float:
    """集合的平均每周期时间；先排序再求和，结果与输入顺序无关"""
    values = sorted(time_per_cycle(r) for r in records)
    if not values:
        raise EmptySeriesError("集合中没有 ok 记录")
    return math.fsum(values) / len(values)


def point_time_per_cycle(point: SeriesPoint) -> float:
    return mean_time_per_cycle(point.ok_records)


def point_throughput(point: SeriesPoint) -> float:
    return dofs_per_node(point.record) / point_time_per_cycle(point)


# ---- 序列 ----

def _require_family(series: Series, *families: Family):
    if series.family not in families:
        names = ", ".join(f.value for f in families)
        raise FamilyMismatchError(f"序列 {series.key} 属于 {series.family.value}，需要 {names}")


def _ok_times(series: Series) -> List[Tuple[int, float]]:
    points = [(p.x, point_time_per_cycle(p)) for p in series.ok_points]
    if not points:
        raise EmptySeriesError(f"序列 {series.key} 没有 ok 数据点")
    return points


def _ratio_sequence(kind: MetricKind, times, invert=False) -> MetricSequence:
    base_x, base_t = times[0]
    points = []
    for x, t in times:
        if x == base_x:
            value = 1.0
        else:
            value = t / base_t if invert else base_t / t
        points.append(MetricPoint(x, value, kind))
    return MetricSequence(kind, tuple(points), baseline_x=base_x)


def strong_speedup(series: Series) -> MetricSequence:
    """
    强扩展加速比 t(x_base)/t(x)，基准为最小节点数的 ok 点

    超线性加速比原样报告，不截断。
    """
    _require_family(series, Family.STRONG)
    return _ratio_sequence(MetricKind.SPEEDUP, _ok_times(series))


def weak_efficiency(series: Series) -> WeakScaling:
    """弱扩展效率 t(x_base)/t(x) 及其倒数（减速比）"""
    _require_family(series, Family.WEAK)
    times = _ok_times(series)
    return WeakScaling(
        efficiency=_ratio_sequence(MetricKind.EFFICIENCY, times),
        slowdown=_ratio_sequence(MetricKind.SLOWDOWN, times, invert=True),
    )


def throughput_series(series: Series) -> MetricSequence:
    """吞吐量序列；oom 点不产生指标"""
    _require_family(series, Family.THROUGHPUT)
    points = tuple(
        MetricPoint(p.x, point_throughput(p), MetricKind.THROUGHPUT) for p in series.ok_points
    )
    if not points:
        raise EmptySeriesError(f"序列 {series.key} 没有 ok 数据点")
    return MetricSequence(MetricKind.THROUGHPUT, points)


# ---- 跨平台比较 ----

def _time_at(series: Series, n: int) -> float:
    point = series.point_at(n)
    if point is None or not point.is_ok:
        raise MissingPointError(series.key, n)
    return point_time_per_cycle(point)


def cross_platform_speedup_at(a: Series, b: Series, n: int) -> float:
    """竖线比较：t_a(n)/t_b(n)，大于 1 表示 b 在 n 个节点上更快"""
    return _time_at(a, n) / _time_at(b, n)


def doublings_between(a: Series, b: Series, n: int) -> float:
    """两条曲线在 n 处相隔的 2 倍格数（log2 坐标上的竖直距离）"""
    return math.log2(cross_platform_speedup_at(a, b, n))


def platform_speedups(a: Series, b: Series) -> List[Tuple[int, float]]:
    """在两条序列共有的每个节点数上计算 t_a/t_b"""
    shared = sorted({p.x for p in a.ok_points} & {p.x for p in b.ok_points})
    return [(n, cross_platform_speedup_at(a, b, n)) for n in shared]


def _log_curve(series: Series) -> Tuple[np.ndarray, np.ndarray]:
    times = _ok_times(series)
    lx = np.array([math.log2(x) for x, _ in times])
    ly = np.array([math.log2(t) for _, t in times])
    return lx, ly


def node_equivalence(a: Series, n: int, b: Series) -> float:
    """
    横线比较：在 b 上达到 t_a(n) 所需的节点数 M

    在 b 相邻的观测点之间按 (log2 x, log2 y) 线性插值；恰好命中观测值时返回该节点数。

    Raises:
        OutOfRangeError: 目标时间超出 b 的观测范围（不外推）
    """
    target = _time_at(a, n)
    times = _ok_times(b)
    for x, t in times:
        if t == target:
            return float(x)
    observed = [t for _, t in times]
    if target < min(observed) or target > max(observed):
        raise OutOfRangeError(
            f"目标时间 {target:.6g} s 超出 {b.key} 的观测范围 [{min(observed):.6g}, {max(observed):.6g}]"
        )
    ly_target = math.log2(target)
    for (x0, t0), (x1, t1) in zip(times, times[1:]):
        if min(t0, t1) <= target <= max(t0, t1):
            lx0, lx1 = math.log2(x0), math.log2(x1)
            ly0, ly1 = math.log2(t0), math.log2(t1)
            return 2.0 ** (lx0 + (ly_target - ly0) * (lx1 - lx0) / (ly1 - ly0))
    raise OutOfRangeError(f"目标时间 {target:.6g} s 无法在 {b.key} 上插值")


def find_crossovers(a: Series, b: Series) -> List[CrossoverPoint]:
    """
    找出两条曲线在共同 x 范围内的交叉点

    两条曲线都在 log2-log2 空间内分段线性，在两者断点的并集上求差值的变号区间，
    区间内交点可精确求出；结果与参数顺序无关。
    """
    lx_a, ly_a = _log_curve(a)
    lx_b, ly_b = _log_curve(b)
    lo = max(lx_a[0], lx_b[0])
    hi = min(lx_a[-1], lx_b[-1])
    grid = np.unique(np.concatenate([lx_a, lx_b]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    if len(grid) < 2:
        return []

    ya = np.interp(grid, lx_a, ly_a)
    yb = np.interp(grid, lx_b, ly_b)
    diff = ya - yb

    crossings = []
    for i in range(len(grid)):
        if diff[i] == 0.0:
            crossings.append((float(grid[i]), float((ya[i] + yb[i]) / 2)))
        elif i + 1 < len(grid) and diff[i] * diff[i + 1] < 0:
            f = diff[i] / (diff[i] - diff[i + 1])
            lx = grid[i] + f * (grid[i + 1] - grid[i])
            ly_at_a = ya[i] + f * (ya[i + 1] - ya[i])
            ly_at_b = yb[i] + f * (yb[i + 1] - yb[i])
            crossings.append((float(lx), float((ly_at_a + ly_at_b) / 2)))

    return [CrossoverPoint(2.0 ** lx, 2.0 ** ly, a.key, b.key) for lx, ly in crossings]


# ---- 吞吐量饱和 ----

def detect_saturation(s: Series, threshold: float = DEFAULT_SATURATION_THRESHOLD) -> SaturationPoint:
    """
    饱和点：吞吐量首次达到 threshold × 观测峰值的最小问题规模

    若最后一点就是峰值且与前一点相差超过 (1 - threshold) × 峰值，
    说明阶梯在平台期之前就结束了，saturated 标记为 False。
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold 必须在 (0, 1] 内")
    values = throughput_series(s)
    if len(values) < 2:
        raise TooFewPointsError(f"序列 {s.key} 至少需要 2 个 ok 数据点")
    peak = max(values.values)
    chosen = next(p for p in values if p.value >= threshold * peak)
    last, previous = values[-1], values[-2]
    saturated = not (last.value == peak and last.value - previous.value > (1 - threshold) * peak)
    return SaturationPoint(
        dofs=chosen.x,
        throughput=chosen.value,
        fraction_of_peak=chosen.value / peak,
        saturated=saturated,
    )


# ---- 理想线 ----

def ideal_line(series: Series, slope: float) -> IdealLine:
    """以最小节点数的 ok 点为锚点；强扩展斜率 -1，弱扩展斜率 0"""
    x, t = _ok_times(series)[0]
    return IdealLine(anchor_x=x, anchor_y=t, slope=slope)
