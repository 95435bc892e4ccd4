# -*- coding: utf-8 -*-
"""
图表渲染 - 强扩展、弱扩展、强弱组合与吞吐量四种图表模板，输出独立的 SVG 文档

同样的 ChartSpec 总是得到逐字节相同的输出。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..errors import ChartLayoutError, EmptyChartError, NonPositiveValueError
from ..study.ingest import AggregatedPoint, BandStat, aggregate_ensemble
from ..study.metrics import IdealLine
from ..study.model import Family, Series, SeriesKey, dofs_per_node
from .axis import LogAxis, format_tick
from .svg import SvgDocument, circle, line, polygon, polyline, rect, text

DEFAULT_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#393b79",
)
NEUTRAL_COLOR = "#7f7f7f"
DASH_PATTERN = "6,4"
IDEAL_DASH = "2,3"

DEFAULT_WIDTH = 800
DEFAULT_HEIGHT = 560

MARGIN_LEFT = 90
MARGIN_RIGHT = 210
MARGIN_TOP = 50
MARGIN_BOTTOM = 70
MIN_WIDTH_PX = MARGIN_LEFT + MARGIN_RIGHT + 1
MIN_HEIGHT_PX = MARGIN_TOP + MARGIN_BOTTOM + 1
LEGEND_ROW = 18
MARKER_RADIUS = 3.5


class ChartKind(str, Enum):
    STRONG = "strong"
    WEAK = "weak"
    STRONG_WEAK = "strong_weak"
    THROUGHPUT = "throughput"

    @property
    def base(self) -> int:
        return 10 if self is ChartKind.THROUGHPUT else 2


class Annotation(str, Enum):
    NONE = "none"
    INVERSE_WEAK_EFFICIENCY = "inverse_weak_efficiency"


DEFAULT_LABELS = {
    ChartKind.STRONG: ("Number of compute nodes", "Time per cycle (s)"),
    ChartKind.WEAK: ("Number of compute nodes", "Time per cycle (s)"),
    ChartKind.STRONG_WEAK: ("Number of compute nodes", "Time per cycle (s)"),
    ChartKind.THROUGHPUT: ("Degrees of freedom", "Throughput (DOF·cycles/s/node)"),
}


@dataclass(frozen=True)
class SeriesStyle:
    color: str
    dash: Optional[str] = None
    markers: bool = True


@dataclass(frozen=True)
class ChartSeries:
    """
    一条待绘制的曲线

    points 为按 x 递增的聚合点（单次运行时 lo = mean = hi）；
    oom_after 是其后紧跟 oom 记录的最后一个 ok 点的 x。
    """
    key: SeriesKey
    points: Tuple[AggregatedPoint, ...]
    oom_after: Optional[int] = None
    style: Optional[SeriesStyle] = None

    @property
    def has_band(self) -> bool:
        return any(p.n > 1 for p in self.points)

    @classmethod
    def from_series(cls, series: Series, stat: Union[BandStat, str] = BandStat.MINMAX,
                    style: Optional[SeriesStyle] = None) -> "ChartSeries":
        """
        由 Series 构造；吞吐量序列使用 每节点自由度 / 集合平均每周期时间，
        与 metrics.throughput_series 的取值一致
        """
        points = []
        oom_after = None
        last_ok = None
        for point in series.points:
            if point.is_ok:
                agg = aggregate_ensemble(point.ok_records, stat, x=point.x)
                if series.family is Family.THROUGHPUT:
                    d = dofs_per_node(point.record)
                    agg = AggregatedPoint(point.x, d / agg.mean, d / agg.hi, d / agg.lo, agg.n)
                points.append(agg)
                last_ok = point.x
            elif point.is_oom and last_ok is not None and oom_after is None:
                oom_after = last_ok
        return cls(series.key, tuple(points), oom_after, style)


@dataclass(frozen=True)
class ChartSpec:
    kind: ChartKind
    series: Tuple[ChartSeries, ...]
    title: str = ""
    x_label: Optional[str] = None
    y_label: Optional[str] = None
    show_ideal: Tuple[Tuple[SeriesKey, float], ...] = ()
    annotations: Annotation = Annotation.NONE
    width_px: int = DEFAULT_WIDTH
    height_px: int = DEFAULT_HEIGHT
    palette: Tuple[str, ...] = field(default=DEFAULT_PALETTE)


def format_slowdown(value: float) -> str:
    """最多两位小数，去掉末尾的 0，但至少保留一位：1.0、1.2、1.49"""
    formatted = f"{value:.2f}".rstrip("0")
    if formatted.endswith("."):
        formatted += "0"
    return formatted


def format_data(value: float) -> str:
    return str(value) if isinstance(value, int) else f"{value:.12g}"


def legend_label(key: SeriesKey, with_param: bool) -> str:
    if not with_param:
        return key.label
    unit = "DOF/node" if key.family is Family.WEAK else "DOF"
    return f"{key.label} · 2^{key.family_param} {unit}"


def assign_styles(spec: ChartSpec) -> Dict[SeriesKey, SeriesStyle]:
    """
    按排序后的 SeriesKey 稳定分配颜色

    strong_weak 图中强扩展曲线为实线并各自着色，弱扩展曲线用中性色虚线且不画标记；
    吞吐量图中同一平台共用颜色，带 variant 的曲线画成虚线。
    """
    palette = spec.palette or DEFAULT_PALETTE
    kind = ChartKind(spec.kind)
    keys = sorted(s.key for s in spec.series)
    styles: Dict[SeriesKey, SeriesStyle] = {}
    if kind is ChartKind.STRONG_WEAK:
        strong = [k for k in keys if k.family is not Family.WEAK]
        for i, key in enumerate(strong):
            styles[key] = SeriesStyle(palette[i % len(palette)])
        for key in keys:
            if key.family is Family.WEAK:
                styles[key] = SeriesStyle(NEUTRAL_COLOR, DASH_PATTERN, markers=False)
    elif kind is ChartKind.THROUGHPUT:
        platforms = sorted({k.platform for k in keys})
        for key in keys:
            color = palette[platforms.index(key.platform) % len(palette)]
            styles[key] = SeriesStyle(color, DASH_PATTERN if key.variant else None)
    else:
        for i, key in enumerate(keys):
            styles[key] = SeriesStyle(palette[i % len(palette)])
    for s in spec.series:
        if s.style is not None:
            styles[s.key] = s.style
    return styles


def _ideal_lines(spec: ChartSpec) -> List[Tuple[ChartSeries, IdealLine]]:
    by_key = {s.key: s for s in spec.series}
    lines = []
    for key, slope in spec.show_ideal:
        s = by_key.get(key)
        if s is None:
            raise ChartLayoutError(f"理想线引用了图表中不存在的序列: {key}")
        anchor = s.points[0]
        lines.append((s, IdealLine(anchor_x=anchor.x, anchor_y=anchor.mean, slope=slope)))
    return lines


def _check_positive(spec: ChartSpec):
    for s in spec.series:
        for p in s.points:
            for value in (p.x, p.mean, p.lo, p.hi):
                if not value > 0:
                    raise NonPositiveValueError(f"序列 {s.key} 在 x={p.x} 处有非正值 {value}")


def render_chart(spec: ChartSpec) -> bytes:
    """
    渲染 SVG 图表

    Raises:
        EmptyChartError: 没有序列，或某条序列没有数据点
        NonPositiveValueError: 对数坐标上出现非正值
        ChartLayoutError: 尺寸容不下绘图区，或理想线引用了未知序列
    """
    if not spec.series:
        raise EmptyChartError("图表中没有序列")
    for s in spec.series:
        if not s.points:
            raise EmptyChartError(f"序列 {s.key} 没有可绘制的数据点")
    _check_positive(spec)
    plot_w = spec.width_px - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = spec.height_px - MARGIN_TOP - MARGIN_BOTTOM
    if plot_w <= 0 or plot_h <= 0:
        raise ChartLayoutError(
            f"图表尺寸过小: {spec.width_px}x{spec.height_px}，至少需要 {MIN_WIDTH_PX}x{MIN_HEIGHT_PX}")

    kind = ChartKind(spec.kind)
    base = kind.base
    ideals = _ideal_lines(spec)
    xs = [p.x for s in spec.series for p in s.points]
    ys = [v for s in spec.series for p in s.points for v in (p.lo, p.mean, p.hi)]
    for s, ideal in ideals:
        ys += [ideal.y(s.points[0].x), ideal.y(s.points[-1].x)]
    x_axis = LogAxis.fit(min(xs), max(xs), base, plot_w, offset=MARGIN_LEFT)
    y_axis = LogAxis.fit(min(ys), max(ys), base, plot_h, offset=MARGIN_TOP, inverted=True)
    styles = assign_styles(spec)
    ordered = sorted(spec.series, key=lambda s: s.key)

    doc = SvgDocument(spec.width_px, spec.height_px)
    doc.add(rect(0, 0, spec.width_px, spec.height_px, **{"class": "background", "fill": "#ffffff"}))
    if spec.title:
        doc.add(text(spec.width_px / 2, MARGIN_TOP / 2, spec.title,
                     **{"class": "title", "text_anchor": "middle", "font_size": 16}))

    _draw_grid(doc, x_axis, y_axis, base)
    default_x, default_y = DEFAULT_LABELS[kind]
    doc.add(text(MARGIN_LEFT + plot_w / 2, spec.height_px - 20, spec.x_label or default_x,
                 **{"class": "axis-label x", "text_anchor": "middle", "font_size": 13}))
    y_center = MARGIN_TOP + plot_h / 2
    doc.add(text(20, y_center, spec.y_label or default_y,
                 **{"class": "axis-label y", "text_anchor": "middle", "font_size": 13,
                    "transform": f"rotate(-90 20 {y_center:.3f})"}))

    bands = doc.group("bands")
    for s in ordered:
        if s.has_band:
            upper = [(x_axis.to_px(p.x), y_axis.to_px(p.hi)) for p in s.points]
            lower = [(x_axis.to_px(p.x), y_axis.to_px(p.lo)) for p in reversed(s.points)]
            bands.add(polygon(upper + lower, **{
                "class": "band", "data_series": str(s.key), "fill": styles[s.key].color,
                "fill_opacity": "0.2", "stroke": "none",
            }))

    ideal_group = doc.group("ideals")
    for s, ideal in ideals:
        x0, x1 = s.points[0].x, s.points[-1].x
        ideal_group.add(line(x_axis.to_px(x0), y_axis.to_px(ideal.y(x0)),
                             x_axis.to_px(x1), y_axis.to_px(ideal.y(x1)), **{
                                 "class": "ideal", "data_series": str(s.key),
                                 "data_slope": format_data(float(ideal.slope)),
                                 "stroke": NEUTRAL_COLOR, "stroke_dasharray": IDEAL_DASH,
                             }))

    lines = doc.group("series")
    markers = doc.group("markers")
    for s in ordered:
        style = styles[s.key]
        coords = coords_of(s, x_axis, y_axis)
        if len(coords) > 1:
            lines.add(polyline(coords, **{
                "class": "series", "data_series": str(s.key), "stroke": style.color,
                "stroke_width": 2, "stroke_dasharray": style.dash,
            }))
        if style.markers:
            for p, (cx, cy) in zip(s.points, coords):
                markers.add(circle(cx, cy, MARKER_RADIUS, **{
                    "class": "marker", "data_series": str(s.key),
                    "data_x": format_data(p.x), "data_y": format_data(p.mean),
                    "fill": style.color,
                }))

    if Annotation(spec.annotations) is Annotation.INVERSE_WEAK_EFFICIENCY and kind in (ChartKind.WEAK, ChartKind.STRONG_WEAK):
        notes = doc.group("annotations")
        for s in ordered:
            if s.key.family is not Family.WEAK:
                continue
            base_t = s.points[0].mean
            for i, (p, (cx, cy)) in enumerate(zip(s.points, coords_of(s, x_axis, y_axis))):
                slowdown = 1.0 if i == 0 else p.mean / base_t
                notes.add(text(cx + 6, cy - 6, format_slowdown(slowdown), **{
                    "class": "annotation", "data_series": str(s.key), "font_size": 11,
                }))

    if kind is ChartKind.THROUGHPUT:
        oom = doc.group("oom")
        for s in ordered:
            if s.oom_after is None:
                continue
            p = next(p for p in s.points if p.x == s.oom_after)
            cx, cy = x_axis.to_px(p.x), y_axis.to_px(p.mean)
            oom.add(text(cx + 8, cy + 4, "OOM", **{
                "class": "oom", "data_series": str(s.key), "data_x": format_data(p.x),
                "fill": styles[s.key].color, "font_size": 11, "font_weight": "bold",
            }))

    _draw_legend(doc, spec, ordered, styles, kind)
    return doc.to_bytes()


def coords_of(s: ChartSeries, x_axis: LogAxis, y_axis: LogAxis) -> List[Tuple[float, float]]:
    return [(x_axis.to_px(p.x), y_axis.to_px(p.mean)) for p in s.points]


def _draw_grid(doc: SvgDocument, x_axis: LogAxis, y_axis: LogAxis, base: int):
    grid = doc.group("grid", stroke="#dddddd")
    labels = doc.group("tick-labels", font_size=11)
    top = y_axis.offset
    bottom = y_axis.offset + y_axis.pixel_span
    left = x_axis.offset
    right = x_axis.offset + x_axis.pixel_span
    for tick in x_axis.ticks():
        grid.add(line(tick.pixel, top, tick.pixel, bottom,
                      **{"class": "gridline x", "data_value": format_data(tick.value)}))
        labels.add(text(tick.pixel, bottom + 18, format_tick(tick.value, base),
                        **{"class": "tick-label x", "text_anchor": "middle"}))
    for tick in y_axis.ticks():
        grid.add(line(left, tick.pixel, right, tick.pixel,
                      **{"class": "gridline y", "data_value": format_data(tick.value)}))
        labels.add(text(left - 8, tick.pixel + 4, format_tick(tick.value, base),
                        **{"class": "tick-label y", "text_anchor": "end"}))
    doc.add(rect(left, top, x_axis.pixel_span, y_axis.pixel_span,
                 **{"class": "frame", "fill": "none", "stroke": "#333333"}))


def _draw_legend(doc: SvgDocument, spec: ChartSpec, ordered: Sequence[ChartSeries],
                 styles: Dict[SeriesKey, SeriesStyle], kind: ChartKind):
    legend = doc.group("legend", font_size=11)
    labels = [s.key.label for s in ordered]
    with_param = kind is ChartKind.STRONG_WEAK or len(set(labels)) != len(labels)
    x0 = spec.width_px - MARGIN_RIGHT + 16
    y = MARGIN_TOP + 10
    for s in ordered:
        style = styles[s.key]
        legend.add(line(x0, y, x0 + 24, y, **{
            "stroke": style.color, "stroke_width": 2, "stroke_dasharray": style.dash,
        }))
        legend.add(text(x0 + 30, y + 4, legend_label(s.key, with_param),
                        **{"class": "legend-label", "data_series": str(s.key)}))
        y += LEGEND_ROW
