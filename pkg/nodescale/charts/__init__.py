# -*- coding: utf-8 -*-
"""
确定性的 SVG 扩展性图表
"""

from .axis import LogAxis, Tick, layout_log_axis
from .render import (
    Annotation, ChartKind, ChartSeries, ChartSpec, SeriesStyle, format_slowdown, render_chart,
)
