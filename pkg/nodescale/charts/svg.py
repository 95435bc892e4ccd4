# -*- coding: utf-8 -*-
"""
最小化的 SVG 写入器 - 元素和属性按插入顺序输出，数值统一格式化，保证逐字节可复现
"""

from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

Point = Tuple[float, float]


def fmt_num(value: Any) -> str:
    """坐标保留 3 位小数；-0.000 规范化为 0.000"""
    if isinstance(value, float):
        text = f"{value:.3f}"
        return "0.000" if text == "-0.000" else text
    return str(value)


def fmt_points(points: Iterable[Point]) -> str:
    return " ".join(f"{fmt_num(float(x))},{fmt_num(float(y))}" for x, y in points)


class SvgElement:
    """一个 SVG 元素；attrs 中值为 None 的属性不输出"""

    def __init__(self, tag: str, attrs: Optional[Dict[str, Any]] = None, text: Optional[str] = None):
        self.tag = tag
        self.attrs = {k: v for k, v in (attrs or {}).items() if v is not None}
        self.text = text
        self.children: List["SvgElement"] = []

    def add(self, child: "SvgElement") -> "SvgElement":
        self.children.append(child)
        return child

    def render(self, out: List[str], depth: int = 0):
        indent = "  " * depth
        attrs = "".join(f" {name.replace('_', '-')}={quoteattr(fmt_num(value))}"
                        for name, value in self.attrs.items())
        if self.text is not None:
            out.append(f"{indent}<{self.tag}{attrs}>{escape(self.text)}</{self.tag}>")
        elif self.children:
            out.append(f"{indent}<{self.tag}{attrs}>")
            for child in self.children:
                child.render(out, depth + 1)
            out.append(f"{indent}</{self.tag}>")
        else:
            out.append(f"{indent}<{self.tag}{attrs}/>")


class SvgDocument(SvgElement):
    """独立的 SVG 1.1 文档"""

    def __init__(self, width: int, height: int):
        super().__init__("svg", {
            "xmlns": "http://www.w3.org/2000/svg",
            "version": "1.1",
            "width": width,
            "height": height,
            "viewBox": f"0 0 {width} {height}",
        })

    def group(self, css_class: str, **attrs) -> SvgElement:
        return self.add(SvgElement("g", {"class": css_class, **attrs}))

    def to_bytes(self) -> bytes:
        out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>']
        self.render(out)
        return ("\n".join(out) + "\n").encode("utf-8")


# ---- 常用元素 ----

def line(x1: float, y1: float, x2: float, y2: float, **attrs) -> SvgElement:
    return SvgElement("line", {"x1": x1, "y1": y1, "x2": x2, "y2": y2, **attrs})


def polyline(points: Sequence[Point], **attrs) -> SvgElement:
    return SvgElement("polyline", {"points": fmt_points(points), "fill": "none", **attrs})


def polygon(points: Sequence[Point], **attrs) -> SvgElement:
    return SvgElement("polygon", {"points": fmt_points(points), **attrs})


def circle(cx: float, cy: float, r: float, **attrs) -> SvgElement:
    return SvgElement("circle", {"cx": cx, "cy": cy, "r": r, **attrs})


def rect(x: float, y: float, width: float, height: float, **attrs) -> SvgElement:
    return SvgElement("rect", {"x": x, "y": y, "width": width, "height": height, **attrs})


def text(x: float, y: float, content: str, **attrs) -> SvgElement:
    return SvgElement("text", {"x": x, "y": y, **attrs}, text=content)
