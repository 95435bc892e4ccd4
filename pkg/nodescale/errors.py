# -*- coding: utf-8 -*-

"""
nodescale 的异常类型

所有可预期的用户/输入错误都继承自 NodescaleError，命令行层据此返回退出码 1。
"""

from dataclasses import dataclass
from typing import Any, Sequence


@dataclass(frozen=True)
class Invalid:
    """单个字段的校验失败"""
    field: str
    reason: str

    def __str__(self):
        return f"{self.field}: {self.reason}"


class NodescaleError(Exception):
    """nodescale 错误基类"""


def _join_issues(issues: Sequence[Invalid]) -> str:
    return "; ".join(str(issue) for issue in issues)


# ---- study_model ----

class RecordValidationError(NodescaleError):
    """运行记录不满足类型约束，issues 中包含全部违反项"""

    def __init__(self, issues: Sequence[Invalid]):
        self.issues = list(issues)
        super().__init__(_join_issues(self.issues))


class DuplicatePointError(NodescaleError):
    """同一序列的同一 x 上出现了两条非集合（repeat_index 相同）记录"""

    def __init__(self, key: Any, x: int):
        self.key = key
        self.x = x
        super().__init__(f"序列 {key} 在 x={x} 处存在重复记录")


# ---- planner ----

class SpecValidationError(NodescaleError):
    """研究描述（StudySpec）无效"""

    def __init__(self, issues: Sequence[Invalid]):
        self.issues = list(issues)
        super().__init__(_join_issues(self.issues))


class RefinementOverflowError(NodescaleError):
    """加密后的单元数超出 64 位整数范围"""


class LadderNotIncreasingError(NodescaleError):
    """吞吐量研究的 DOF 阶梯为空或不是严格递增"""


class UnknownPlaceholderError(NodescaleError):
    """命令模板中出现未定义的占位符"""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"未知的占位符: {{{name}}}")


class UnsubstitutedPlaceholderError(NodescaleError):
    """命令模板中的占位符没有可替换的值，或花括号不成对"""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"占位符未被替换: {name}")


class PlaceholderFormatError(NodescaleError):
    """占位符的格式说明与取值不匹配，如对字符串使用 04d"""

    def __init__(self, name: str, format_spec: str, reason: str):
        self.name = name
        self.format_spec = format_spec
        super().__init__(f"占位符 {{{name}:{format_spec}}} 无法格式化: {reason}")


# ---- ingest ----

class FilterSyntaxError(NodescaleError):
    """过滤表达式语法错误"""


class TypeMismatchError(NodescaleError):
    """数值比较遇到了非数值"""

    def __init__(self, key: str, value: Any = None):
        self.key = key
        self.value = value
        super().__init__(f"字段 {key} 的值 {value!r} 不是数值，无法进行大小比较")


class EmptyEnsembleError(NodescaleError):
    """集合中没有任何成功（ok）的运行"""


class InconsistentEnsembleError(NodescaleError):
    """集合中的运行节点数或自由度不一致"""


class RecordParseError(NodescaleError):
    """记录文件中存在无法解析的行（严格模式，或没有任何有效记录）"""

    def __init__(self, errors: Sequence[Any]):
        self.errors = list(errors)
        super().__init__(f"{len(self.errors)} 行记录无法解析")


# ---- metrics ----

class NotOkError(NodescaleError):
    """对非 ok 状态的记录求时间类指标"""


class EmptySeriesError(NodescaleError):
    """序列中没有可用的 ok 数据点"""


class FamilyMismatchError(NodescaleError):
    """序列所属的扩展族与指标不匹配"""


class MissingPointError(NodescaleError):
    """序列在指定节点数处没有 ok 数据点"""

    def __init__(self, series: Any, n: int):
        self.series = series
        self.n = n
        super().__init__(f"序列 {series} 在 x={n} 处没有成功的数据点")


class OutOfRangeError(NodescaleError):
    """查询值超出已观测范围（不做外推）"""


class TooFewPointsError(NodescaleError):
    """数据点不足以完成计算"""


# ---- synthmodel ----

class ModelValidationError(NodescaleError):
    """平台模型参数无效"""

    def __init__(self, issues: Sequence[Invalid]):
        self.issues = list(issues)
        super().__init__(_join_issues(self.issues))


class UnknownPlatformError(NodescaleError):
    """模型文件中没有对应平台"""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"模型文件中未找到平台: {name}")


# ---- charts ----

class NonPositiveValueError(NodescaleError):
    """对数坐标轴上出现了非正值"""


class EmptyChartError(NodescaleError):
    """图表中没有可绘制的序列"""


class ChartLayoutError(NodescaleError):
    """图表尺寸过小，或理想线引用了图表中不存在的序列"""


# ---- config ----

class ConfigError(NodescaleError):
    """配置文件格式或取值错误"""
