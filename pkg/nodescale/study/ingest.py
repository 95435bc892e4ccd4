# -*- coding: utf-8 -*-
"""
数据读取模块 - 解析 JSON-lines 运行记录、按元数据过滤、聚合集合并输出表格
"""

import csv
import io
import json
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import IO, Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import (
    EmptyEnsembleError, FilterSyntaxError, InconsistentEnsembleError, RecordValidationError,
    TypeMismatchError,
)
from .metrics import MetricSequence, time_per_cycle
from .model import MetricKind, RunRecord, Series, validate_record

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParseError:
    """某一行无法解析为运行记录"""
    line_number: int
    reason: str
    source: str = ""

    def __str__(self):
        prefix = f"{self.source}:" if self.source else "line "
        return f"{prefix}{self.line_number}: {self.reason}"


# ---- 解析 ----

def parse_records(stream: Union[IO[bytes], Iterable[bytes], Iterable[str]],
                  source: str = "") -> Tuple[List[RunRecord], List[ParseError]]:
    """
    逐行解析 JSON-lines 输入

    空行会被跳过；格式错误或不满足约束的行产生 ParseError，但不会中断整个流。

    Returns:
        Tuple[List[RunRecord], List[ParseError]]: (记录, 行级错误)
    """
    records: List[RunRecord] = []
    errors: List[ParseError] = []
    for line_number, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                errors.append(ParseError(line_number, "不是有效的 UTF-8", source))
                continue
        else:
            line = raw
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            errors.append(ParseError(line_number, f"JSON 格式错误: {e.msg}", source))
            continue
        if not isinstance(data, dict):
            errors.append(ParseError(line_number, "每一行必须是 JSON 对象", source))
            continue
        try:
            records.append(validate_record(data))
        except RecordValidationError as e:
            errors.append(ParseError(line_number, str(e), source))
    for error in errors:
        logger.debug("解析错误 %s", error)
    return records, errors


def _parse_file(path: str) -> Tuple[List[RunRecord], List[ParseError]]:
    with open(path, "rb") as f:
        return parse_records(f, source=path)


def read_record_files(paths: Sequence[str]) -> Tuple[List[RunRecord], List[ParseError]]:
    """并发解析多个文件，合并后按确定的顺序排序，输出与调度无关"""
    with ThreadPoolExecutor(max_workers=max(1, min(8, len(paths)))) as pool:
        results = list(pool.map(_parse_file, paths))
    records = [r for file_records, _ in results for r in file_records]
    errors = [e for _, file_errors in results for e in file_errors]
    records.sort(key=RunRecord.sort_key)
    return records, errors


def serialize_records(records: Iterable[RunRecord]) -> str:
    return "".join(json.dumps(r.to_dict(), ensure_ascii=False) + "\n" for r in records)


# ---- 过滤 ----

class FilterOp(str, Enum):
    EQ = "eq"
    NE = "ne"
    LT = "lt"
    LE = "le"
    GT = "gt"
    GE = "ge"


_SYMBOLS = {
    "==": FilterOp.EQ, "!=": FilterOp.NE, "<": FilterOp.LT,
    "<=": FilterOp.LE, ">": FilterOp.GT, ">=": FilterOp.GE,
}

_COMPARE: Dict[FilterOp, Callable[[Any, Any], bool]] = {
    FilterOp.EQ: lambda a, b: a == b,
    FilterOp.NE: lambda a, b: a != b,
    FilterOp.LT: lambda a, b: a < b,
    FilterOp.LE: lambda a, b: a <= b,
    FilterOp.GT: lambda a, b: a > b,
    FilterOp.GE: lambda a, b: a >= b,
}

_CLAUSE_RE = re.compile(r"""^\s*([A-Za-z_][\w.\-]*)\s*(==|!=|<=|>=|<|>)\s*("[^"]*"|'[^']*'|[^\s=<>!"']\S*)\s*$""")
# 引号只在值的开头起作用，如 o'brien 中的撇号不算引号
_SPLIT_RE = re.compile(r"""(?<![^\s=<>!])("[^"]*"|'[^']*')|\s+and\s+""")

BUILTIN_FIELDS = (
    "study_id", "platform", "variant", "problem", "nodes", "ranks_per_node", "cycles",
    "wall_time_s", "dofs_total", "refinement_level", "status", "repeat_index",
)


def _split_clauses(expr: str) -> List[str]:
    """按引号之外的 and 切分子句"""
    parts, start = [], 0
    for match in _SPLIT_RE.finditer(expr):
        if match.group(1) is None:
            parts.append(expr[start:match.start()])
            start = match.end()
    parts.append(expr[start:])
    return parts


def _as_number(value: Any) -> Optional[float]:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            number = float(value)
        except ValueError:
            return None
        return number if math.isfinite(number) else None
    return None


@dataclass(frozen=True)
class FilterClause:
    key: str
    op: FilterOp
    value: Union[str, int, float]

    def lookup(self, record: RunRecord) -> Any:
        """先查内置字段，再查元数据；不存在时返回 None"""
        if self.key in BUILTIN_FIELDS:
            value = getattr(record, self.key)
            return value.value if isinstance(value, Enum) else value
        return record.metadata.get(self.key)

    def matches(self, record: RunRecord) -> bool:
        actual = self.lookup(record)
        if actual is None:
            return False
        left, right = _as_number(actual), _as_number(self.value)
        if self.op in (FilterOp.EQ, FilterOp.NE):
            if left is not None and right is not None:
                return _COMPARE[self.op](left, right)
            return _COMPARE[self.op](str(actual), str(self.value))
        if left is None:
            raise TypeMismatchError(self.key, actual)
        if right is None:
            raise TypeMismatchError(self.key, self.value)
        return _COMPARE[self.op](left, right)


@dataclass(frozen=True)
class MetadataFilter:
    """所有子句的逻辑与；空子句列表匹配全部记录"""
    clauses: Tuple[FilterClause, ...] = ()

    def matches(self, record: RunRecord) -> bool:
        return all(clause.matches(record) for clause in self.clauses)

    def __and__(self, other: "MetadataFilter") -> "MetadataFilter":
        return MetadataFilter(self.clauses + other.clauses)

    @classmethod
    def parse(cls, expr: Optional[str]) -> "MetadataFilter":
        """
        解析过滤表达式，语法为 `key op value`，子句之间用 and 连接

        例如 `platform == CTS-1 and nodes >= 4`；值可以用引号包裹。
        """
        if expr is None or not expr.strip():
            return cls()
        clauses = []
        for part in _split_clauses(expr.strip()):
            match = _CLAUSE_RE.match(part)
            if not match:
                raise FilterSyntaxError(f"无法解析过滤子句: {part!r}")
            key, symbol, value = match.groups()
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
                value = value[1:-1]
            clauses.append(FilterClause(key, _SYMBOLS[symbol], value))
        return cls(tuple(clauses))


def filter_records(records: Iterable[RunRecord], f: MetadataFilter) -> List[RunRecord]:
    return [r for r in records if f.matches(r)]


# ---- 集合聚合 ----

class BandStat(str, Enum):
    MINMAX = "minmax"
    STDDEV = "stddev"


@dataclass(frozen=True)
class AggregatedPoint:
    """集合均值及波动带，lo ≤ mean ≤ hi"""
    x: int
    mean: float
    lo: float
    hi: float
    n: int


ValueFn = Callable[[RunRecord], float]


def aggregate_ensemble(records: Sequence[RunRecord], stat: Union[BandStat, str] = BandStat.MINMAX,
                       x: Optional[int] = None, value: ValueFn = time_per_cycle) -> AggregatedPoint:
    """
    将同一 (SeriesKey, x) 上的重复运行聚合为均值和波动带

    Args:
        records: 集合中的记录，只使用 ok 记录
        stat: minmax 取最小/最大值；stddev 取均值 ∓ 样本标准差（下界不低于最小观测值）
        x: 数据点的横坐标，默认取节点数
        value: 被聚合的量，默认为每周期时间

    Raises:
        EmptyEnsembleError: 没有 ok 记录
        InconsistentEnsembleError: 节点数或总自由度不一致
    """
    stat = BandStat(stat)
    ok = [r for r in records if r.is_ok]
    if not ok:
        raise EmptyEnsembleError("集合中没有 ok 记录")
    first = ok[0]
    for r in ok[1:]:
        if r.nodes != first.nodes or r.dofs_total != first.dofs_total:
            raise InconsistentEnsembleError(
                f"集合中的记录不一致: nodes {first.nodes}/{r.nodes}, dofs_total {first.dofs_total}/{r.dofs_total}"
            )

    values = sorted(value(r) for r in ok)
    n = len(values)
    mean = math.fsum(values) / n
    lowest, highest = values[0], values[-1]
    mean = min(max(mean, lowest), highest)
    if stat is BandStat.MINMAX or n == 1:
        lo, hi = lowest, highest
    else:
        sd = float(np.std(np.array(values), ddof=1))
        lo, hi = max(mean - sd, lowest), mean + sd
    if n == 1:
        lo = hi = mean
    return AggregatedPoint(x=first.nodes if x is None else x, mean=mean, lo=lo, hi=hi, n=n)


def aggregate_series(series: Series, stat: Union[BandStat, str] = BandStat.MINMAX,
                     value: ValueFn = time_per_cycle) -> List[AggregatedPoint]:
    """对序列的每个 ok 点做集合聚合"""
    return [aggregate_ensemble(p.ok_records, stat, x=p.x, value=value) for p in series.ok_points]


# ---- 表格输出 ----

TABLE_KEY_COLUMNS = ("platform", "variant", "problem", "family", "family_param")
TABLE_POINT_COLUMNS = ("x", "status", "n", "time_per_cycle_s", "time_lo_s", "time_hi_s")
METRIC_COLUMN_ORDER = (
    MetricKind.SPEEDUP, MetricKind.EFFICIENCY, MetricKind.SLOWDOWN, MetricKind.THROUGHPUT,
)


def format_number(value: Optional[float]) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def table_header(metric_kinds: Iterable[MetricKind]) -> List[str]:
    kinds = set(metric_kinds)
    extra = [k.value for k in METRIC_COLUMN_ORDER if k in kinds]
    return list(TABLE_KEY_COLUMNS) + list(TABLE_POINT_COLUMNS) + ["baseline_x"] + extra


def to_table(series: Sequence[Series], metrics: Sequence[Sequence[MetricSequence]],
             stat: Union[BandStat, str] = BandStat.MINMAX) -> List[List[str]]:
    """
    生成表格行（首行为表头）

    每个 (序列, x) 一行，按 (platform, variant, problem, family, family_param, x) 排序；
    列顺序固定：键字段、x、状态、集合大小、每周期时间及波动带、基准节点数、各项指标。
    oom 点保留一行但不带时间和指标。
    """
    if len(metrics) != len(series):
        raise ValueError("metrics 必须与 series 一一对应")
    kinds = {seq.kind for seqs in metrics for seq in seqs}
    header = table_header(kinds)
    ordered_kinds = [k for k in METRIC_COLUMN_ORDER if k in kinds]

    body = []
    for s, seqs in zip(series, metrics):
        by_kind = {seq.kind: seq for seq in seqs}
        baseline = next((seq.baseline_x for seq in seqs if seq.baseline_x is not None), None)
        for point in s.points:
            row_key = (s.key.platform, s.key.variant, s.key.problem, s.key.family.value,
                       s.key.family_param, point.x)
            if point.is_ok:
                agg = aggregate_ensemble(point.ok_records, stat, x=point.x)
                status, n, cells = "ok", agg.n, [agg.mean, agg.lo, agg.hi]
            else:
                status = point.record.status.value
                n, cells = len(point.records), [None, None, None]
            metric_cells = [
                by_kind[k].value_at(point.x) if k in by_kind else None for k in ordered_kinds
            ]
            row = [s.key.platform, s.key.variant, s.key.problem, s.key.family.value,
                   str(s.key.family_param), str(point.x), status, str(n)]
            row += [format_number(v) for v in cells]
            row.append(format_number(baseline))
            row += [format_number(v) for v in metric_cells]
            body.append((row_key, row))
    body.sort(key=lambda item: item[0])
    return [header] + [row for _, row in body]


def write_csv(rows: Sequence[Sequence[str]]) -> str:
    """RFC-4180 风格 CSV（CRLF 换行，必要时加引号）"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerows(rows)
    return buffer.getvalue()
