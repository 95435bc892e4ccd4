# -*- coding: utf-8 -*-
"""
研究数据模型 - 运行记录、序列键、序列与指标点，以及记录校验和序列分组
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from ..errors import DuplicatePointError, Invalid, RecordValidationError

logger = logging.getLogger(__name__)


class RunStatus(str, Enum):
    OK = "ok"
    OOM = "oom"
    FAILED = "failed"


class Family(str, Enum):
    """扩展族：决定序列的分组方式和横轴含义"""
    STRONG = "strong"
    WEAK = "weak"
    THROUGHPUT = "throughput"


class MetricKind(str, Enum):
    TIME_PER_CYCLE = "time_per_cycle_s"
    SPEEDUP = "speedup"
    EFFICIENCY = "efficiency"
    SLOWDOWN = "slowdown"
    THROUGHPUT = "throughput"


# 序列化时的字段顺序，与 JSON-lines 格式一致
RECORD_FIELDS = (
    "study_id", "platform", "variant", "problem", "nodes", "ranks_per_node",
    "cycles", "wall_time_s", "dofs_total", "refinement_level", "status",
    "repeat_index", "metadata",
)


@dataclass(frozen=True)
class RunRecord:
    """一次已执行（或模拟）的运行"""
    study_id: str
    platform: str
    problem: str
    nodes: int
    cycles: int
    dofs_total: int
    status: RunStatus = RunStatus.OK
    wall_time_s: Optional[float] = None
    variant: str = ""
    ranks_per_node: Optional[int] = None
    refinement_level: Optional[int] = None
    repeat_index: int = 0
    metadata: Mapping[str, str] = field(default_factory=dict, hash=False)

    @property
    def is_ok(self) -> bool:
        return self.status is RunStatus.OK

    def to_dict(self) -> Dict[str, Any]:
        data = {name: getattr(self, name) for name in RECORD_FIELDS}
        data["status"] = self.status.value
        data["metadata"] = dict(sorted(self.metadata.items()))
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunRecord":
        """从 JSON 对象构造并校验记录"""
        return validate_record(data)

    def sort_key(self) -> Tuple:
        return (self.study_id, self.platform, self.variant, self.problem,
                self.nodes, self.dofs_total, self.repeat_index, self.status.value)


@dataclass(frozen=True, order=True)
class SeriesKey:
    """同一张图上同一条曲线的比较键"""
    platform: str
    variant: str
    problem: str
    family: Family
    family_param: int = 0

    @property
    def label(self) -> str:
        label = self.platform
        if self.variant:
            label += f" [{self.variant}]"
        return label

    def to_dict(self) -> Dict[str, Any]:
        return {
            "platform": self.platform,
            "variant": self.variant,
            "problem": self.problem,
            "family": self.family.value,
            "family_param": self.family_param,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SeriesKey":
        return cls(
            platform=str(data["platform"]),
            variant=str(data.get("variant") or ""),
            problem=str(data["problem"]),
            family=Family(data["family"]),
            family_param=int(data.get("family_param", 0)),
        )

    def __str__(self):
        return f"{self.label}/{self.problem}/{self.family.value}:{self.family_param}"


@dataclass(frozen=True)
class SeriesPoint:
    """序列上的一个 x 位置；records 是该位置的整个集合（按 repeat_index 排序）"""
    x: int
    records: Tuple[RunRecord, ...]

    @property
    def ok_records(self) -> Tuple[RunRecord, ...]:
        return tuple(r for r in self.records if r.is_ok)

    @property
    def is_ok(self) -> bool:
        return any(r.is_ok for r in self.records)

    @property
    def is_oom(self) -> bool:
        return not self.is_ok and any(r.status is RunStatus.OOM for r in self.records)

    @property
    def record(self) -> RunRecord:
        ok = self.ok_records
        return ok[0] if ok else self.records[0]


@dataclass(frozen=True)
class Series:
    """一条曲线：按 x 严格递增排列的数据点"""
    key: SeriesKey
    points: Tuple[SeriesPoint, ...]

    @property
    def family(self) -> Family:
        return self.key.family

    @property
    def ok_points(self) -> Tuple[SeriesPoint, ...]:
        return tuple(p for p in self.points if p.is_ok)

    @property
    def records(self) -> List[RunRecord]:
        return [r for p in self.points for r in p.records]

    def point_at(self, x: int) -> Optional[SeriesPoint]:
        for point in self.points:
            if point.x == x:
                return point
        return None


@dataclass(frozen=True)
class MetricPoint:
    x: int
    value: float
    kind: MetricKind


# ---- 校验 ----

def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return (_is_int(value) or isinstance(value, float)) and math.isfinite(value)


def _check_int(issues, name, value, minimum, optional=False):
    if value is None:
        if not optional:
            issues.append(Invalid(name, "is required"))
        return
    if not _is_int(value):
        issues.append(Invalid(name, "must be an integer"))
    elif value < minimum:
        issues.append(Invalid(name, f"must be ≥ {minimum}"))


def _check_str(issues, name, value, allow_empty=False):
    if not isinstance(value, str):
        issues.append(Invalid(name, "must be a string"))
    elif not allow_empty and not value:
        issues.append(Invalid(name, "must not be empty"))


def validate_record(raw: Union[RunRecord, Mapping[str, Any]]) -> RunRecord:
    """
    校验一条运行记录，返回规范化后的 RunRecord

    Args:
        raw: RunRecord 或与 JSON-lines 字段同名的映射

    Returns:
        RunRecord: 校验通过的记录，缺省的 variant 规范化为 ""

    Raises:
        RecordValidationError: 汇总全部违反项，而不仅是第一个
    """
    data = raw.to_dict() if isinstance(raw, RunRecord) else dict(raw)
    issues: List[Invalid] = []

    unknown = sorted(set(data) - set(RECORD_FIELDS))
    for name in unknown:
        issues.append(Invalid(name, "unknown field"))

    study_id = data.get("study_id")
    platform = data.get("platform")
    problem = data.get("problem")
    variant = data.get("variant")
    if variant is None:
        variant = ""
    _check_str(issues, "study_id", study_id)
    _check_str(issues, "platform", platform)
    _check_str(issues, "problem", problem)
    _check_str(issues, "variant", variant, allow_empty=True)

    nodes = data.get("nodes")
    cycles = data.get("cycles")
    dofs_total = data.get("dofs_total")
    _check_int(issues, "nodes", nodes, 1)
    _check_int(issues, "cycles", cycles, 1)
    _check_int(issues, "dofs_total", dofs_total, 1)
    _check_int(issues, "ranks_per_node", data.get("ranks_per_node"), 1, optional=True)
    _check_int(issues, "refinement_level", data.get("refinement_level"), 0, optional=True)
    repeat_index = data.get("repeat_index")
    if repeat_index is None:
        repeat_index = 0
    _check_int(issues, "repeat_index", repeat_index, 0)

    status = data.get("status", RunStatus.OK.value)
    try:
        status = RunStatus(status)
    except ValueError:
        issues.append(Invalid("status", "must be one of ok, oom, failed"))
        status = None

    wall_time_s = data.get("wall_time_s")
    if wall_time_s is None:
        if status is RunStatus.OK:
            issues.append(Invalid("wall_time_s", "is required when status = ok"))
    elif not _is_number(wall_time_s):
        issues.append(Invalid("wall_time_s", "must be a finite real"))
    elif wall_time_s <= 0:
        issues.append(Invalid("wall_time_s", "must be > 0"))

    if (status is RunStatus.OK and _is_int(nodes) and _is_int(dofs_total)
            and nodes >= 1 and dofs_total < nodes):
        issues.append(Invalid("dofs_total", "must be ≥ nodes when status = ok"))

    metadata = data.get("metadata")
    if metadata is None:
        metadata = {}
    if not isinstance(metadata, Mapping):
        issues.append(Invalid("metadata", "must be an object"))
        metadata = {}
    else:
        normalized = {}
        for key, value in metadata.items():
            if not isinstance(key, str):
                issues.append(Invalid("metadata", f"key {key!r} must be a string"))
            elif isinstance(value, str):
                normalized[key] = value
            elif _is_number(value) or isinstance(value, bool):
                normalized[key] = json_scalar_str(value)
            else:
                issues.append(Invalid(f"metadata.{key}", "must be a string or a number"))
        metadata = normalized

    if issues:
        raise RecordValidationError(issues)

    return RunRecord(
        study_id=study_id,
        platform=platform,
        problem=problem,
        nodes=nodes,
        cycles=cycles,
        dofs_total=dofs_total,
        status=status,
        wall_time_s=float(wall_time_s) if wall_time_s is not None else None,
        variant=variant,
        ranks_per_node=data.get("ranks_per_node"),
        refinement_level=data.get("refinement_level"),
        repeat_index=repeat_index,
        metadata=dict(sorted(metadata.items())),
    )


def json_scalar_str(value: Any) -> str:
    """将 JSON 标量转为元数据字符串（布尔值使用 JSON 写法）"""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def dofs_per_node(r: RunRecord) -> float:
    """每个节点上的自由度数，可以不是整数"""
    if r.status is RunStatus.FAILED:
        raise ValueError("失败的记录没有有效的问题规模")
    return r.dofs_total / r.nodes


# ---- 分组 ----

def log2_bucket(value: float) -> int:
    """最近整数的 log2 分桶（.5 处向上取整，保证确定性）"""
    return math.floor(math.log2(value) + 0.5)


def series_key(record: RunRecord, family: Family) -> SeriesKey:
    family = Family(family)
    if family is Family.STRONG:
        param = log2_bucket(record.dofs_total)
    elif family is Family.WEAK:
        param = log2_bucket(dofs_per_node(record))
    else:
        param = 0
    return SeriesKey(record.platform, record.variant, record.problem, family, param)


def series_x(record: RunRecord, family: Family) -> int:
    return record.dofs_total if Family(family) is Family.THROUGHPUT else record.nodes


def split_failed(records: Iterable[RunRecord]) -> Tuple[List[RunRecord], List[RunRecord]]:
    """拆分出失败记录：(可用记录, 失败记录)"""
    usable, failed = [], []
    for record in records:
        (failed if record.status is RunStatus.FAILED else usable).append(record)
    return usable, failed


def group_series(records: Iterable[RunRecord], family: Union[Family, str]) -> List[Series]:
    """
    按 SeriesKey 将 ok/oom 记录划分为序列

    同一 x 上 repeat_index 不同的记录视为一个集合（ensemble）；
    repeat_index 相同则视为冲突。

    Raises:
        DuplicatePointError: 同一序列同一 x 上出现重复记录
    """
    family = Family(family)
    usable, failed = split_failed(records)
    if failed:
        logger.warning("分组时排除了 %d 条失败记录", len(failed))

    buckets: Dict[SeriesKey, Dict[int, List[RunRecord]]] = {}
    for record in usable:
        key = series_key(record, family)
        x = series_x(record, family)
        ensemble = buckets.setdefault(key, {}).setdefault(x, [])
        if any(other.repeat_index == record.repeat_index for other in ensemble):
            raise DuplicatePointError(key, x)
        ensemble.append(record)

    result = []
    for key in sorted(buckets):
        points = tuple(
            SeriesPoint(x, tuple(sorted(ensemble, key=lambda r: (r.repeat_index, r.sort_key()))))
            for x, ensemble in sorted(buckets[key].items())
        )
        result.append(Series(key, points))
    return result
