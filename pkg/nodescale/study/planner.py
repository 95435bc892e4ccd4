# -*- coding: utf-8 -*-
"""
研究规划模块 - 将声明式的研究描述展开为具体的运行矩阵和命令字符串
"""

import json
import logging
import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from ..errors import (
    Invalid, LadderNotIncreasingError, PlaceholderFormatError, RefinementOverflowError,
    SpecValidationError, UnknownPlaceholderError, UnsubstitutedPlaceholderError,
)
from .model import Family, SeriesKey, log2_bucket

logger = logging.getLogger(__name__)

INT64_MAX = 2 ** 63 - 1
MAX_DOUBLINGS = 30
MAX_REFINEMENTS = 30

# 命令模板中允许使用的占位符
PLACEHOLDERS = frozenset({
    "nodes", "dofs_total", "refinement_level", "cycles", "platform", "study_id",
    "variant", "problem", "ranks_per_node",
})


class StudyKind(str, Enum):
    STRONG = "strong"
    WEAK = "weak"
    STRONG_WEAK = "strong_weak"
    THROUGHPUT = "throughput"


@dataclass(frozen=True)
class PlatformEntry:
    """研究中参与比较的一个平台（可附带代码/配置变体）"""
    name: str
    variant: str = ""
    ranks_per_node: Optional[int] = None
    metadata: Mapping[str, str] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class StudySpec:
    study_id: str
    kind: StudyKind
    platforms: Tuple[PlatformEntry, ...]
    base_nodes: int = 1
    doublings: int = 0
    base_elements: int = 1
    refinements: int = 0
    dim: int = 3
    dofs_per_element: int = 1
    cycles: int = 1
    dof_ladder: Optional[Tuple[int, ...]] = None
    command_template: str = ""
    problem: str = ""

    @property
    def problem_name(self) -> str:
        return self.problem or self.study_id

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StudySpec":
        return parse_study_spec(data)


@dataclass(frozen=True)
class RunSpec:
    """一次待执行的运行，command 中不含未替换的占位符"""
    study_id: str
    platform: str
    nodes: int
    refinement_level: Optional[int]
    dofs_total: int
    cycles: int
    command: str
    expected_series: SeriesKey
    variant: str = ""
    problem: str = ""
    ranks_per_node: Optional[int] = None
    metadata: Mapping[str, str] = field(default_factory=dict, hash=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "study_id": self.study_id,
            "platform": self.platform,
            "variant": self.variant,
            "problem": self.problem,
            "nodes": self.nodes,
            "ranks_per_node": self.ranks_per_node,
            "refinement_level": self.refinement_level,
            "dofs_total": self.dofs_total,
            "cycles": self.cycles,
            "command": self.command,
            "expected_series": self.expected_series.to_dict(),
            "metadata": dict(sorted(self.metadata.items())),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunSpec":
        try:
            return cls(
                study_id=str(data["study_id"]),
                platform=str(data["platform"]),
                nodes=_require_int(data["nodes"], "nodes", 1),
                refinement_level=data.get("refinement_level"),
                dofs_total=_require_int(data["dofs_total"], "dofs_total", 1),
                cycles=_require_int(data["cycles"], "cycles", 1),
                command=str(data.get("command", "")),
                expected_series=SeriesKey.from_dict(data["expected_series"]),
                variant=str(data.get("variant") or ""),
                problem=str(data.get("problem") or ""),
                ranks_per_node=data.get("ranks_per_node"),
                metadata={str(k): str(v) for k, v in (data.get("metadata") or {}).items()},
            )
        except KeyError as e:
            raise SpecValidationError([Invalid(str(e.args[0]), "is required")]) from None
        except (TypeError, ValueError, AttributeError) as e:
            raise SpecValidationError([Invalid("run_spec", str(e))]) from None


def _require_int(value, name, minimum):
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise SpecValidationError([Invalid(name, f"must be an integer ≥ {minimum}")])
    return value


# ---- 解析与校验 ----

def _int_field(data, issues, name, default, minimum, maximum=None):
    value = data.get(name, default)
    if not isinstance(value, int) or isinstance(value, bool):
        issues.append(Invalid(name, "must be an integer"))
        return default
    if value < minimum:
        issues.append(Invalid(name, f"must be ≥ {minimum}"))
    elif maximum is not None and value > maximum:
        issues.append(Invalid(name, f"must be ≤ {maximum}"))
    return value


def _parse_platform(raw: Any, index: int, issues: List[Invalid]) -> Optional[PlatformEntry]:
    if isinstance(raw, str):
        raw = {"name": raw}
    if not isinstance(raw, Mapping):
        issues.append(Invalid(f"platforms[{index}]", "must be a string or an object"))
        return None
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        issues.append(Invalid(f"platforms[{index}].name", "must be a non-empty string"))
        return None
    ranks = raw.get("ranks_per_node")
    if ranks is not None and (not isinstance(ranks, int) or isinstance(ranks, bool) or ranks < 1):
        issues.append(Invalid(f"platforms[{index}].ranks_per_node", "must be a positive integer"))
        ranks = None
    metadata = raw.get("metadata") or {}
    if not isinstance(metadata, Mapping):
        issues.append(Invalid(f"platforms[{index}].metadata", "must be an object"))
        metadata = {}
    return PlatformEntry(
        name=name,
        variant=str(raw.get("variant") or ""),
        ranks_per_node=ranks,
        metadata={str(k): str(v) for k, v in sorted(metadata.items())},
    )


def template_placeholders(template: str) -> List[str]:
    """列出模板中出现的占位符名称（按出现顺序）"""
    try:
        parsed = list(string.Formatter().parse(template))
    except ValueError as e:
        raise UnsubstitutedPlaceholderError(f"模板花括号不成对: {e}") from None
    return [name for _, name, _, _ in parsed if name is not None]


# 用于校验格式说明的示例取值，类型与展开时一致
_SAMPLE_PARAMS = {
    "nodes": 1, "dofs_total": 1, "refinement_level": 0, "cycles": 1, "ranks_per_node": 1,
    "platform": "platform", "study_id": "study", "variant": "variant", "problem": "problem",
}


def _template_issues(template: str) -> List[Invalid]:
    try:
        names = template_placeholders(template)
    except UnsubstitutedPlaceholderError as e:
        return [Invalid("command_template", str(e))]
    unknown = [name for name in names if name not in PLACEHOLDERS]
    if unknown:
        return [Invalid("command_template", f"unknown placeholder {{{name}}}") for name in unknown]
    try:
        expand_template(template, _SAMPLE_PARAMS)
    except (PlaceholderFormatError, UnsubstitutedPlaceholderError) as e:
        return [Invalid("command_template", str(e))]
    return []


def parse_study_spec(data: Mapping[str, Any]) -> StudySpec:
    """
    解析并校验研究描述（JSON 文档对应的映射）

    Raises:
        SpecValidationError: 汇总全部字段级错误
    """
    if not isinstance(data, Mapping):
        raise SpecValidationError([Invalid("spec", "must be a JSON object")])
    issues: List[Invalid] = []

    study_id = data.get("study_id")
    if not isinstance(study_id, str) or not study_id:
        issues.append(Invalid("study_id", "must be a non-empty string"))
        study_id = ""

    kind = None
    try:
        kind = StudyKind(data.get("kind"))
    except ValueError:
        issues.append(Invalid("kind", "must be one of strong, weak, strong_weak, throughput"))

    platforms: List[PlatformEntry] = []
    raw_platforms = data.get("platforms")
    if not isinstance(raw_platforms, list) or not raw_platforms:
        issues.append(Invalid("platforms", "must be a non-empty list"))
    else:
        for index, raw in enumerate(raw_platforms):
            entry = _parse_platform(raw, index, issues)
            if entry is not None:
                platforms.append(entry)
        labels = [(p.name, p.variant) for p in platforms]
        if len(set(labels)) != len(labels):
            issues.append(Invalid("platforms", "duplicate platform/variant entry"))

    base_nodes = _int_field(data, issues, "base_nodes", 1, 1)
    doublings = _int_field(data, issues, "doublings", 0, 0, MAX_DOUBLINGS)
    base_elements = _int_field(data, issues, "base_elements", 1, 1)
    refinements = _int_field(data, issues, "refinements", 0, 0, MAX_REFINEMENTS)
    dofs_per_element = _int_field(data, issues, "dofs_per_element", 1, 1)
    cycles = _int_field(data, issues, "cycles", 1, 1)
    dim = data.get("dim", 3)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim not in (2, 3):
        issues.append(Invalid("dim", "must be 2 or 3"))
        dim = 3

    ladder = data.get("dof_ladder")
    if ladder is not None:
        if not isinstance(ladder, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in ladder):
            issues.append(Invalid("dof_ladder", "must be a list of positive integers"))
            ladder = None
        else:
            ladder = tuple(ladder)

    template = data.get("command_template", "")
    if not isinstance(template, str):
        issues.append(Invalid("command_template", "must be a string"))
        template = ""
    else:
        issues.extend(_template_issues(template))

    problem = data.get("problem", "")
    if not isinstance(problem, str):
        issues.append(Invalid("problem", "must be a string"))
        problem = ""

    if issues:
        raise SpecValidationError(issues)

    return StudySpec(
        study_id=study_id,
        kind=kind,
        platforms=tuple(platforms),
        base_nodes=base_nodes,
        doublings=doublings,
        base_elements=base_elements,
        refinements=refinements,
        dim=dim,
        dofs_per_element=dofs_per_element,
        cycles=cycles,
        dof_ladder=ladder,
        command_template=template,
        problem=problem,
    )


def load_study_spec(path: str) -> StudySpec:
    with open(path, "r", encoding="utf-8") as f:
        return parse_study_spec(json.load(f))


# ---- 运算 ----

def refine_elements(base: int, levels: int, dim: int) -> int:
    """
    均匀加密后的单元数：每次加密每个单元被 2^dim 个子单元替代

    Raises:
        RefinementOverflowError: 结果超出 64 位有符号整数
    """
    if dim not in (2, 3):
        raise ValueError("dim 必须是 2 或 3")
    # 结果的位数恰为 base.bit_length() + dim × levels，先判断再求幂
    if base.bit_length() + dim * levels > INT64_MAX.bit_length():
        raise RefinementOverflowError(f"{base} 个单元加密 {levels} 次后溢出")
    result = base * (2 ** dim) ** levels
    if result > INT64_MAX:
        raise RefinementOverflowError(f"{base} 个单元加密 {levels} 次后溢出")
    return result


def expand_template(template: str, params: Mapping[str, Any]) -> str:
    """
    替换命令模板中的 {name} 占位符，{{ 和 }} 表示字面量花括号

    Raises:
        UnknownPlaceholderError: 占位符不在允许的集合中
        UnsubstitutedPlaceholderError: 占位符没有对应的值或花括号不成对
        PlaceholderFormatError: 格式说明不适用于占位符的取值
    """
    try:
        parsed = list(string.Formatter().parse(template))
    except ValueError as e:
        raise UnsubstitutedPlaceholderError(f"模板花括号不成对: {e}") from None

    parts = []
    for literal, name, format_spec, conversion in parsed:
        parts.append(literal)
        if name is None:
            continue
        if name not in PLACEHOLDERS:
            raise UnknownPlaceholderError(name)
        value = params.get(name)
        if value is None:
            raise UnsubstitutedPlaceholderError(name)
        if conversion:
            raise UnsubstitutedPlaceholderError(f"{name}!{conversion}")
        try:
            parts.append(format(value, format_spec or ""))
        except (ValueError, TypeError) as e:
            raise PlaceholderFormatError(name, format_spec, str(e)) from None
    return "".join(parts)


def _run(spec: StudySpec, platform: PlatformEntry, nodes: int, refinement_level: Optional[int],
         dofs_total: int, family: Family) -> RunSpec:
    if dofs_total < nodes:
        raise SpecValidationError([Invalid(
            "doublings", f"{nodes} nodes exceed dofs_total {dofs_total}; each node needs at least one dof")])
    problem = spec.problem_name
    params = {
        "nodes": nodes,
        "dofs_total": dofs_total,
        "refinement_level": refinement_level,
        "cycles": spec.cycles,
        "platform": platform.name,
        "study_id": spec.study_id,
        "variant": platform.variant,
        "problem": problem,
        "ranks_per_node": platform.ranks_per_node,
    }
    if family is Family.STRONG:
        param = log2_bucket(dofs_total)
    elif family is Family.WEAK:
        param = log2_bucket(dofs_total / nodes)
    else:
        param = 0
    return RunSpec(
        study_id=spec.study_id,
        platform=platform.name,
        nodes=nodes,
        refinement_level=refinement_level,
        dofs_total=dofs_total,
        cycles=spec.cycles,
        command=expand_template(spec.command_template, params),
        expected_series=SeriesKey(platform.name, platform.variant, problem, family, param),
        variant=platform.variant,
        problem=problem,
        ranks_per_node=platform.ranks_per_node,
        metadata=platform.metadata,
    )


def _check_kind(spec: StudySpec, kind: StudyKind):
    if spec.kind is not kind:
        raise SpecValidationError([Invalid("kind", f"expected {kind.value}, got {spec.kind.value}")])


def _dofs(spec: StudySpec, level: int) -> int:
    dofs = refine_elements(spec.base_elements, level, spec.dim) * spec.dofs_per_element
    if dofs > INT64_MAX:
        raise RefinementOverflowError(f"加密级别 {level} 的自由度溢出")
    return dofs


def plan_strong(spec: StudySpec) -> List[RunSpec]:
    """强扩展：每个平台上节点数逐次翻倍，总自由度固定"""
    _check_kind(spec, StudyKind.STRONG)
    dofs_total = _dofs(spec, spec.refinements)
    runs = []
    for platform in spec.platforms:
        for i in range(spec.doublings + 1):
            runs.append(_run(spec, platform, spec.base_nodes * 2 ** i, spec.refinements,
                             dofs_total, Family.STRONG))
    return runs


def plan_weak(spec: StudySpec) -> List[RunSpec]:
    """弱扩展：每次均匀加密，节点数乘以 2^dim，每节点自由度不变"""
    _check_kind(spec, StudyKind.WEAK)
    factor = 2 ** spec.dim
    runs = []
    for platform in spec.platforms:
        for level in range(spec.refinements + 1):
            runs.append(_run(spec, platform, spec.base_nodes * factor ** level, level,
                             _dofs(spec, level), Family.WEAK))
    return runs


def plan_strong_weak(spec: StudySpec) -> List[RunSpec]:
    """强弱组合：加密级别 × 节点翻倍 的网格，expected_series 记录强扩展键"""
    _check_kind(spec, StudyKind.STRONG_WEAK)
    runs = []
    for platform in spec.platforms:
        for level in range(spec.refinements + 1):
            dofs_total = _dofs(spec, level)
            for j in range(spec.doublings + 1):
                runs.append(_run(spec, platform, spec.base_nodes * 2 ** j, level,
                                 dofs_total, Family.STRONG))
    return runs


def plan_throughput(spec: StudySpec) -> List[RunSpec]:
    """吞吐量：单节点上沿 DOF 阶梯逐级增大问题规模"""
    _check_kind(spec, StudyKind.THROUGHPUT)
    ladder = spec.dof_ladder or ()
    if not ladder:
        raise LadderNotIncreasingError("dof_ladder 不能为空")
    for smaller, larger in zip(ladder, ladder[1:]):
        if larger <= smaller:
            raise LadderNotIncreasingError(f"dof_ladder 必须严格递增: {smaller} → {larger}")
    return [
        _run(spec, platform, 1, None, dofs_total, Family.THROUGHPUT)
        for platform in spec.platforms
        for dofs_total in ladder
    ]


_PLANNERS = {
    StudyKind.STRONG: plan_strong,
    StudyKind.WEAK: plan_weak,
    StudyKind.STRONG_WEAK: plan_strong_weak,
    StudyKind.THROUGHPUT: plan_throughput,
}


def plan(spec: StudySpec) -> List[RunSpec]:
    """按研究类型展开运行矩阵"""
    runs = _PLANNERS[spec.kind](spec)
    logger.debug("研究 %s 展开为 %d 个运行", spec.study_id, len(runs))
    return runs


def dump_run_specs(runs: Iterable[RunSpec]) -> str:
    """序列化为 JSON-lines"""
    return "".join(json.dumps(run.to_dict(), ensure_ascii=False) + "\n" for run in runs)


def parse_run_specs(text: str) -> List[RunSpec]:
    runs = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise SpecValidationError([Invalid(f"line {line_number}", f"invalid JSON: {e.msg}")]) from None
        if not isinstance(data, Mapping):
            raise SpecValidationError([Invalid(f"line {line_number}", "must be a JSON object")])
        runs.append(RunSpec.from_dict(data))
    return runs
