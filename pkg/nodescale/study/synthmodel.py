# -*- coding: utf-8 -*-
"""
合成性能模型 - 根据平台参数生成带有已知真值的运行记录，用作测试夹具和独立的对照

每周期时间的闭式模型（d = dofs_total / nodes）：

    r(d) = rate × d / (d + half_saturation_dofs)          (half_saturation_dofs = 0 时 r(d) = rate)
    t    = serial + launch + d / r(d) + comm × log2(nodes)

噪声是确定性的：由 (seed, study_id, platform, nodes, dofs_total, repeat_index)
经 BLAKE2b 得到 64 位键，与 seed 异或后送入 SplitMix64 终混函数，
取高 53 位作为 [0, 1) 上的均匀数 u，ε = noise_rel × (2u − 1)。
该算法属于文件可复现约定的一部分，修改它会改变所有模拟输出。
"""

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping

from ..errors import Invalid, ModelValidationError, UnknownPlatformError
from .model import RunRecord, RunStatus, validate_record
from .planner import RunSpec

MASK64 = (1 << 64) - 1

MODEL_FIELDS = (
    "name", "serial_s_per_cycle", "rate_dofs_per_s", "half_saturation_dofs",
    "comm_s_per_cycle", "launch_s_per_cycle", "mem_capacity_dofs_per_node",
    "noise_rel", "seed",
)


@dataclass(frozen=True)
class PlatformModel:
    name: str
    rate_dofs_per_s: float
    mem_capacity_dofs_per_node: float
    serial_s_per_cycle: float = 0.0
    half_saturation_dofs: float = 0.0
    comm_s_per_cycle: float = 0.0
    launch_s_per_cycle: float = 0.0
    noise_rel: float = 0.0
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in MODEL_FIELDS}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PlatformModel":
        return parse_platform_model(data)


def _real(data, issues, name, default=None, positive=False):
    value = data.get(name, default)
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        issues.append(Invalid(name, "must be a real number"))
        return 0.0
    if not math.isfinite(value):
        issues.append(Invalid(name, "must be finite"))
    elif positive and value <= 0:
        issues.append(Invalid(name, "must be > 0"))
    elif not positive and value < 0:
        issues.append(Invalid(name, "must be ≥ 0"))
    return float(value)


def parse_platform_model(data: Mapping[str, Any]) -> PlatformModel:
    """
    校验并构造平台模型

    Raises:
        ModelValidationError: 汇总全部字段错误
    """
    if not isinstance(data, Mapping):
        raise ModelValidationError([Invalid("model", "must be a JSON object")])
    issues: List[Invalid] = []
    for name in sorted(set(data) - set(MODEL_FIELDS)):
        issues.append(Invalid(name, "unknown field"))
    name = data.get("name")
    if not isinstance(name, str) or not name:
        issues.append(Invalid("name", "must be a non-empty string"))
    rate = _real(data, issues, "rate_dofs_per_s", positive=True)
    capacity = _real(data, issues, "mem_capacity_dofs_per_node", positive=True)
    serial = _real(data, issues, "serial_s_per_cycle", 0.0)
    half_sat = _real(data, issues, "half_saturation_dofs", 0.0)
    comm = _real(data, issues, "comm_s_per_cycle", 0.0)
    launch = _real(data, issues, "launch_s_per_cycle", 0.0)
    noise = _real(data, issues, "noise_rel", 0.0)
    if noise >= 0.5:
        issues.append(Invalid("noise_rel", "must be < 0.5"))
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        issues.append(Invalid("seed", "must be an integer"))
        seed = 0
    if issues:
        raise ModelValidationError(issues)
    return PlatformModel(
        name=name,
        rate_dofs_per_s=rate,
        mem_capacity_dofs_per_node=capacity,
        serial_s_per_cycle=serial,
        half_saturation_dofs=half_sat,
        comm_s_per_cycle=comm,
        launch_s_per_cycle=launch,
        noise_rel=noise,
        seed=seed,
    )


def parse_platform_models(document: Any) -> Dict[str, PlatformModel]:
    """解析 {"platforms": [...]} 文档（也接受顶层列表），按平台名索引"""
    entries = document.get("platforms") if isinstance(document, Mapping) else document
    if not isinstance(entries, list) or not entries:
        raise ModelValidationError([Invalid("platforms", "must be a non-empty list")])
    models: Dict[str, PlatformModel] = {}
    for index, entry in enumerate(entries):
        try:
            model = parse_platform_model(entry)
        except ModelValidationError as e:
            raise ModelValidationError(
                [Invalid(f"platforms[{index}].{issue.field}", issue.reason) for issue in e.issues]
            ) from None
        if model.name in models:
            raise ModelValidationError([Invalid(f"platforms[{index}].name", "duplicate platform")])
        models[model.name] = model
    return models


def load_platform_models(path: str) -> Dict[str, PlatformModel]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_platform_models(json.load(f))


def dump_platform_models(models: Iterable[PlatformModel]) -> str:
    return json.dumps({"platforms": [m.to_dict() for m in models]}, indent=2, ensure_ascii=False) + "\n"


# ---- 模型 ----

def model_time_per_cycle(m: PlatformModel, nodes: int, dofs_total: int) -> float:
    """加噪声之前的每周期时间（秒）"""
    if nodes < 1 or dofs_total < 1:
        raise ValueError("nodes 和 dofs_total 必须 ≥ 1")
    d = dofs_total / nodes
    if m.half_saturation_dofs > 0:
        rate = m.rate_dofs_per_s * d / (d + m.half_saturation_dofs)
    else:
        rate = m.rate_dofs_per_s
    return (m.serial_s_per_cycle + m.launch_s_per_cycle + d / rate
            + m.comm_s_per_cycle * math.log2(nodes))


def splitmix64(state: int) -> int:
    """SplitMix64 的终混函数（Steele, Lea & Flood 的 64 位混合步骤）"""
    z = (state + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def noise_unit(seed: int, study_id: str, platform: str, nodes: int, dofs_total: int,
               repeat_index: int) -> float:
    """按键确定的 [0, 1) 均匀数"""
    key = f"{study_id}\x1f{platform}\x1f{nodes}\x1f{dofs_total}\x1f{repeat_index}".encode("utf-8")
    digest = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    mixed = splitmix64((seed & MASK64) ^ digest)
    return (mixed >> 11) * (1.0 / (1 << 53))


def simulate_run(m: PlatformModel, spec: RunSpec, repeat_index: int = 0) -> RunRecord:
    """
    按平台模型模拟一次运行

    每节点自由度超过内存容量时返回不带运行时间的 oom 记录。

    Raises:
        RecordValidationError: 运行描述本身无法构成有效记录（如 dofs_total < nodes）
    """
    common = dict(
        study_id=spec.study_id,
        platform=spec.platform,
        problem=spec.problem or spec.study_id,
        nodes=spec.nodes,
        cycles=spec.cycles,
        dofs_total=spec.dofs_total,
        variant=spec.variant,
        ranks_per_node=spec.ranks_per_node,
        refinement_level=spec.refinement_level,
        repeat_index=repeat_index,
        metadata={**spec.metadata, "model": m.name, "simulated": "true"},
    )
    if spec.dofs_total / spec.nodes > m.mem_capacity_dofs_per_node:
        return validate_record(RunRecord(status=RunStatus.OOM, wall_time_s=None, **common))

    epsilon = 0.0
    if m.noise_rel > 0:
        u = noise_unit(m.seed, spec.study_id, spec.platform, spec.nodes, spec.dofs_total, repeat_index)
        epsilon = m.noise_rel * (2.0 * u - 1.0)
    wall = spec.cycles * model_time_per_cycle(m, spec.nodes, spec.dofs_total) * (1.0 + epsilon)
    return validate_record(RunRecord(status=RunStatus.OK, wall_time_s=wall, **common))


def resolve_model(models: Mapping[str, PlatformModel], run: RunSpec) -> PlatformModel:
    """带变体的运行优先使用名为 `平台:变体` 的模型，没有时退回到平台本身的模型"""
    if run.variant:
        model = models.get(f"{run.platform}:{run.variant}")
        if model is not None:
            return model
    model = models.get(run.platform)
    if model is None:
        raise UnknownPlatformError(run.platform)
    return model


def simulate_plan(models: Mapping[str, PlatformModel], runs: Iterable[RunSpec],
                  repeats: int = 1) -> List[RunRecord]:
    """
    模拟整个运行计划，每个 RunSpec 产生 repeats 条记录（repeat_index 0..repeats-1）

    模型按 resolve_model 的规则查找，因此同一平台的不同变体可以使用不同的参数。

    Raises:
        UnknownPlatformError: 计划中的平台在模型文件中不存在
    """
    if repeats < 1:
        raise ValueError("repeats 必须 ≥ 1")
    records = []
    for run in runs:
        model = resolve_model(models, run)
        for repeat_index in range(repeats):
            records.append(simulate_run(model, run, repeat_index))
    return records
