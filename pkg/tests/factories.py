# -*- coding: utf-8 -*-
"""测试用的记录与序列构造函数"""

from typing import Mapping, Optional, Sequence

from nodescale.study.model import Family, RunRecord, RunStatus, Series, group_series


def make_record(platform="cpu", nodes=1, t=1.0, dofs=1_000_000, cycles=10, problem="p",
                study_id="s", variant="", repeat_index=0, status=RunStatus.OK,
                metadata: Optional[Mapping[str, str]] = None) -> RunRecord:
    """t 为每周期时间；非 ok 状态的记录没有运行时间"""
    return RunRecord(
        study_id=study_id,
        platform=platform,
        problem=problem,
        nodes=nodes,
        cycles=cycles,
        dofs_total=dofs,
        status=status,
        wall_time_s=t * cycles if status is RunStatus.OK else None,
        variant=variant,
        repeat_index=repeat_index,
        metadata=dict(metadata or {}),
    )


def strong_series(times: Mapping[int, float], platform="cpu", dofs=1 << 24) -> Series:
    """节点数 → 每周期时间"""
    records = [make_record(platform, nodes=n, t=t, dofs=dofs) for n, t in times.items()]
    (series,) = group_series(records, Family.STRONG)
    return series


def weak_series(times: Mapping[int, float], platform="cpu", dofs_per_node=1 << 20) -> Series:
    records = [make_record(platform, nodes=n, t=t, dofs=n * dofs_per_node) for n, t in times.items()]
    (series,) = group_series(records, Family.WEAK)
    return series


def throughput_records(dofs_ladder: Sequence[int], times: Sequence[float], platform="cpu"):
    return [make_record(platform, nodes=1, t=t, dofs=d) for d, t in zip(dofs_ladder, times)]
