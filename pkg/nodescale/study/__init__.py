# -*- coding: utf-8 -*-
"""
扩展性研究核心：数据模型、运行规划、记录摄取、指标与合成模型
"""

from .model import (
    Family, MetricKind, MetricPoint, RunRecord, RunStatus, Series, SeriesKey, SeriesPoint,
    dofs_per_node, group_series, validate_record,
)
from .planner import (
    PlatformEntry, RunSpec, StudyKind, StudySpec, expand_template, load_study_spec,
    parse_study_spec, plan, plan_strong, plan_strong_weak, plan_throughput, plan_weak,
    refine_elements,
)
from .ingest import (
    AggregatedPoint, BandStat, MetadataFilter, ParseError, aggregate_ensemble,
    aggregate_series, filter_records, parse_records, read_record_files, to_table, write_csv,
)
from .metrics import (
    CrossoverPoint, IdealLine, MetricSequence, SaturationPoint, cross_platform_speedup_at,
    detect_saturation, find_crossovers, ideal_line, node_equivalence, strong_speedup,
    throughput, throughput_series, time_per_cycle, weak_efficiency,
)
from .synthmodel import PlatformModel, load_platform_models, model_time_per_cycle, simulate_plan, simulate_run
