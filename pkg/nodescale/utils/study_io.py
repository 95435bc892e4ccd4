# -*- coding: utf-8 -*-

"""
命令共用的记录读取与序列选择
"""
import logging
from typing import List, Optional, Sequence

import click

from ..errors import EmptySeriesError, RecordParseError
from ..study.ingest import MetadataFilter, filter_records, read_record_files
from ..study.model import Family, RunRecord, Series, group_series

logger = logging.getLogger(__name__)

# 最多逐条列出的解析错误数
MAX_REPORTED_ERRORS = 20


def load_records(paths: Sequence[str], strict: bool = False,
                 filter_expr: Optional[str] = None) -> List[RunRecord]:
    """
    读取并合并多个 JSON-lines 记录文件，再应用过滤表达式

    存在解析错误时逐行报告；严格模式下或没有任何有效记录时视为失败。
    """
    where = MetadataFilter.parse(filter_expr)
    records, errors = read_record_files(list(paths))
    for error in errors[:MAX_REPORTED_ERRORS]:
        click.secho(f"⚠️  {error}", fg='yellow', err=True)
    if len(errors) > MAX_REPORTED_ERRORS:
        click.secho(f"⚠️  还有 {len(errors) - MAX_REPORTED_ERRORS} 个解析错误未列出", fg='yellow', err=True)
    if errors and (strict or not records):
        raise RecordParseError(errors)
    if not records:
        raise EmptySeriesError("记录文件中没有任何记录")

    selected = filter_records(records, where)
    logger.debug("读取 %d 条记录，过滤后剩余 %d 条", len(records), len(selected))
    if not selected:
        raise EmptySeriesError("过滤后没有剩余的记录")
    return selected


def plottable_series(records: Sequence[RunRecord], family: Family) -> List[Series]:
    """分组并丢弃没有任何 ok 数据点的序列（例如整条都是 oom）"""
    result = []
    for series in group_series(records, family):
        if series.ok_points:
            result.append(series)
        else:
            click.secho(f"⚠️  序列 {series.key} 没有成功的运行，已跳过", fg='yellow', err=True)
    if not result:
        raise EmptySeriesError("没有包含成功运行的序列")
    return result
