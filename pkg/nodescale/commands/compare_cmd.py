# -*- coding: utf-8 -*-

"""
跨平台比较命令模块 - 竖线比较（同节点数的时间比）、横线比较（等效节点数）与交叉点
"""
from typing import List, Tuple

import click

from ..errors import EmptySeriesError, OutOfRangeError
from ..study.ingest import format_number, write_csv
from ..study.metrics import (
    doublings_between, find_crossovers, node_equivalence, platform_speedups, point_time_per_cycle,
)
from ..study.model import Family, Series
from ..utils.study_io import load_records, plottable_series
from ..utils.utils import describe_output, write_output

COMPARE_COLUMNS = (
    "problem", "family", "family_param", "nodes", "platform_a", "platform_b",
    "time_a_s", "time_b_s", "speedup_b_over_a", "doublings", "equivalent_nodes_b",
)


def parse_selector(selector: str) -> Tuple[str, str]:
    """`平台` 或 `平台:变体`"""
    platform, _, variant = selector.partition(':')
    if not platform:
        raise click.BadParameter(f"无效的平台选择器: {selector!r}")
    return platform, variant


def _matches(series: Series, selector: Tuple[str, str]) -> bool:
    return (series.key.platform, series.key.variant) == selector


def pair_series(series: List[Series], a: Tuple[str, str], b: Tuple[str, str]) -> List[Tuple[Series, Series]]:
    """按 (problem, family_param) 配对两个平台的序列"""
    side_b = {(s.key.problem, s.key.family_param): s for s in series if _matches(s, b)}
    pairs = []
    for s in series:
        if _matches(s, a):
            other = side_b.get((s.key.problem, s.key.family_param))
            if other is not None:
                pairs.append((s, other))
    return pairs


def compare_rows(pairs: List[Tuple[Series, Series]]) -> List[List[str]]:
    rows = [list(COMPARE_COLUMNS)]
    for a, b in pairs:
        for n, ratio in platform_speedups(a, b):
            try:
                equivalent = node_equivalence(a, n, b)
            except OutOfRangeError:
                equivalent = None
            rows.append([
                a.key.problem, a.key.family.value, str(a.key.family_param), str(n),
                a.key.label, b.key.label,
                format_number(point_time_per_cycle(a.point_at(n))),
                format_number(point_time_per_cycle(b.point_at(n))),
                format_number(ratio), format_number(doublings_between(a, b, n)), format_number(equivalent),
            ])
    return rows


@click.command()
@click.option('--records', 'record_paths', required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False), help='运行记录文件（JSON-lines），可重复')
@click.option('--family', default='strong', show_default=True, type=click.Choice(['strong', 'weak']),
              help='扩展族')
@click.option('--a', 'selector_a', required=True, help='平台 A（`平台` 或 `平台:变体`）')
@click.option('--b', 'selector_b', required=True, help='平台 B（`平台` 或 `平台:变体`）')
@click.option('--filter', 'filter_expr', default=None, help='过滤表达式')
@click.option('--strict', is_flag=True, help='任何一行解析失败都视为错误')
@click.option('--out', default='-', show_default=True, help='CSV 输出路径，- 表示标准输出')
def compare_cmd(record_paths, family, selector_a, selector_b, filter_expr, strict, out):
    """比较两个平台：同节点数的加速比、等效节点数与交叉点"""
    a, b = parse_selector(selector_a), parse_selector(selector_b)
    records = load_records(record_paths, strict, filter_expr)
    pairs = pair_series(plottable_series(records, Family(family)), a, b)
    if not pairs:
        raise EmptySeriesError(f"没有同时包含 {selector_a} 和 {selector_b} 的可比较序列")

    rows = compare_rows(pairs)
    write_output(out, write_csv(rows))

    for sa, sb in pairs:
        crossovers = find_crossovers(sa, sb)
        for point in crossovers:
            click.secho(f"📊 {sa.key.label} 与 {sb.key.label} 在 {point.x:.4g} 个节点处交叉 "
                        f"({point.y:.4g} s/cycle)", fg='cyan', err=True)
        if not crossovers:
            click.echo(f"   {sa.key.label} 与 {sb.key.label} 在共同范围内没有交叉 ({sa.key.problem})", err=True)
    click.secho(f"✅ 比较了 {len(pairs)} 组序列, {len(rows) - 1} 行 → {describe_output(out)}", fg='green', err=True)
