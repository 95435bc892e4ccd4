# -*- coding: utf-8 -*-

"""
分析命令模块 - 过滤、分组、集合聚合并输出带指标的 CSV 表格
"""
import click

from ..config import get_setting
from ..errors import TooFewPointsError
from ..study.ingest import to_table, write_csv
from ..study.metrics import detect_saturation, strong_speedup, throughput_series, weak_efficiency
from ..study.model import Family
from ..utils.study_io import load_records, plottable_series
from ..utils.utils import describe_output, write_output


def family_metrics(series, family: Family):
    if family is Family.STRONG:
        return [strong_speedup(series)]
    if family is Family.WEAK:
        return list(weak_efficiency(series))
    return [throughput_series(series)]


def report_saturation(series, threshold: float):
    try:
        point = detect_saturation(series, threshold)
    except TooFewPointsError:
        click.secho(f"⚠️  {series.key}: 数据点不足，无法判断饱和点", fg='yellow', err=True)
        return
    if point.saturated:
        click.secho(f"📊 {series.key}: 在 {point.dofs} DOF 处达到峰值吞吐量的 "
                    f"{point.fraction_of_peak:.0%} ({point.throughput:.6g} DOF·cycles/s/node)",
                    fg='cyan', err=True)
    else:
        click.secho(f"⚠️  {series.key}: 吞吐量在阶梯末端仍在上升，尚未饱和", fg='yellow', err=True)


@click.command()
@click.option('--records', 'record_paths', required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False), help='运行记录文件（JSON-lines），可重复')
@click.option('--family', required=True, type=click.Choice([f.value for f in Family]), help='扩展族')
@click.option('--filter', 'filter_expr', default=None, help='过滤表达式，如 "platform == CTS-1 and nodes >= 4"')
@click.option('--stat', type=click.Choice(['minmax', 'stddev']), default=None, help='集合波动带统计量')
@click.option('--threshold', type=click.FloatRange(min=0, max=1, min_open=True), default=None,
              help='吞吐量饱和阈值（峰值的比例）')
@click.option('--strict', is_flag=True, help='任何一行解析失败都视为错误')
@click.option('--out', default='-', show_default=True, help='CSV 输出路径，- 表示标准输出')
@click.pass_obj
def analyze_cmd(obj, record_paths, family, filter_expr, stat, threshold, strict, out):
    """计算强扩展加速比、弱扩展效率/减速比或吞吐量"""
    config = obj['config']
    stat = get_setting(config, 'analyze', 'stat', stat)
    threshold = get_setting(config, 'analyze', 'saturation_threshold', threshold)
    family = Family(family)

    records = load_records(record_paths, strict, filter_expr)
    series = plottable_series(records, family)
    metrics = [family_metrics(s, family) for s in series]
    rows = to_table(series, metrics, stat)
    write_output(out, write_csv(rows))

    if family is Family.THROUGHPUT:
        for s in series:
            report_saturation(s, threshold)
    click.secho(f"✅ {len(series)} 条序列, {len(rows) - 1} 行 → {describe_output(out)}", fg='green', err=True)
