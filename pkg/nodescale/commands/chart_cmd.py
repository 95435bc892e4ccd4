# -*- coding: utf-8 -*-

"""
图表命令模块
"""
import click

from ..charts.render import DEFAULT_PALETTE, Annotation, ChartKind, ChartSeries, ChartSpec, render_chart
from ..config import get_setting
from ..study.model import Family
from ..utils.study_io import load_records, plottable_series
from ..utils.utils import describe_output, write_output

KIND_CHOICES = {
    'strong': ChartKind.STRONG,
    'weak': ChartKind.WEAK,
    'strong-weak': ChartKind.STRONG_WEAK,
    'throughput': ChartKind.THROUGHPUT,
}

KIND_FAMILIES = {
    ChartKind.STRONG: (Family.STRONG,),
    ChartKind.WEAK: (Family.WEAK,),
    ChartKind.STRONG_WEAK: (Family.STRONG, Family.WEAK),
    ChartKind.THROUGHPUT: (Family.THROUGHPUT,),
}


def build_chart_spec(records, kind: ChartKind, stat: str, annotate=False, ideal=None, title='',
                     width=800, height=560, palette=DEFAULT_PALETTE) -> ChartSpec:
    """
    将记录分组为图表所需的序列

    理想线只画在第一个扩展族（strong_weak 图中为强扩展曲线）上。
    strong_weak 图中的弱扩展曲线不画标记，只有一个数据点的弱扩展序列既无线也无点，不放进图表。
    """
    families = KIND_FAMILIES[kind]
    chart_series = []
    show_ideal = []
    for family in families:
        for series in plottable_series(records, family):
            if kind is ChartKind.STRONG_WEAK and family is Family.WEAK and len(series.ok_points) < 2:
                continue
            chart_series.append(ChartSeries.from_series(series, stat))
            if ideal is not None and family is families[0]:
                show_ideal.append((series.key, ideal))
    return ChartSpec(
        kind=kind,
        series=tuple(chart_series),
        title=title,
        show_ideal=tuple(show_ideal),
        annotations=Annotation.INVERSE_WEAK_EFFICIENCY if annotate else Annotation.NONE,
        width_px=width,
        height_px=height,
        palette=tuple(palette),
    )


@click.command()
@click.option('--records', 'record_paths', required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False), help='运行记录文件（JSON-lines），可重复')
@click.option('--kind', required=True, type=click.Choice(list(KIND_CHOICES)), help='图表模板')
@click.option('--annotate', is_flag=True, help='在弱扩展数据点旁标注减速比（弱扩展效率的倒数）')
@click.option('--ideal', type=float, default=None, help='理想参考线斜率（强扩展 -1，弱扩展 0）')
@click.option('--filter', 'filter_expr', default=None, help='过滤表达式')
@click.option('--stat', type=click.Choice(['minmax', 'stddev']), default=None, help='集合波动带统计量')
@click.option('--title', default='', help='图表标题')
@click.option('--width', type=click.IntRange(min=1), default=None, help='宽度（像素）')
@click.option('--height', type=click.IntRange(min=1), default=None, help='高度（像素）')
@click.option('--strict', is_flag=True, help='任何一行解析失败都视为错误')
@click.option('--out', default='-', show_default=True, help='SVG 输出路径，- 表示标准输出')
@click.pass_obj
def chart_cmd(obj, record_paths, kind, annotate, ideal, filter_expr, stat, title, width, height, strict, out):
    """生成 SVG 扩展性图表"""
    config = obj['config']
    kind = KIND_CHOICES[kind]
    records = load_records(record_paths, strict, filter_expr)
    spec = build_chart_spec(
        records, kind,
        stat=get_setting(config, 'analyze', 'stat', stat),
        annotate=annotate,
        ideal=ideal,
        title=title,
        width=get_setting(config, 'chart', 'width', width),
        height=get_setting(config, 'chart', 'height', height),
        palette=config['chart'].get('palette') or DEFAULT_PALETTE,
    )
    write_output(out, render_chart(spec))
    click.secho(f"✅ {kind.value} 图表包含 {len(spec.series)} 条序列 → {describe_output(out)}",
                fg='green', err=True)
