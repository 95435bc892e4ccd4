# -*- coding: utf-8 -*-

"""
模拟命令模块
"""
import click

from ..config import get_setting
from ..study.ingest import serialize_records
from ..study.model import RunStatus
from ..study.planner import parse_run_specs
from ..study.synthmodel import load_platform_models, simulate_plan
from ..utils.print_guide import print_guide
from ..utils.utils import describe_output, write_output


@click.command()
@click.option('--plan', 'plan_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='运行计划（JSON-lines）')
@click.option('--model', 'model_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='平台模型文件（JSON）')
@click.option('--repeats', type=click.IntRange(min=1), default=None, help='每个运行的重复次数')
@click.option('--out', default='-', show_default=True, help='记录输出路径（JSON-lines），- 表示标准输出')
@click.pass_obj
def simulate_cmd(obj, plan_path, model_path, repeats, out):
    """用合成性能模型生成运行记录"""
    repeats = get_setting(obj['config'], 'simulate', 'repeats', repeats)
    with open(plan_path, 'r', encoding='utf-8') as f:
        runs = parse_run_specs(f.read())
    models = load_platform_models(model_path)
    records = simulate_plan(models, runs, repeats)
    write_output(out, serialize_records(records))

    oom = sum(1 for r in records if r.status is RunStatus.OOM)
    click.secho(f"✅ 模拟了 {len(runs)} 个运行 × {repeats} 次 = {len(records)} 条记录 → {describe_output(out)}",
                fg='green', err=True)
    if oom:
        click.secho(f"⚠️  其中 {oom} 条记录超出内存容量 (oom)", fg='yellow', err=True)
    print_guide('simulate')
