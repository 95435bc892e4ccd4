# -*- coding: utf-8 -*-

"""
规划命令模块
"""
from collections import Counter

import click

from ..study.planner import dump_run_specs, load_study_spec, plan
from ..utils.print_guide import print_guide
from ..utils.utils import describe_output, write_output


@click.command()
@click.option('--spec', 'spec_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='研究描述文件（JSON）')
@click.option('--out', default='-', show_default=True, help='运行计划输出路径（JSON-lines），- 表示标准输出')
def plan_cmd(spec_path, out):
    """将研究描述展开为运行计划"""
    spec = load_study_spec(spec_path)
    runs = plan(spec)
    write_output(out, dump_run_specs(runs))

    per_platform = Counter(run.platform for run in runs)
    click.secho(f"✅ 研究 {spec.study_id} ({spec.kind.value}) 展开为 {len(runs)} 个运行 → {describe_output(out)}",
                fg='green', err=True)
    for platform, count in sorted(per_platform.items()):
        click.echo(f"   📦 {platform}: {count}", err=True)
    print_guide('plan')
