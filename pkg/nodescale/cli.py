# -*- coding: utf-8 -*-

import json
import logging

import click
from rich.console import Console
from rich.logging import RichHandler

from . import __version__
from .config import load_config
from .errors import NodescaleError
from .commands.init_cmd import init_cmd
from .commands.plan_cmd import plan_cmd
from .commands.simulate_cmd import simulate_cmd
from .commands.analyze_cmd import analyze_cmd
from .commands.chart_cmd import chart_cmd
from .commands.compare_cmd import compare_cmd

logger = logging.getLogger('nodescale')

# 用户/输入错误，退出码 1
USER_ERRORS = (NodescaleError, OSError, json.JSONDecodeError, UnicodeDecodeError)


def setup_logging(verbose: bool):
    """诊断信息统一经 rich 输出到标准错误"""
    logger.handlers.clear()
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=verbose)
    handler.setFormatter(logging.Formatter('%(message)s'))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)


class NodescaleGroup(click.Group):
    """将异常映射为退出码：用户错误 1，内部错误 2"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except USER_ERRORS as e:
            click.secho(f"❌ {e}", fg='red', bold=True, err=True)
            raise click.exceptions.Exit(1)
        except Exception as e:
            logger.debug("未预期的异常", exc_info=True)
            click.secho(f"❌ 内部错误: {type(e).__name__}: {e}", fg='red', bold=True, err=True)
            raise click.exceptions.Exit(2)


@click.group(cls=NodescaleGroup)
@click.version_option(__version__, prog_name='nodescale')
@click.option('-v', '--verbose', is_flag=True, help='输出调试日志')
@click.pass_context
def cli(ctx, verbose):
    """nodescale - 跨平台节点级扩展性研究的规划、模拟、分析与绘图工具"""
    setup_logging(verbose)
    try:
        config = load_config()
    except NodescaleError as e:
        click.secho(f"❌ {e}", fg='red', bold=True, err=True)
        raise click.exceptions.Exit(1)
    ctx.obj = {'config': config}


# 注册子命令
cli.add_command(init_cmd, name='init')
cli.add_command(plan_cmd, name='plan')
cli.add_command(simulate_cmd, name='simulate')
cli.add_command(analyze_cmd, name='analyze')
cli.add_command(chart_cmd, name='chart')
cli.add_command(compare_cmd, name='compare')


def run(args=None) -> int:
    """运行命令行并返回退出码"""
    try:
        result = cli.main(args=args, prog_name='nodescale', standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.secho("🚫 已取消", fg='yellow', err=True)
        return 1
    return result if isinstance(result, int) else 0
