# -*- coding: utf-8 -*-

"""
初始化命令模块 - 在当前目录生成配置文件、示例研究描述和示例平台模型
"""
import os
from importlib import resources

import click
from rich.console import Console
from rich.panel import Panel
from rich.prompt import Confirm
from rich.table import Table

from ..config import CONFIG_FILE, DEFAULT_CONFIG, write_config
from ..utils.print_guide import print_guide

console = Console(stderr=True)

EXAMPLE_FILES = ('study.json', 'platforms.json')


def _example_text(name: str) -> str:
    return resources.files('nodescale').joinpath('data', name).read_text(encoding='utf-8')


def _may_write(path: str, force: bool) -> bool:
    if force or not os.path.exists(path):
        return True
    return Confirm.ask(f"[yellow]⚠️  {path} 已存在，是否覆盖？[/]", default=False, console=console)


@click.command()
@click.option('--force', is_flag=True, help='不询问，直接覆盖已存在的文件')
@click.option('--dir', 'target_dir', default='.', type=click.Path(file_okay=False), help='目标目录')
def init_cmd(force, target_dir):
    """生成 nodescale.toml、示例研究描述和示例平台模型"""
    console.print(Panel.fit(
        "[bold yellow]nodescale 初始化[/]",
        border_style="green",
        title="[bold cyan]📈 Node-to-node scaling studies[/]",
    ))
    os.makedirs(target_dir, exist_ok=True)

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("文件")
    table.add_column("状态")

    config_path = os.path.join(target_dir, CONFIG_FILE)
    if _may_write(config_path, force):
        write_config(DEFAULT_CONFIG, target_dir)
        table.add_row(config_path, "[green]✅ 已写入[/]")
    else:
        table.add_row(config_path, "[yellow]跳过[/]")

    for name in EXAMPLE_FILES:
        path = os.path.join(target_dir, name)
        if _may_write(path, force):
            with open(path, 'w', encoding='utf-8') as f:
                f.write(_example_text(name))
            table.add_row(path, "[green]✅ 已写入[/]")
        else:
            table.add_row(path, "[yellow]跳过[/]")

    console.print(table)
    click.echo(click.style("👉 下一步: ", fg="cyan") +
               click.style("nodescale plan --spec study.json --out runs.jsonl", fg="bright_green", bold=True),
               err=True)
    print_guide('plan')
