import click


def print_guide(step: str = 'plan'):
    """打印下一步可以执行的命令"""
    click.echo(click.style("\n⩸⩸⩸⩸ 📋 如何继续？ ⩸⩸⩸⩸\n", fg="bright_cyan"), err=True)

    if step == 'plan':
        click.echo(click.style("🧪 ", fg="green") +
                   click.style("nodescale simulate", fg="bright_green", bold=True) +
                   click.style(" --plan runs.jsonl --model platforms.json", fg="bright_white") +
                   click.style(" - 用合成模型生成运行记录", fg="white"), err=True)
        click.echo(click.style("🖥️  ", fg="cyan") +
                   click.style("或者在集群上执行 runs.jsonl 中的 command，收集 JSON-lines 记录", fg="white"),
                   err=True)

    click.echo(click.style("📊 ", fg="yellow") +
               click.style("nodescale analyze", fg="bright_yellow", bold=True) +
               click.style(" --records records.jsonl --family strong", fg="bright_white") +
               click.style(" - 计算加速比/效率/吞吐量表格", fg="white"), err=True)

    click.echo(click.style("📈 ", fg="blue") +
               click.style("nodescale chart", fg="bright_blue", bold=True) +
               click.style(" --records records.jsonl --kind strong --out strong.svg", fg="bright_white") +
               click.style(" - 生成 SVG 图表", fg="white"), err=True)

    click.echo(click.style("⚖️  ", fg="magenta") +
               click.style("nodescale compare", fg="bright_magenta", bold=True) +
               click.style(" --records records.jsonl --a <平台> --b <平台>", fg="bright_white") +
               click.style(" - 跨平台比较与交叉点", fg="white"), err=True)

    click.echo("", err=True)
