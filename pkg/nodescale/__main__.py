# -*- coding: utf-8 -*-
"""
nodescale 命令行工具的入口点
"""

import sys

from .cli import run


def main():
    """主函数，作为 CLI 入口点"""
    sys.exit(run())


if __name__ == "__main__":
    main()
