# -*- coding: utf-8 -*-
"""nodescale - 节点对节点（node-to-node）扩展性研究的规划、模拟、分析与绘图工具"""

__version__ = '0.1.0'
