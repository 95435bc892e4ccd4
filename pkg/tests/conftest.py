# -*- coding: utf-8 -*-
import os
import sys

# 让测试模块可以直接 import factories
sys.path.insert(0, os.path.dirname(__file__))
