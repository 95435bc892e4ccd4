# -*- coding: utf-8 -*-

"""
处理 nodescale 配置文件的模块

配置来自当前目录的 nodescale.toml（顶层表），或 pyproject.toml 的 [tool.nodescale] 表。
命令行参数优先于配置文件，配置文件优先于内置默认值。
"""
import os
from typing import Any, Dict, Optional

import tomli
import tomli_w

from .errors import ConfigError

CONFIG_FILE = 'nodescale.toml'
PYPROJECT_FILE = 'pyproject.toml'

DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    'analyze': {
        'stat': 'minmax',
        'saturation_threshold': 0.9,
    },
    'chart': {
        'width': 800,
        'height': 560,
    },
    'simulate': {
        'repeats': 1,
    },
}


def get_config_path(base_dir: Optional[str] = None) -> str:
    """获取配置文件路径"""
    return os.path.join(base_dir or os.getcwd(), CONFIG_FILE)


def _load_toml(path: str) -> dict:
    with open(path, 'rb') as f:
        try:
            return tomli.load(f)
        except tomli.TOMLDecodeError as e:
            raise ConfigError(f"{path} 格式错误: {e}") from None


def read_config(base_dir: Optional[str] = None) -> dict:
    """
    读取原始配置，nodescale.toml 优先；两者都不存在时返回空字典
    """
    path = get_config_path(base_dir)
    if os.path.exists(path):
        return _load_toml(path)
    pyproject = os.path.join(base_dir or os.getcwd(), PYPROJECT_FILE)
    if os.path.exists(pyproject):
        return _load_toml(pyproject).get('tool', {}).get('nodescale', {})
    return {}


def write_config(config_data: dict, base_dir: Optional[str] = None):
    """写入 nodescale.toml"""
    with open(get_config_path(base_dir), 'wb') as f:
        tomli_w.dump(config_data, f)


def _deep_update(original, update):
    """递归更新字典"""
    for key, value in update.items():
        if isinstance(value, dict) and key in original and isinstance(original[key], dict):
            _deep_update(original[key], value)
        else:
            original[key] = value


def _check_positive_int(config, section, key):
    value = config[section][key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f"[{section}] {key} 必须是正整数，当前为 {value!r}")


def validate_config(config: dict) -> dict:
    """校验取值范围，返回同一个字典"""
    stat = config['analyze']['stat']
    if stat not in ('minmax', 'stddev'):
        raise ConfigError(f"[analyze] stat 只能是 minmax 或 stddev，当前为 {stat!r}")
    threshold = config['analyze']['saturation_threshold']
    if isinstance(threshold, bool) or not isinstance(threshold, (int, float)) or not 0 < threshold <= 1:
        raise ConfigError(f"[analyze] saturation_threshold 必须在 (0, 1] 内，当前为 {threshold!r}")
    _check_positive_int(config, 'chart', 'width')
    _check_positive_int(config, 'chart', 'height')
    _check_positive_int(config, 'simulate', 'repeats')
    palette = config['chart'].get('palette')
    if palette is not None and (
            not isinstance(palette, list) or not palette or not all(isinstance(c, str) for c in palette)):
        raise ConfigError("[chart] palette 必须是非空的颜色字符串列表")
    return config


def load_config(base_dir: Optional[str] = None) -> dict:
    """读取配置并与默认值合并"""
    config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    raw = read_config(base_dir)
    for section, values in raw.items():
        if section not in DEFAULT_CONFIG:
            raise ConfigError(f"未知的配置表 [{section}]")
        if not isinstance(values, dict):
            raise ConfigError(f"[{section}] 必须是一个表")
        allowed = set(DEFAULT_CONFIG[section]) | ({'palette'} if section == 'chart' else set())
        unknown = sorted(set(values) - allowed)
        if unknown:
            raise ConfigError(f"[{section}] 中有未知的配置项: {', '.join(unknown)}")
    _deep_update(config, raw)
    return validate_config(config)


def get_setting(config: dict, section: str, key: str, override: Any = None) -> Any:
    """命令行参数 > 配置文件 > 默认值"""
    if override is not None:
        return override
    return config.get(section, {}).get(key, DEFAULT_CONFIG.get(section, {}).get(key))
