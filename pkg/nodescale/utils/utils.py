# -*- coding: utf-8 -*-

"""
通用工具函数
"""
import os
import tempfile
from pathlib import Path
from typing import Union

import click

STDOUT = '-'


def ensure_dir(path_str):
    """确保目录存在，如果不存在则创建"""
    path = Path(path_str).expanduser().resolve()
    if not path.exists():
        path.mkdir(parents=True)
    return str(path)


def write_output(path: str, data: Union[str, bytes]):
    """
    写出命令结果；path 为 "-" 时写到标准输出

    先写入同目录下的临时文件再 os.replace，失败时目标文件保持原样。
    """
    payload = data.encode('utf-8') if isinstance(data, str) else data
    if path == STDOUT:
        stream = click.get_binary_stream('stdout')
        stream.write(payload)
        stream.flush()
        return
    target = Path(path).expanduser()
    directory = target.parent if str(target.parent) else Path('.')
    ensure_dir(directory)
    fd, tmp_path = tempfile.mkstemp(prefix=f'.{target.name}.', suffix='.tmp', dir=str(directory))
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(payload)
        os.replace(tmp_path, target)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def describe_output(path: str) -> str:
    return '标准输出' if path == STDOUT else click.format_filename(path)
