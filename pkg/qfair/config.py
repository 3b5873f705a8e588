# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：config.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：全局配置，数值容差、求解器默认值都放在这里，可以用 ini 文件覆盖
# ---------------------------------------
import os
import copy

from configobj import ConfigObj

from qfair.util import attrdict

CONFIG_FILE = './qfair.ini'

DEFAULT_SETTINGS = {
    'tolerance': {
        'norm': 1e-12,
        'hermitian': 1e-12,
        'psd': 1e-10,
        'trace': 1e-12,
        'probability': 1e-12,
        'distribution': 1e-10,
        'kraus': 1e-10,
        'unitary': 1e-10,
        'povm': 1e-10,
        'measurement_ops': 1e-8,
        'orthogonality': 1e-8,
        'degenerate': 1e-12,
        'comparison': 1e-12,
        'state_check': 1e-10,
    },
    'solver': {
        'tolerance': 1e-7,
        'max_iters': 10000,
        'seed': 0,
        'optimize': 'greedy',
        'max_effect_qubits': 10,
    },
    'dense': {
        'max_outcomes': 20,
        'oracle_max_qubits': 4,
        'psd_check_max_qubits': 8,
    },
    'report': {
        'kernel_top_k': 64,
    },
    'bench': {
        'timeout': 3600.0,
        'threads': 1,
    },
}


class ConfigError(ValueError):
    """ 配置文件内容错误"""
    pass


def _to_attrdict(data):
    return attrdict({key: _to_attrdict(value) if isinstance(value, dict) else value
                     for key, value in data.items()})


settings = _to_attrdict(copy.deepcopy(DEFAULT_SETTINGS))


def _cast(value, default, name):
    """
    ini 里读出来的都是字符串，按默认值的类型转换
    """
    if isinstance(value, (list, tuple)):
        raise ConfigError(f'{name} 只能是单个值，不能是列表：{value}')
    try:
        if isinstance(default, bool):
            text = str(value).strip().lower()
            if text in ('1', 'true', 'yes', 'on'):
                return True
            if text in ('0', 'false', 'no', 'off'):
                return False
            raise ValueError(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except ValueError:
        raise ConfigError(f'{name} 的值无法转换为 {type(default).__name__}：{value}')
    return str(value)


def update_settings(data):
    """
    用嵌套字典覆盖当前配置，只接受已知的段和键
    """
    for section, values in data.items():
        if section not in DEFAULT_SETTINGS:
            raise ConfigError(f'未知的配置段：[{section}]')
        if not isinstance(values, dict):
            raise ConfigError(f'配置段 [{section}] 必须是键值对')
        for key, value in values.items():
            if key not in DEFAULT_SETTINGS[section]:
                raise ConfigError(f'未知的配置项：{section}.{key}')
            settings[section][key] = _cast(value, DEFAULT_SETTINGS[section][key], f'{section}.{key}')
    return settings


def load_config(file=CONFIG_FILE):
    """
    读取 ini 配置并覆盖默认值

    例子：
    [solver]
    tolerance = 1e-9
    max_iters = 20000
    """
    if not os.path.exists(file):
        raise ConfigError(f'配置文件不存在：{file}')
    config = ConfigObj(file, encoding='utf-8')
    return update_settings(config.dict())


def save_config(file=CONFIG_FILE):
    """
    把当前配置写入 ini 文件，可以先保存默认配置再手动修改
    """
    config = ConfigObj(encoding='utf-8')
    config.filename = file
    for section, values in settings.items():
        config[section] = {key: str(value) for key, value in values.items()}
    config.write()
    return file


def reset_config():
    """
    恢复默认配置，settings 对象本身不变，已经 import 的地方同样生效
    """
    for section, values in DEFAULT_SETTINGS.items():
        settings[section].clear()
        settings[section].update(values)
    return settings


def as_dict():
    """
    当前配置的普通字典副本，用来传给子进程
    """
    return {section: dict(values) for section, values in settings.items()}
