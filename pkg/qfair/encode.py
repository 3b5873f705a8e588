# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：encode.py
#   版本：0.2
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：读取 csv 数据集，每列除以最大值归一化，再用 ⊗ X^{x_j}|0⟩ 编码成量子态
#         分类列转换成整数，映射和每列最大值可以保存成 json 旁注文件，保证编码可以复现
# ---------------------------------------
import os
from functools import reduce
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from qfair.file import get_encoding, json_read, json_save
from qfair.util import echo
from qfair.channel import HADAMARD
from qfair.qstate import PureState


class EncodeError(ValueError):
    """ 数据集无法读取或取值无效"""
    pass


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    column_names: tuple = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise EncodeError('特征向量不能为空')
        if np.any(np.isnan(values)) or np.any(values < 0) or np.any(values > 1):
            raise EncodeError(f'特征值必须在 [0,1] 内：{values.tolist()}')
        names = tuple(self.column_names)
        if names and len(names) != values.size:
            raise EncodeError(f'列名个数 {len(names)} 与特征个数 {values.size} 不一致')
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'column_names', names)

    def __len__(self):
        return self.values.size


@dataclass(eq=False)
class Dataset:
    """
    归一化后的数据集

    :param column_max: 每列归一化用的最大值
    :param categorical_map: 分类列的 值 → 整数 映射
    """
    rows: list
    column_names: tuple
    labels: np.ndarray = None
    label_column: str = None
    column_max: dict = field(default_factory=dict)
    categorical_map: dict = field(default_factory=dict)

    @property
    def num_features(self):
        return len(self.column_names)

    def to_frame(self):
        frame = pd.DataFrame([row.values for row in self.rows], columns=list(self.column_names))
        if self.labels is not None:
            frame[self.label_column] = self.labels
        return frame


def _read_frame(path):
    if not os.path.exists(path):
        raise EncodeError(f'csv 文件不存在：{path}')
    encoding = get_encoding(path)
    try:
        return pd.read_csv(path, encoding=encoding, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise EncodeError(f'csv 文件无法解析：{path}，{e}')


def _map_categorical(series, mapping, explicit):
    """
    explicit 为真时映射由用户给出，出现映射外的值就报错；否则按首次出现的顺序编号
    """
    codes = []
    for row, value in series.items():
        key = str(value)
        if key not in mapping:
            if explicit:
                raise EncodeError(f'列 {series.name} 第 {row + 1} 行的值 {key!r} 不在分类映射中')
            mapping[key] = len(mapping)
        codes.append(mapping[key])
    return pd.Series(codes, index=series.index, dtype=float, name=series.name)


def _numeric_column(series, mapping, explicit):
    if explicit:
        return _map_categorical(series, mapping, True)
    converted = pd.to_numeric(series, errors='coerce')
    if converted.notna().all():
        return converted.astype(float)
    if converted.isna().all():
        return _map_categorical(series, mapping, False)
    bad = [f'第 {row + 1} 行 {series[row]!r}' for row in converted[converted.isna()].index[:5]]
    raise EncodeError(f'列 {series.name} 含有非数字的值：{"，".join(bad)}')


def load_csv(path, label_column=None, categorical_map=None, sidecar=None, is_print=False):
    """
    读取 csv，分类列转为整数，每列除以最大值

    :param label_column: 标签列，不参与编码
    :param categorical_map: {列名: {值: 整数}}，给出的列严格按映射转换
    :param sidecar: 旁注文件（或已读取的字典），沿用其中的映射和最大值
    """
    frame = _read_frame(path)
    frame.columns = [str(column).strip() for column in frame.columns]
    echo(f'读取 {path}：{len(frame)} 行，{len(frame.columns)} 列', is_print=is_print)

    if frame.isna().any().any():
        missing = frame.isna().any(axis=1)
        rows = [str(i + 1) for i in frame.index[missing][:5]]
        raise EncodeError(f'数据有缺失值，行：{", ".join(rows)}')

    stored = {}
    if sidecar is not None:
        stored = load_sidecar(sidecar) if isinstance(sidecar, str) else dict(sidecar)
        label_column = label_column or stored.get('label_column')
    maps = {column: dict(mapping) for column, mapping in (stored.get('categorical_map') or {}).items()}
    explicit = set(maps)
    for column, mapping in (categorical_map or {}).items():
        maps[column] = {str(key): int(value) for key, value in mapping.items()}
        explicit.add(column)
    stored_max = stored.get('column_max') or {}

    if label_column is not None and label_column not in frame.columns:
        raise EncodeError(f'缺少标签列：{label_column}')
    for column in list(explicit) + list(stored_max):
        if column != label_column and column not in frame.columns:
            raise EncodeError(f'缺少列：{column}')

    features = [column for column in frame.columns if column != label_column]
    if not features:
        raise EncodeError('没有可以编码的特征列')

    normalized = {}
    column_max = {}
    for column in features:
        mapping = maps.setdefault(column, {})
        values = _numeric_column(frame[column], mapping, column in explicit)
        if not mapping:
            del maps[column]
        if (values < 0).any():
            raise EncodeError(f'列 {column} 含有负数，归一化后会超出 [0,1]')
        maximum = float(stored_max[column]) if column in stored_max else float(values.max())
        if maximum <= 0:
            raise EncodeError(f'列 {column} 的最大值为 0，无法归一化')
        if (values > maximum).any():
            raise EncodeError(f'列 {column} 有值超过保存的最大值 {maximum}')
        normalized[column] = values / maximum
        column_max[column] = maximum

    labels = None
    if label_column is not None:
        label_values = frame[label_column]
        mapping = maps.setdefault(label_column, {})
        labels = _numeric_column(label_values, mapping, label_column in explicit).astype(int).to_numpy()
        if not mapping:
            del maps[label_column]

    table = pd.DataFrame(normalized)
    rows = [FeatureVector(table.iloc[i].to_numpy(), tuple(features)) for i in range(len(table))]
    echo(f'编码 {len(rows)} 行，{len(features)} 个特征', is_print=is_print)
    return Dataset(rows, tuple(features), labels, label_column, column_max, maps)


def fractional_x(t):
    """
    X^t = H·diag(1, e^{iπt})·H
    """
    return HADAMARD @ np.diag([1, np.exp(1j * np.pi * t)]) @ HADAMARD


def feature_map(x):
    """
    |ψ(x)⟩ = ⊗_j X^{x_j}|0⟩，第 j 个特征对应 qubit j
    """
    if not isinstance(x, FeatureVector):
        x = FeatureVector(x)
    qubits = [fractional_x(t)[:, 0] for t in x.values]
    amplitudes = reduce(np.kron, qubits)
    return PureState(len(qubits), amplitudes / np.linalg.norm(amplitudes))


def encode_dataset(dataset):
    """
    所有行编码后的振幅，形状 (行数, 2^n)
    """
    return np.array([feature_map(row).amplitudes for row in dataset.rows])


def save_states(path, dataset):
    """
    保存编码后的态为 npz：states、features、labels（如果有）、column_names
    """
    arrays = {
        'states': encode_dataset(dataset),
        'features': np.array([row.values for row in dataset.rows]),
        'column_names': np.array(dataset.column_names),
    }
    if dataset.labels is not None:
        arrays['labels'] = np.asarray(dataset.labels)
    np.savez_compressed(path, **arrays)
    return path


def save_sidecar(dataset, path):
    data = {
        'categorical_map': dataset.categorical_map,
        'column_max': dataset.column_max,
        'label_column': dataset.label_column,
    }
    return json_save(data, path)


def load_sidecar(path):
    try:
        data = json_read(path)
    except FileNotFoundError:
        raise EncodeError(f'旁注文件不存在：{path}')
    except ValueError as e:
        raise EncodeError(f'旁注文件不是有效的 json：{path}，{e}')
    if not isinstance(data, dict):
        raise EncodeError('旁注文件的顶层必须是对象')
    return data
