# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：model.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：量子决策模型 A = (E, {M_i})，前向计算、分类，以及两种线路结构的构造器
#         模型可以保存为 json 文件，复数写成 [实部, 虚部]
# ---------------------------------------
from dataclasses import dataclass, field, replace

import numpy as np

from qfair.file import json_read, json_save
from qfair.qstate import DimensionError, as_density
from qfair.channel import (LocalOp, CircuitChannel, GlobalDepolarizing, ChannelError, NOISE_NAMES,
                           MIXED_NOISE_ORDER, GLOBAL_DEPOLARIZING, apply)
from qfair.measurement import Povm, MeasurementError, last_qubit_projective, from_measurement_ops, probabilities


class ModelError(ValueError):
    """ 模型结构或模型文件错误"""
    pass


@dataclass(frozen=True, eq=False)
class DecisionModel:
    """
    决策模型：线路 + 测量，metadata 记录噪声类型、概率、参数种子等
    """
    circuit: CircuitChannel
    povm: Povm
    name: str = 'model'
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.circuit.num_qubits != self.povm.num_qubits:
            raise ModelError(f'线路有 {self.circuit.num_qubits} 个 qubit，测量有 {self.povm.num_qubits} 个')

    @property
    def num_qubits(self):
        return self.circuit.num_qubits

    @property
    def labels(self):
        return self.povm.labels


def forward(model, rho):
    """
    A(ρ) = {tr(ℳ_i E(ρ))}
    """
    rho = as_density(rho)
    if rho.num_qubits != model.num_qubits:
        raise DimensionError(f'模型有 {model.num_qubits} 个 qubit，输入态有 {rho.num_qubits} 个')
    return probabilities(model.povm, apply(model.circuit, rho))


def classify(model, rho, tolerance=1e-12):
    """
    概率最大的标签，并列时取字典序最小的标签
    """
    distribution = forward(model, rho)
    highest = distribution.probabilities.max()
    return min(label for label, p in zip(distribution.labels, distribution.probabilities) if p >= highest - tolerance)


# ---------------------------------------------------------------- 噪声

def parse_noise_spec(noise):
    """
    解析噪声描述，返回 (name, p) 或 None

    例子：
    parse_noise_spec('depolarizing:0.01')  -> ('depolarizing', 0.01)
    parse_noise_spec('none')               -> None
    parse_noise_spec(('bit-flip', 0.1))    -> ('bit-flip', 0.1)
    """
    if noise is None:
        return None
    if isinstance(noise, str):
        text = noise.strip().lower()
        if text in ('', 'none'):
            return None
        name, sep, value = text.partition(':')
        if not sep:
            raise ModelError(f'噪声格式应为 名称:概率，例如 depolarizing:0.01，实际 {noise}')
        try:
            p = float(value)
        except ValueError:
            raise ModelError(f'噪声概率不是数字：{value}')
    else:
        try:
            name, p = noise
            p = float(p)
        except (TypeError, ValueError):
            raise ModelError(f'无法解析的噪声：{noise!r}')
    if name not in NOISE_NAMES and name != GLOBAL_DEPOLARIZING:
        raise ModelError(f'未知的噪声：{name}，可选 none, {", ".join(NOISE_NAMES)}, {GLOBAL_DEPOLARIZING}')
    if not 0 <= p <= 1:
        raise ModelError(f'噪声概率必须在 [0,1] 内：{p}')
    return name, p


def noise_layers(name, p, qubits):
    if name == GLOBAL_DEPOLARIZING:
        return [GlobalDepolarizing(p)]
    return [LocalOp((q,), 'noise', name, p=p) for q in qubits]


def _noise_metadata(noise):
    if noise is None:
        return {'noise': 'none', 'p': 0.0}
    name, p = noise
    metadata = {'noise': name, 'p': p}
    if name == 'mixed':
        metadata['mixed_order'] = list(MIXED_NOISE_ORDER)
    return metadata


def append_noise(model, name, p, targets=None):
    """
    在线路末尾追加一层噪声，得到新模型

    :param name: 单 qubit 噪声名，或 global-depolarizing
    :param targets: 单 qubit 噪声作用的 qubit，默认全部
    """
    name, p = parse_noise_spec((name, p))
    qubits = range(model.num_qubits) if targets is None else targets
    layers = model.circuit.layers + tuple(noise_layers(name, p, qubits))
    metadata = dict(model.metadata)
    metadata['appended_noise'] = list(metadata.get('appended_noise', [])) + [{'noise': name, 'p': p}]
    return replace(model, circuit=CircuitChannel(model.num_qubits, layers),
                   name=f'{model.name}+{name}:{p:g}', metadata=metadata)


# ---------------------------------------------------------------- 构造器

def _take_params(params, rng_seed, count):
    if params is not None:
        params = np.asarray(params, dtype=float).reshape(-1)
        if params.size != count:
            raise ModelError(f'参数个数不匹配：需要 {count} 个，实际 {params.size} 个')
        return params
    if rng_seed is None:
        raise ModelError('params 和 rng_seed 至少要给一个')
    return np.random.default_rng(rng_seed).uniform(0, 2 * np.pi, count)


def _zxz(qubit, thetas):
    return [LocalOp((qubit,), 'gate', 'RZ', (thetas[0],)),
            LocalOp((qubit,), 'gate', 'RX', (thetas[1],)),
            LocalOp((qubit,), 'gate', 'RZ', (thetas[2],))]


def entangling_pairs(num_qubits):
    """
    相邻 qubit 循环耦合，2 个 qubit 时只有一对，1 个时没有
    """
    if num_qubits == 1:
        return []
    if num_qubits == 2:
        return [(0, 1)]
    return [(j, (j + 1) % num_qubits) for j in range(num_qubits)]


def build_rotation_entangling(num_qubits, num_rotation_blocks=3, num_entangling_blocks=2, params=None,
                              rng_seed=None, noise=None, name=None):
    """
    旋转块和纠缠块交替排列的模型，测量最后一个 qubit

    旋转块：每个 qubit 上 RZ·RX·RZ
    纠缠块：相邻 qubit 循环做 XX 旋转
    噪声：第一个旋转块后面，每个 qubit 一层

    :param params: 参数向量，长度 3n·旋转块数 + 纠缠对数·纠缠块数
    :param rng_seed: 没有 params 时用它在 [0, 2π) 上均匀抽样
    :param noise: None、'none'、'depolarizing:0.01' 或 (name, p)
    """
    if num_qubits < 1:
        raise ModelError(f'qubit 数必须 ≥ 1：{num_qubits}')
    if num_rotation_blocks < 0 or num_entangling_blocks < 0:
        raise ModelError(f'块数不能为负：{num_rotation_blocks}, {num_entangling_blocks}')
    noise = parse_noise_spec(noise)
    pairs = entangling_pairs(num_qubits)
    count = 3 * num_qubits * num_rotation_blocks + len(pairs) * num_entangling_blocks
    params = _take_params(params, rng_seed, count)

    layers = []
    if noise is not None and num_rotation_blocks == 0:
        layers += noise_layers(*noise, range(num_qubits))
    cursor = 0
    rotations = entanglers = 0
    while rotations < num_rotation_blocks or entanglers < num_entangling_blocks:
        if rotations < num_rotation_blocks and (rotations <= entanglers or entanglers >= num_entangling_blocks):
            for q in range(num_qubits):
                layers += _zxz(q, params[cursor:cursor + 3])
                cursor += 3
            rotations += 1
            if rotations == 1 and noise is not None:
                layers += noise_layers(*noise, range(num_qubits))
        else:
            for pair in pairs:
                layers.append(LocalOp(pair, 'gate', 'XX', (params[cursor],)))
                cursor += 1
            entanglers += 1

    metadata = {
        'architecture': 'rotation-entangling',
        'num_rotation_blocks': num_rotation_blocks,
        'num_entangling_blocks': num_entangling_blocks,
        'num_params': count,
        'seed': rng_seed,
        'params': params.tolist(),
        **_noise_metadata(noise),
    }
    return DecisionModel(CircuitChannel(num_qubits, tuple(layers)), last_qubit_projective(num_qubits),
                         name or f'rotation-entangling-{num_qubits}', metadata)


def qcnn_pool_pairs(num_qubits):
    """
    池化对 (i, i+⌊n/2⌋+n%2)，前一半的信息汇到后一半，最后一个 qubit 总是汇点
    """
    half = num_qubits // 2
    offset = num_qubits - half
    return [(i, i + offset) for i in range(half)]


def qcnn_conv_pairs(num_qubits):
    """
    卷积层按砖墙排列：先偶数对，再奇数对，共 n−1 个门
    """
    return ([(i, i + 1) for i in range(0, num_qubits - 1, 2)] +
            [(i, i + 1) for i in range(1, num_qubits - 1, 2)])


def qcnn_num_params(num_qubits):
    return 9 * (num_qubits - 1) + 7 * (num_qubits // 2) + 3


def build_qcnn(num_qubits, params=None, rng_seed=None, noise=None, name=None):
    """
    一层卷积 + 一层池化的 QCNN，测量前在最后一个 qubit 上加一个 Z-X-Z 门 U

    C_i：两个 qubit 上各一个 RZ·RX·RZ，再接 exp(−i(aXX + bYY + cZZ)/2)，9 个参数
    P_i：两个 qubit 上各一个 RZ·RX·RZ，再接从被丢弃 qubit 到保留 qubit 的受控 RX，7 个参数
    噪声放在卷积层和池化层之间，每个 qubit 一层
    """
    if num_qubits < 2:
        raise ModelError(f'QCNN 至少需要 2 个 qubit：{num_qubits}')
    noise = parse_noise_spec(noise)
    count = qcnn_num_params(num_qubits)
    params = _take_params(params, rng_seed, count)

    layers = []
    cursor = 0
    conv_pairs = qcnn_conv_pairs(num_qubits)
    for a, b in conv_pairs:
        thetas = params[cursor:cursor + 9]
        layers += _zxz(a, thetas[0:3]) + _zxz(b, thetas[3:6])
        layers += [LocalOp((a, b), 'gate', 'XX', (thetas[6],)),
                   LocalOp((a, b), 'gate', 'YY', (thetas[7],)),
                   LocalOp((a, b), 'gate', 'ZZ', (thetas[8],))]
        cursor += 9

    if noise is not None:
        layers += noise_layers(*noise, range(num_qubits))

    pool_pairs = qcnn_pool_pairs(num_qubits)
    for source, sink in pool_pairs:
        thetas = params[cursor:cursor + 7]
        layers += _zxz(source, thetas[0:3]) + _zxz(sink, thetas[3:6])
        layers.append(LocalOp((source, sink), 'gate', 'CRX', (thetas[6],)))
        cursor += 7

    layers += _zxz(num_qubits - 1, params[cursor:cursor + 3])

    metadata = {
        'architecture': 'qcnn',
        'conv_gates': len(conv_pairs),
        'pool_gates': len(pool_pairs),
        'conv_unit': 'RZ·RX·RZ ⊗ RZ·RX·RZ, exp(-i(a XX + b YY + c ZZ)/2)',
        'pool_unit': 'RZ·RX·RZ ⊗ RZ·RX·RZ, CRX(source → sink)',
        'num_params': count,
        'seed': rng_seed,
        'params': params.tolist(),
        **_noise_metadata(noise),
    }
    return DecisionModel(CircuitChannel(num_qubits, tuple(layers)), last_qubit_projective(num_qubits),
                         name or f'qcnn-{num_qubits}', metadata)


# ---------------------------------------------------------------- 模型文件

def encode_complex(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()


def decode_complex(data):
    try:
        array = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise ModelError('复数矩阵必须写成 [实部, 虚部] 的嵌套列表')
    if array.ndim == 0 or array.shape[-1] != 2:
        raise ModelError(f'复数矩阵的最内层必须是 [实部, 虚部]：形状 {array.shape}')
    return array[..., 0] + 1j * array[..., 1]


def _layer_to_spec(layer):
    if isinstance(layer, GlobalDepolarizing):
        return {'kind': 'noise', 'name': GLOBAL_DEPOLARIZING, 'p': layer.p}
    if layer.kind == 'gate':
        spec = {'kind': 'gate', 'name': layer.name, 'targets': list(layer.targets), 'params': list(layer.params)}
        if layer.name.upper() == 'UNITARY':
            spec['matrix'] = encode_complex(layer.matrix)
        return spec
    if layer.kind == 'noise':
        return {'kind': 'noise', 'name': layer.name, 'p': layer.p, 'targets': list(layer.targets)}
    return {'kind': 'raw_kraus', 'matrices': [encode_complex(op) for op in layer.kraus_ops],
            'targets': list(layer.targets)}


def _layer_from_spec(spec, index):
    if not isinstance(spec, dict) or 'kind' not in spec:
        raise ModelError(f'第 {index} 层缺少 kind')
    kind = spec['kind']
    try:
        if kind == 'gate':
            matrices = (decode_complex(spec['matrix']),) if 'matrix' in spec else ()
            return LocalOp(tuple(spec['targets']), 'gate', spec['name'], tuple(spec.get('params', ())),
                           matrices=matrices)
        if kind == 'noise':
            if spec.get('name') == GLOBAL_DEPOLARIZING:
                return GlobalDepolarizing(float(spec['p']))
            return LocalOp(tuple(spec['targets']), 'noise', spec['name'], p=float(spec['p']))
        if kind == 'raw_kraus':
            return LocalOp(tuple(spec['targets']), 'raw_kraus',
                           matrices=tuple(decode_complex(m) for m in spec['matrices']))
    except KeyError as e:
        raise ModelError(f'第 {index} 层缺少字段：{e}')
    except (TypeError, ChannelError) as e:
        raise ModelError(f'第 {index} 层无效：{e}')
    raise ModelError(f'第 {index} 层的 kind 未知：{kind}')


def _povm_to_spec(povm):
    if povm.name == 'last_qubit':
        return 'last_qubit'
    return {'effects': [encode_complex(effect) for effect in povm.local_effects.values()],
            'labels': list(povm.labels), 'targets': list(povm.support)}


def _povm_from_spec(spec, num_qubits):
    if spec == 'last_qubit':
        return last_qubit_projective(num_qubits)
    if not isinstance(spec, dict):
        raise ModelError(f'无法识别的 measurement：{spec!r}')
    targets = spec.get('targets')
    labels = spec.get('labels')
    try:
        if 'raw_ops' in spec:
            ops = [decode_complex(op) for op in spec['raw_ops']]
            return from_measurement_ops(ops, targets, num_qubits, labels)
        if 'effects' in spec:
            effects = [decode_complex(effect) for effect in spec['effects']]
            labels = labels or [str(i) for i in range(len(effects))]
            if len(labels) != len(effects):
                raise ModelError(f'标签数 {len(labels)} 与效应数 {len(effects)} 不一致')
            if targets is None:
                targets = range(num_qubits)
            return Povm(num_qubits, tuple(targets), dict(zip(labels, effects)))
    except MeasurementError as e:
        raise ModelError(f'measurement 无效：{e}')
    raise ModelError('measurement 需要 raw_ops 或 effects')


def model_to_spec(model, solver=None):
    """
    模型转换为可以写成 json 的字典
    """
    spec = {
        'num_qubits': model.num_qubits,
        'name': model.name,
        'layers': [_layer_to_spec(layer) for layer in model.circuit.layers],
        'measurement': _povm_to_spec(model.povm),
        'metadata': model.metadata,
    }
    if solver:
        spec['solver'] = dict(solver)
    return spec


def model_from_spec(spec):
    """
    从字典构造模型，字段缺失或取值无效时抛出 ModelError
    """
    if not isinstance(spec, dict):
        raise ModelError('模型文件的顶层必须是对象')
    try:
        num_qubits = int(spec['num_qubits'])
    except (KeyError, TypeError, ValueError):
        raise ModelError('模型文件缺少有效的 num_qubits')
    if num_qubits < 1:
        raise ModelError(f'qubit 数必须 ≥ 1：{num_qubits}')
    layers = spec.get('layers', [])
    if not isinstance(layers, list):
        raise ModelError('layers 必须是列表')
    layers = tuple(_layer_from_spec(layer, i) for i, layer in enumerate(layers))
    try:
        circuit = CircuitChannel(num_qubits, layers)
    except ChannelError as e:
        raise ModelError(str(e))
    povm = _povm_from_spec(spec.get('measurement', 'last_qubit'), num_qubits)
    metadata = spec.get('metadata') or {}
    if not isinstance(metadata, dict):
        raise ModelError('metadata 必须是对象')
    return DecisionModel(circuit, povm, spec.get('name', 'model'), metadata)


def load_model(path):
    """
    读取模型文件，返回 (模型, solver 配置字典)
    """
    try:
        spec = json_read(path)
    except FileNotFoundError:
        raise ModelError(f'模型文件不存在：{path}')
    except ValueError as e:
        raise ModelError(f'模型文件不是有效的 json：{path}，{e}')
    solver = spec.get('solver') if isinstance(spec, dict) else None
    return model_from_spec(spec), solver or {}


def save_model(model, path, solver=None):
    return json_save(model_to_spec(model, solver), path)


