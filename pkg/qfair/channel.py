# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：channel.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：Kraus 信道、门和噪声、线路的作用 E(ρ) 与伴随作用 E†(M)
#         稠密计算时局部算符只作用在对应的张量轴上，不展开成 2^n×2^n 的 Kraus 矩阵
# ---------------------------------------
from functools import cached_property
from dataclasses import dataclass

import numpy as np

from qfair.config import settings
from qfair.qstate import DensityMatrix, DimensionError


class ChannelError(ValueError):
    """ 信道、门或噪声参数错误"""
    pass


IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

FIXED_GATES = {
    'X': PAULI_X,
    'Y': PAULI_Y,
    'Z': PAULI_Z,
    'H': HADAMARD,
    'CNOT': CNOT,
}

# 旋转门 exp(−iθP/2) 的生成元
ROTATION_GATES = {
    'RX': PAULI_X,
    'RY': PAULI_Y,
    'RZ': PAULI_Z,
    'XX': np.kron(PAULI_X, PAULI_X),
    'YY': np.kron(PAULI_Y, PAULI_Y),
    'ZZ': np.kron(PAULI_Z, PAULI_Z),
}

FLIP_NOISES = {
    'bit-flip': PAULI_X,
    'phase-flip': PAULI_Z,
    'bit-phase-flip': PAULI_Y,
}

NOISE_NAMES = ('bit-flip', 'phase-flip', 'bit-phase-flip', 'depolarizing', 'mixed')

# mixed 噪声依次作用的三种噪声，概率都是 p
MIXED_NOISE_ORDER = ('bit-flip', 'phase-flip', 'depolarizing')

GLOBAL_DEPOLARIZING = 'global-depolarizing'


def rotation(generator, theta):
    """ exp(−iθP/2) = cos(θ/2) I − i sin(θ/2) P，P 为 Pauli 串"""
    return np.cos(theta / 2) * np.eye(len(generator), dtype=complex) - 1j * np.sin(theta / 2) * generator


def gate_matrix(name, params=(), matrix=None):
    """
    按名字生成门的矩阵

    :param name: X Y Z H CNOT RX RY RZ XX YY ZZ CRX unitary
    :param params: 旋转角
    :param matrix: name 为 unitary 时给出的矩阵
    """
    key = name.upper()
    params = tuple(float(theta) for theta in params)
    if key in FIXED_GATES:
        if params:
            raise ChannelError(f'{name} 门没有参数，实际给了 {len(params)} 个')
        return FIXED_GATES[key].copy()
    if key in ROTATION_GATES or key == 'CRX':
        if len(params) != 1:
            raise ChannelError(f'{name} 门需要 1 个参数，实际给了 {len(params)} 个')
        if key == 'CRX':
            gate = np.eye(4, dtype=complex)
            gate[2:, 2:] = rotation(PAULI_X, params[0])
            return gate
        return rotation(ROTATION_GATES[key], params[0])
    if key == 'UNITARY':
        if matrix is None:
            raise ChannelError('unitary 门必须给出矩阵')
        return np.array(matrix, dtype=complex)
    raise ChannelError(f'未知的门：{name}')


def _check_probability(p):
    if not 0 <= p <= 1:
        raise ChannelError(f'噪声概率必须在 [0,1] 内：{p}')
    return float(p)


def _canonical_kraus(kraus_ops):
    """
    通过 Choi 矩阵的特征分解把 Kraus 族化成最少个数，信道本身不变
    """
    dim = kraus_ops[0].shape[0]
    vectors = np.array([op.reshape(-1) for op in kraus_ops])
    choi = vectors.T @ vectors.conj()
    values, vecs = np.linalg.eigh(choi)
    cutoff = settings.tolerance.kraus * 1e-3
    return [np.sqrt(value) * vecs[:, k].reshape(dim, dim)
            for k, value in reversed(list(enumerate(values))) if value > cutoff]


def noise_kraus(name, p):
    """
    单 qubit 噪声的 Kraus 矩阵列表，系数为 0 的项去掉

    翻转噪声：{√(1−p) I, √p U}
    退极化：{√(1−3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}
    mixed：bit-flip、phase-flip、depolarizing 依次作用，概率都为 p
    """
    p = _check_probability(p)
    if name in FLIP_NOISES:
        coefficients = [(np.sqrt(1 - p), IDENTITY), (np.sqrt(p), FLIP_NOISES[name])]
    elif name == 'depolarizing':
        coefficients = [(np.sqrt(1 - 3 * p / 4), IDENTITY), (np.sqrt(p / 4), PAULI_X),
                        (np.sqrt(p / 4), PAULI_Y), (np.sqrt(p / 4), PAULI_Z)]
    elif name == 'mixed':
        composite = [IDENTITY]
        for part in MIXED_NOISE_ORDER:
            composite = [later @ earlier for earlier in composite for later in noise_kraus(part, p)]
        return _canonical_kraus(composite)
    else:
        raise ChannelError(f'未知的噪声：{name}，可选 {", ".join(NOISE_NAMES)}')
    return [coefficient * op for coefficient, op in coefficients if coefficient > 0]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """
    Kraus 族 {E_j} 表示的信道，Σ E_j†E_j = I
    """
    num_qubits: int
    kraus_ops: tuple

    def __post_init__(self):
        dim = 2 ** self.num_qubits
        ops = tuple(np.array(op, dtype=complex) for op in self.kraus_ops)
        if not ops:
            raise ChannelError('Kraus 族不能为空')
        for op in ops:
            if op.shape != (dim, dim):
                raise ChannelError(f'{self.num_qubits} 个 qubit 的 Kraus 矩阵应为 {dim}×{dim}，实际 {op.shape}')
        _check_completeness(ops)
        object.__setattr__(self, 'kraus_ops', ops)

    def apply_matrix(self, matrix):
        return sum(op @ matrix @ op.conj().T for op in self.kraus_ops)

    def adjoint_matrix(self, matrix):
        return sum(op.conj().T @ matrix @ op for op in self.kraus_ops)


def _check_completeness(ops):
    dim = ops[0].shape[0]
    total = sum(op.conj().T @ op for op in ops)
    deviation = np.max(np.abs(total - np.eye(dim)))
    if deviation > settings.tolerance.kraus:
        raise ChannelError(f'Kraus 族不满足 Σ E†E = I：最大偏差 {deviation!r}')


def noise_channel(name, p):
    """
    单 qubit 噪声信道
    """
    return KrausChannel(1, tuple(noise_kraus(name, p)))


@dataclass(frozen=True, eq=False)
class LocalOp:
    """
    作用在 1 个或 2 个 qubit 上的局部操作

    kind：
        gate       门，name + params（unitary 门给 matrix）
        noise      单 qubit 噪声，name + p
        raw_kraus  模型文件里直接给出的 Kraus 矩阵 matrices
    """
    targets: tuple
    kind: str = 'gate'
    name: str = ''
    params: tuple = ()
    p: float = 0.0
    matrices: tuple = ()

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        if not 1 <= len(targets) <= 2:
            raise ChannelError(f'局部操作只能作用在 1 或 2 个 qubit 上：{targets}')
        if len(set(targets)) != len(targets) or min(targets) < 0:
            raise ChannelError(f'目标 qubit 无效：{targets}')
        object.__setattr__(self, 'targets', targets)
        object.__setattr__(self, 'params', tuple(float(theta) for theta in self.params))
        dim = 2 ** len(targets)

        if self.kind == 'gate':
            matrix = gate_matrix(self.name, self.params, self.matrices[0] if self.matrices else None)
            if matrix.shape != (dim, dim):
                raise ChannelError(f'{self.name} 门作用在 {len(targets)} 个 qubit 上，矩阵维度应为 {dim}，实际 {matrix.shape}')
            deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim)))
            if deviation > settings.tolerance.unitary:
                raise ChannelError(f'{self.name} 门不是幺正的：最大偏差 {deviation!r}')
            ops = (matrix,)
        elif self.kind == 'noise':
            if len(targets) != 1:
                raise ChannelError(f'噪声只能作用在单个 qubit 上：{targets}')
            object.__setattr__(self, 'p', _check_probability(self.p))
            ops = tuple(noise_kraus(self.name, self.p))
        elif self.kind == 'raw_kraus':
            ops = tuple(np.array(op, dtype=complex) for op in self.matrices)
            if not ops:
                raise ChannelError('raw_kraus 至少需要一个矩阵')
            for op in ops:
                if op.shape != (dim, dim):
                    raise ChannelError(f'raw_kraus 矩阵维度应为 {dim}，实际 {op.shape}')
            _check_completeness(ops)
        else:
            raise ChannelError(f'未知的操作类型：{self.kind}')

        for op in ops:
            op.flags.writeable = False
        object.__setattr__(self, 'kraus_ops', ops)

    @property
    def is_unitary(self):
        return self.kind == 'gate'

    @property
    def matrix(self):
        if not self.is_unitary:
            raise ChannelError(f'{self.kind} 操作没有单个矩阵')
        return self.kraus_ops[0]


@dataclass(frozen=True, eq=False)
class GlobalDepolarizing:
    """
    整个寄存器上的退极化 E(ρ) = (1−p)ρ + p·tr(ρ)·I/N
    """
    p: float
    name: str = GLOBAL_DEPOLARIZING
    kind: str = 'global_noise'

    def __post_init__(self):
        object.__setattr__(self, 'p', _check_probability(self.p))

    @property
    def targets(self):
        return ()

    def kraus(self, num_qubits):
        """
        Pauli 形式的 Kraus 族，只在 qubit 数不超过 4 时展开
        """
        if num_qubits > 4:
            raise ChannelError(f'全局退极化的 Kraus 形式只支持 ≤ 4 个 qubit，实际 {num_qubits}')
        paulis = [IDENTITY]
        for _ in range(num_qubits):
            paulis = [np.kron(left, right) for left in paulis for right in (IDENTITY, PAULI_X, PAULI_Y, PAULI_Z)]
        weight = self.p / 4 ** num_qubits
        ops = [np.sqrt(1 - self.p + weight) * paulis[0]]
        if weight > 0:
            ops += [np.sqrt(weight) * pauli for pauli in paulis[1:]]
        return ops


@dataclass(frozen=True, eq=False)
class CircuitChannel:
    """
    线路 E = E_d ∘ … ∘ E_1，layers 按作用顺序排列
    """
    num_qubits: int
    layers: tuple = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ChannelError(f'qubit 数必须 ≥ 1：{self.num_qubits}')
        layers = tuple(self.layers)
        for layer in layers:
            if not isinstance(layer, (LocalOp, GlobalDepolarizing)):
                raise ChannelError(f'不支持的线路层：{type(layer).__name__}')
            if any(t >= self.num_qubits for t in layer.targets):
                raise ChannelError(f'目标 qubit {layer.targets} 超出范围，线路只有 {self.num_qubits} 个 qubit')
        object.__setattr__(self, 'layers', layers)

    @property
    def is_unitary(self):
        return all(isinstance(layer, LocalOp) and layer.is_unitary for layer in self.layers)

    @cached_property
    def fused(self):
        """ 合并相邻门后的等价线路"""
        return CircuitChannel(self.num_qubits, tuple(fuse_gates(self.layers)))


def apply_local(tensor, op, axes):
    """
    把 2^k×2^k 的局部矩阵 op 作用在张量的 axes 轴上（新[a] = Σ_b op[a,b] 旧[b]）
    """
    k = len(axes)
    op = np.asarray(op).reshape((2,) * (2 * k))
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(moved, list(range(k)), list(axes))


def lift(matrix, targets, qubits):
    """
    把作用在 targets 上的矩阵写成作用在 qubits（按给定顺序）上的矩阵
    """
    qubits = list(qubits)
    dim = 2 ** len(qubits)
    identity = np.eye(dim, dtype=complex).reshape((2,) * (2 * len(qubits)))
    axes = [qubits.index(t) for t in targets]
    return apply_local(identity, matrix, axes).reshape(dim, dim)


def _merge(group):
    if len(group) == 1:
        return group[0]
    qubits = tuple(sorted(set().union(*(gate.targets for gate in group))))
    matrix = np.eye(2 ** len(qubits), dtype=complex)
    for gate in group:
        matrix = lift(gate.matrix, gate.targets, qubits) @ matrix
    return LocalOp(qubits, 'gate', 'unitary', matrices=(matrix,))


def fuse_gates(layers):
    """
    相邻的门如果合起来只涉及不超过 2 个 qubit，就乘成一个门
    """
    fused = []
    group = []
    qubits = set()
    for layer in layers:
        if isinstance(layer, LocalOp) and layer.is_unitary:
            joint = qubits | set(layer.targets)
            if group and len(joint) > 2:
                fused.append(_merge(group))
                group, joint = [], set(layer.targets)
            group.append(layer)
            qubits = joint
            continue
        if group:
            fused.append(_merge(group))
            group, qubits = [], set()
        fused.append(layer)
    if group:
        fused.append(_merge(group))
    return fused


def _kraus_on_operator(matrix, num_qubits, kraus_ops, targets, adjoint):
    dim = 2 ** num_qubits
    tensor = matrix.reshape((2,) * (2 * num_qubits))
    rows = list(targets)
    cols = [num_qubits + t for t in targets]
    result = np.zeros_like(tensor)
    for op in kraus_ops:
        if adjoint:
            # E† M E
            left, right = op.conj().T, op.T
        else:
            # E ρ E†
            left, right = op, op.conj()
        result += apply_local(apply_local(tensor, left, rows), right, cols)
    return result.reshape(dim, dim)


def _apply_layer(matrix, num_qubits, layer, adjoint=False):
    if isinstance(layer, GlobalDepolarizing):
        dim = 2 ** num_qubits
        return (1 - layer.p) * matrix + layer.p * np.trace(matrix) / dim * np.eye(dim)
    return _kraus_on_operator(matrix, num_qubits, layer.kraus_ops, layer.targets, adjoint)


def _hermitize(matrix):
    return (matrix + matrix.conj().T) / 2


def _check_circuit_dim(channel, num_qubits):
    if channel.num_qubits != num_qubits:
        raise DimensionError(f'线路有 {channel.num_qubits} 个 qubit，输入有 {num_qubits} 个')


def apply(channel, rho):
    """
    按顺序作用线路的每一层，返回 E(ρ)
    """
    _check_circuit_dim(channel, rho.num_qubits)
    matrix = np.array(rho.matrix)
    for layer in channel.fused.layers:
        matrix = _apply_layer(matrix, channel.num_qubits, layer)
    return DensityMatrix(channel.num_qubits, _hermitize(matrix))


def adjoint_apply(channel, effect):
    """
    Heisenberg 绘景下的 E†(M)，层的顺序与 apply 相反
    """
    effect = np.asarray(effect, dtype=complex)
    dim = 2 ** channel.num_qubits
    if effect.shape != (dim, dim):
        raise DimensionError(f'算符维度应为 {dim}×{dim}，实际 {effect.shape}')
    asymmetry = np.max(np.abs(effect - effect.conj().T))
    if asymmetry > settings.tolerance.state_check:
        raise ChannelError(f'算符不是 Hermitian：最大偏差 {asymmetry!r}')
    matrix = np.array(effect)
    for layer in reversed(channel.fused.layers):
        matrix = _apply_layer(matrix, channel.num_qubits, layer, adjoint=True)
    return _hermitize(matrix)


def embed(op, num_qubits):
    """
    局部操作张量上恒等，得到 n 个 qubit 上的 Kraus 信道
    """
    if isinstance(op, GlobalDepolarizing):
        return KrausChannel(num_qubits, tuple(op.kraus(num_qubits)))
    if any(t >= num_qubits for t in op.targets):
        raise ChannelError(f'目标 qubit {op.targets} 超出范围，只有 {num_qubits} 个 qubit')
    dim = 2 ** num_qubits
    identity = np.eye(dim, dtype=complex).reshape((2,) * (2 * num_qubits))
    return KrausChannel(num_qubits, tuple(apply_local(identity, local, op.targets).reshape(dim, dim)
                                          for local in op.kraus_ops))


def circuit_unitary(channel):
    """
    只含门的线路对应的 2^n×2^n 幺正矩阵
    """
    if not channel.is_unitary:
        raise ChannelError('线路含有噪声，没有对应的幺正矩阵')
    n = channel.num_qubits
    dim = 2 ** n
    unitary = np.eye(dim, dtype=complex).reshape((2,) * (2 * n))
    for layer in channel.fused.layers:
        unitary = apply_local(unitary, layer.matrix, layer.targets)
    return unitary.reshape(dim, dim)


def compose(first, second):
    """
    second ∘ first，先作用 first
    """
    if first.num_qubits != second.num_qubits:
        raise DimensionError(f'qubit 数不一致：{first.num_qubits} 和 {second.num_qubits}')
    return CircuitChannel(first.num_qubits, first.layers + second.layers)
