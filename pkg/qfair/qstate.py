# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：qstate.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：量子态（纯态、密度矩阵）、输出分布，以及迹距离和全变差距离
#         qubit 0 是振幅下标的最高位
# ---------------------------------------
from dataclasses import dataclass

import numpy as np

from qfair.config import settings


class StateError(ValueError):
    """ 量子态或分布不满足约束"""
    pass


class DimensionError(ValueError):
    """ 维度或输出标签不一致"""
    pass


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


def _check_num_qubits(num_qubits):
    if int(num_qubits) != num_qubits or num_qubits < 1:
        raise StateError(f'qubit 数必须是正整数：{num_qubits}')
    return int(num_qubits)


@dataclass(frozen=True, eq=False)
class PureState:
    """
    n 个 qubit 的纯态 |ψ⟩，振幅长度 2^n，范数为 1
    """
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        num_qubits = _check_num_qubits(self.num_qubits)
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape != (2 ** num_qubits,):
            raise DimensionError(f'{num_qubits} 个 qubit 需要 {2 ** num_qubits} 个振幅，实际 {amplitudes.size} 个')
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1) > settings.tolerance.norm:
            raise StateError(f'纯态范数不为 1：{norm!r}')
        object.__setattr__(self, 'num_qubits', num_qubits)
        object.__setattr__(self, 'amplitudes', _frozen(amplitudes))

    @property
    def dim(self):
        return 2 ** self.num_qubits

    def overlap(self, other):
        """ ⟨self|other⟩"""
        if other.num_qubits != self.num_qubits:
            raise DimensionError(f'qubit 数不一致：{self.num_qubits} 和 {other.num_qubits}')
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self):
        return pure_to_density(self)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    密度矩阵 ρ：Hermitian、半正定、迹为 1

    半正定检查要做一次特征值分解，超过 settings.dense.psd_check_max_qubits 个 qubit 时跳过，
    由产生它的运算（信道作用、凸组合）保证
    """
    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        num_qubits = _check_num_qubits(self.num_qubits)
        dim = 2 ** num_qubits
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (dim, dim):
            raise DimensionError(f'{num_qubits} 个 qubit 的密度矩阵应为 {dim}×{dim}，实际 {matrix.shape}')
        tol = settings.tolerance
        asymmetry = np.max(np.abs(matrix - matrix.conj().T))
        if asymmetry > tol.hermitian:
            raise StateError(f'密度矩阵不是 Hermitian：最大偏差 {asymmetry!r}')
        trace = np.trace(matrix)
        if abs(trace - 1) > tol.trace:
            raise StateError(f'密度矩阵的迹不为 1：{trace!r}')
        if num_qubits <= settings.dense.psd_check_max_qubits:
            smallest = np.linalg.eigvalsh(matrix)[0]
            if smallest < -tol.psd:
                raise StateError(f'密度矩阵不是半正定的：最小特征值 {smallest!r}')
        object.__setattr__(self, 'num_qubits', num_qubits)
        object.__setattr__(self, 'matrix', _frozen(matrix))

    @property
    def dim(self):
        return 2 ** self.num_qubits

    def expectation(self, effect):
        """ tr(Mρ)，M 为 Hermitian 时结果是实数"""
        effect = np.asarray(effect)
        if effect.shape != self.matrix.shape:
            raise DimensionError(f'算符维度 {effect.shape} 与密度矩阵 {self.matrix.shape} 不一致')
        return float(np.real(np.sum(effect * self.matrix.T)))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """
    测量结果的概率分布，标签为字符串，按标签排序保存
    """
    labels: tuple
    probabilities: np.ndarray

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        probabilities = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if len(labels) != probabilities.size:
            raise DimensionError(f'标签数 {len(labels)} 与概率数 {probabilities.size} 不一致')
        if len(set(labels)) != len(labels):
            raise StateError(f'输出标签重复：{labels}')
        tol = settings.tolerance
        if np.any(probabilities < -tol.probability) or np.any(probabilities > 1 + tol.probability):
            raise StateError(f'概率超出 [0,1]：{probabilities.tolist()}')
        total = probabilities.sum()
        if abs(total - 1) > tol.distribution:
            raise StateError(f'概率之和不为 1：{total!r}')
        order = sorted(range(len(labels)), key=lambda i: labels[i])
        probabilities = probabilities[order]
        probabilities.flags.writeable = False
        object.__setattr__(self, 'labels', tuple(labels[i] for i in order))
        object.__setattr__(self, 'probabilities', probabilities)

    def __getitem__(self, label):
        try:
            return float(self.probabilities[self.labels.index(str(label))])
        except ValueError:
            raise KeyError(label)

    def as_dict(self):
        return {label: float(p) for label, p in zip(self.labels, self.probabilities)}


def pure_to_density(psi):
    """
    纯态转换为秩一投影 |ψ⟩⟨ψ|
    """
    amplitudes = psi.amplitudes
    return DensityMatrix(psi.num_qubits, np.outer(amplitudes, amplitudes.conj()))


def as_density(state):
    """
    PureState 转为 DensityMatrix，DensityMatrix 原样返回
    """
    if isinstance(state, PureState):
        return pure_to_density(state)
    if isinstance(state, DensityMatrix):
        return state
    raise StateError(f'不支持的量子态类型：{type(state).__name__}')


def _check_same_qubits(rho, sigma):
    if rho.num_qubits != sigma.num_qubits:
        raise DimensionError(f'qubit 数不一致：{rho.num_qubits} 和 {sigma.num_qubits}')


def trace_distance(rho, sigma):
    """
    迹距离 D(ρ,σ) = ½ tr|ρ−σ|，用差的 Hermitian 特征值计算
    """
    rho, sigma = as_density(rho), as_density(sigma)
    _check_same_qubits(rho, sigma)
    difference = rho.matrix - sigma.matrix
    difference = (difference + difference.conj().T) / 2
    distance = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(difference)))
    return float(min(max(distance, 0.0), 1.0))


def tv_distance(p, q):
    """
    全变差距离 d(p,q) = ½ Σ|p_i − q_i|，两个分布的标签必须相同
    """
    if p.labels != q.labels:
        raise DimensionError(f'输出标签不一致：{p.labels} 和 {q.labels}')
    distance = 0.5 * np.sum(np.abs(p.probabilities - q.probabilities))
    return float(min(max(distance, 0.0), 1.0))


def helstrom_probability(rho, sigma):
    """
    单次区分 ρ、σ 的最优成功概率 ½ + ½ D(ρ,σ)
    """
    return 0.5 + 0.5 * trace_distance(rho, sigma)


def basis_state(num_qubits, index=0):
    num_qubits = _check_num_qubits(num_qubits)
    dim = 2 ** num_qubits
    if not 0 <= index < dim:
        raise DimensionError(f'基矢下标超出范围：{index}，维度 {dim}')
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[index] = 1
    return PureState(num_qubits, amplitudes)


def maximally_mixed(num_qubits):
    num_qubits = _check_num_qubits(num_qubits)
    dim = 2 ** num_qubits
    return DensityMatrix(num_qubits, np.eye(dim, dtype=complex) / dim)


def random_pure_state(num_qubits, rng_seed=None):
    """
    随机纯态：独立复高斯分量归一化，同一个种子得到同一个态

    rng_seed 也可以直接传 np.random.Generator，批量抽样时共用一个生成器
    """
    num_qubits = _check_num_qubits(num_qubits)
    rng = np.random.default_rng(rng_seed)
    dim = 2 ** num_qubits
    amplitudes = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(num_qubits, amplitudes / np.linalg.norm(amplitudes))


def random_density_matrix(num_qubits, rng_seed=None, rank=None):
    """
    随机混态：rank 个随机纯态按归一化的均匀随机权重混合，默认 rank = 2^n
    """
    num_qubits = _check_num_qubits(num_qubits)
    rng = np.random.default_rng(rng_seed)
    rank = 2 ** num_qubits if rank is None else int(rank)
    if rank < 1:
        raise StateError(f'rank 必须 ≥ 1：{rank}')
    states = [random_pure_state(num_qubits, rng) for _ in range(rank)]
    weights = rng.random(rank)
    return mix(states, weights / weights.sum())


def mix(states, weights):
    """
    凸组合 Σ w_k ρ_k，权重非负且和为 1
    """
    states = [as_density(state) for state in states]
    weights = np.asarray(weights, dtype=float)
    if not states or len(states) != weights.size:
        raise StateError(f'态的个数 {len(states)} 与权重个数 {weights.size} 不一致')
    if np.any(weights < 0) or abs(weights.sum() - 1) > settings.tolerance.distribution:
        raise StateError(f'权重必须非负且和为 1：{weights.tolist()}')
    num_qubits = states[0].num_qubits
    for state in states[1:]:
        _check_same_qubits(states[0], state)
    matrix = sum(weight * state.matrix for weight, state in zip(weights, states))
    return DensityMatrix(num_qubits, matrix)


def partial_trace(matrix, num_qubits, keep):
    """
    保留 keep 中的 qubit（按给定顺序），迹掉其余 qubit
    """
    keep = list(keep)
    tensor = np.asarray(matrix).reshape((2,) * (2 * num_qubits))
    rows = list(range(num_qubits))
    cols = [num_qubits + q for q in range(num_qubits)]
    for q in range(num_qubits):
        if q not in keep:
            cols[q] = rows[q]
    output = [rows[q] for q in keep] + [cols[q] for q in keep]
    reduced = np.einsum(tensor, rows + cols, output)
    dim = 2 ** len(keep)
    return reduced.reshape(dim, dim)
