# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：measurement.py
#   版本：0.2
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：POVM 测量，只保存效应算符 ℳ_i = M_i†M_i，不保存测量后的态
# ---------------------------------------
from functools import cached_property
from dataclasses import dataclass

import numpy as np

from qfair.config import settings
from qfair.channel import apply_local
from qfair.qstate import OutcomeDistribution, DimensionError, partial_trace


class MeasurementError(ValueError):
    """ 测量算符不满足约束"""
    pass


@dataclass(frozen=True, eq=False)
class Povm:
    """
    POVM {ℳ_i}，效应算符只作用在 support 上（其余 qubit 为恒等）

    :param num_qubits: 整个寄存器的 qubit 数
    :param support: 效应算符作用的 qubit，顺序决定局部矩阵的张量顺序
    :param local_effects: 标签 → 2^k×2^k 局部效应
    :param name: last_qubit 表示最后一个 qubit 的计算基测量
    :param completeness_tolerance: Σℳ_i = I 的容差，默认 settings.tolerance.povm
    """
    num_qubits: int
    support: tuple
    local_effects: dict
    name: str = ''
    completeness_tolerance: float = None

    def __post_init__(self):
        if self.num_qubits < 1:
            raise MeasurementError(f'qubit 数必须 ≥ 1：{self.num_qubits}')
        support = tuple(int(q) for q in self.support)
        if not support or len(set(support)) != len(support):
            raise MeasurementError(f'测量的 qubit 无效：{support}')
        if min(support) < 0 or max(support) >= self.num_qubits:
            raise MeasurementError(f'测量的 qubit {support} 超出范围，只有 {self.num_qubits} 个 qubit')
        if not self.local_effects:
            raise MeasurementError('POVM 至少需要一个结果')

        dim = 2 ** len(support)
        tol = settings.tolerance
        effects = {}
        for label, effect in self.local_effects.items():
            effect = np.array(effect, dtype=complex)
            if effect.shape != (dim, dim):
                raise MeasurementError(f'结果 {label} 的效应维度应为 {dim}×{dim}，实际 {effect.shape}')
            asymmetry = np.max(np.abs(effect - effect.conj().T))
            if asymmetry > tol.hermitian:
                raise MeasurementError(f'结果 {label} 的效应不是 Hermitian：最大偏差 {asymmetry!r}')
            smallest = np.linalg.eigvalsh(effect)[0]
            if smallest < -tol.psd:
                raise MeasurementError(f'结果 {label} 的效应不是半正定的：最小特征值 {smallest!r}')
            effect.flags.writeable = False
            effects[str(label)] = effect
        if len(effects) != len(self.local_effects):
            raise MeasurementError(f'输出标签重复：{list(self.local_effects)}')

        completeness = tol.povm if self.completeness_tolerance is None else self.completeness_tolerance
        deviation = np.max(np.abs(sum(effects.values()) - np.eye(dim)))
        if deviation > completeness:
            raise MeasurementError(f'效应之和不为 I：最大偏差 {deviation!r}')

        object.__setattr__(self, 'support', support)
        object.__setattr__(self, 'local_effects', {label: effects[label] for label in sorted(effects)})

    @property
    def labels(self):
        return tuple(self.local_effects)

    @property
    def dim(self):
        return 2 ** self.num_qubits

    def local_sum(self, subset):
        """ Σ_{i∈A} ℳ_i 的局部矩阵"""
        missing = [label for label in subset if label not in self.local_effects]
        if missing:
            raise MeasurementError(f'未知的输出标签：{missing}')
        dim = 2 ** len(self.support)
        return sum((self.local_effects[label] for label in subset), np.zeros((dim, dim), dtype=complex))

    def embed_effect(self, local):
        """ 局部矩阵张量上其余 qubit 的恒等，得到 2^n×2^n 矩阵"""
        n = self.num_qubits
        identity = np.eye(self.dim, dtype=complex).reshape((2,) * (2 * n))
        return apply_local(identity, local, self.support).reshape(self.dim, self.dim)

    @cached_property
    def effects(self):
        """ 标签 → 2^n×2^n 效应，用到时才展开"""
        return {label: self.embed_effect(effect) for label, effect in self.local_effects.items()}


def last_qubit_projective(num_qubits):
    """
    最后一个 qubit 的计算基测量 {I⊗|0⟩⟨0|, I⊗|1⟩⟨1|}
    """
    effects = {'0': np.diag([1, 0]).astype(complex), '1': np.diag([0, 1]).astype(complex)}
    return Povm(num_qubits, (num_qubits - 1,), effects, name='last_qubit')


def uniform_povm(num_qubits, num_outcomes=2):
    """
    不含信息的测量，每个效应都是 I/k
    """
    if num_outcomes < 1:
        raise MeasurementError(f'结果数必须 ≥ 1：{num_outcomes}')
    effects = {str(i): np.eye(2, dtype=complex) / num_outcomes for i in range(num_outcomes)}
    return Povm(num_qubits, (num_qubits - 1,), effects)


def from_measurement_ops(ops, targets=None, num_qubits=None, labels=None):
    """
    由测量算符 {M_i} 得到 POVM，ℳ_i = M_i†M_i

    :param ops: 测量算符列表，作用在 targets 上
    :param targets: 作用的 qubit，默认是整个寄存器
    :param num_qubits: 寄存器的 qubit 数，默认等于算符的 qubit 数
    :param labels: 输出标签，默认 "0"、"1"…
    """
    ops = [np.array(op, dtype=complex) for op in ops]
    if not ops:
        raise MeasurementError('至少需要一个测量算符')
    dim = ops[0].shape[0]
    k = int(round(np.log2(dim))) if dim > 0 else 0
    if dim < 2 or 2 ** k != dim or any(op.shape != (dim, dim) for op in ops):
        raise MeasurementError(f'测量算符必须是同样大小的 2^k×2^k 矩阵：{[op.shape for op in ops]}')
    if targets is None:
        num_qubits = k if num_qubits is None else num_qubits
        if num_qubits != k:
            raise MeasurementError(f'没有给出 targets 时算符必须作用在整个寄存器上：{k} ≠ {num_qubits}')
        targets = tuple(range(k))
    targets = tuple(targets)
    if len(targets) != k:
        raise MeasurementError(f'targets {targets} 与算符的 qubit 数 {k} 不一致')
    num_qubits = (max(targets) + 1) if num_qubits is None else num_qubits
    if labels is None:
        labels = [str(i) for i in range(len(ops))]
    if len(labels) != len(ops):
        raise MeasurementError(f'标签数 {len(labels)} 与算符数 {len(ops)} 不一致')

    effects = {str(label): op.conj().T @ op for label, op in zip(labels, ops)}
    return Povm(num_qubits, targets, effects, completeness_tolerance=settings.tolerance.measurement_ops)


def probabilities(povm, rho):
    """
    p_i = tr(ℳ_i ρ)，只用到 support 上的约化密度矩阵
    """
    if povm.num_qubits != rho.num_qubits:
        raise DimensionError(f'测量有 {povm.num_qubits} 个 qubit，态有 {rho.num_qubits} 个')
    reduced = partial_trace(rho.matrix, rho.num_qubits, povm.support)
    values = [np.real(np.sum(effect * reduced.T)) for effect in povm.local_effects.values()]
    return OutcomeDistribution(povm.labels, values)
