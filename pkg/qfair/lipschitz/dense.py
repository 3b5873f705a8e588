# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：lipschitz/dense.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：稠密矩阵上精确计算 Lipschitz 常数 K* 和偏差核 (ψ, φ)
#         K* = max_A [λ_max(M_A) − λ_min(M_A)]，M_A = Σ_{i∈A} E†(ℳ_i)
# ---------------------------------------
from itertools import combinations
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from qfair.config import settings
from qfair.time import Timer
from qfair.util import echo
from qfair.qstate import PureState, DimensionError, as_density, basis_state
from qfair.channel import adjoint_apply


class LipschitzError(ValueError):
    """ 结果集太大、特征值分解失败或规模超出限制"""
    pass


@dataclass(eq=False)
class LipschitzReport:
    """
    Lipschitz 常数的计算结果

    subset_spreads 的键是排好序的标签元组，值是 λ_max − λ_min
    degenerate 为真时 K* 为 0，偏差核取前两个计算基矢
    """
    k_star: float
    optimal_subset: tuple
    kernel_psi: PureState
    kernel_phi: PureState
    subset_spreads: dict
    wall_time: float
    backend: str = 'dense'
    degenerate: bool = False
    converged: bool = True
    residuals: dict = field(default_factory=dict)
    iterations: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def kernel(self):
        return self.kernel_psi, self.kernel_phi


def subsets_with_pivot(labels):
    """
    含有第一个标签的所有真子集，按字典序排列

    A 和 O∖A 的跨度相同，所以只枚举一半；全集 O 的 M_O = I，跨度为 0，也不用算
    只有一个结果时返回 [(label,)]
    """
    labels = tuple(sorted(labels))
    if len(labels) == 1:
        return [labels]
    pivot, rest = labels[0], labels[1:]
    subsets = [(pivot,) + others for size in range(len(rest)) for others in combinations(rest, size)]
    return sorted(subsets)


def phase_normalize(vector):
    """
    归一化，并让模最大的分量为正实数
    """
    vector = np.asarray(vector, dtype=complex)
    vector = vector / np.linalg.norm(vector)
    index = int(np.argmax(np.abs(vector)))
    return vector * (np.abs(vector[index]) / vector[index])


def degenerate_kernel(num_qubits):
    return basis_state(num_qubits, 0), basis_state(num_qubits, 1)


def select_best(spreads):
    """
    最大跨度对应的子集，并列时取字典序最小的子集
    """
    best = None
    for subset in sorted(spreads):
        if best is None or spreads[subset] > spreads[best]:
            best = subset
    return best


def heisenberg_effects(model, labels=None):
    """
    W_i = E†(ℳ_i)，逐层作用伴随信道

    :param labels: 只计算这些结果，默认全部
    """
    labels = model.povm.labels if labels is None else labels
    effects = model.povm.effects
    return {label: adjoint_apply(model.circuit, effects[label]) for label in labels}


def _spread(matrix):
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as e:
        raise LipschitzError(f'特征值分解失败：{e}')
    return float(values[-1] - values[0]), vectors[:, -1], vectors[:, 0]


def lipschitz(model, max_workers=1, is_print=False):
    """
    稠密后端：对每个子集 A 求 M_A 的全部特征值，取最大跨度

    :param max_workers: 大于 1 时用线程池并行计算各个子集
    :return: LipschitzReport
    """
    labels = model.povm.labels
    if len(labels) > settings.dense.max_outcomes:
        raise LipschitzError(f'结果数 {len(labels)} 超过上限 {settings.dense.max_outcomes}')

    with Timer('稠密 Lipschitz', is_print=is_print) as timer:
        subsets = subsets_with_pivot(labels)
        needed = sorted(set(label for subset in subsets for label in subset))
        effects = heisenberg_effects(model, needed)
        echo(f'{model.name}：{len(subsets)} 个子集，矩阵维度 {model.povm.dim}', is_print=is_print)

        def spread_of(subset):
            return _spread(sum(effects[label] for label in subset))

        if max_workers > 1 and len(subsets) > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as executor:
                results = list(executor.map(spread_of, subsets))
        else:
            results = [spread_of(subset) for subset in subsets]

    spreads = {subset: result[0] for subset, result in zip(subsets, results)}
    best = select_best(spreads)
    spread, top, bottom = results[subsets.index(best)]
    n = model.num_qubits
    degenerate = spread <= settings.tolerance.degenerate
    if degenerate:
        psi, phi = degenerate_kernel(n)
    else:
        psi, phi = PureState(n, phase_normalize(top)), PureState(n, phase_normalize(bottom))

    return LipschitzReport(
        k_star=float(np.clip(spread, 0.0, 1.0)),
        optimal_subset=best,
        kernel_psi=psi,
        kernel_phi=phi,
        subset_spreads=spreads,
        wall_time=timer.elapsed,
        backend='dense',
        degenerate=degenerate,
        metadata=dict(model.metadata),
    )


def distinguishability(povm_effects, rho, sigma):
    """
    用测量区分 ρ 和 σ 的成功概率 ½ + ¼ Σ_i |tr(ℳ_i(ρ−σ))|

    :param povm_effects: Povm，或者 标签 → 2^n×2^n 效应 的字典
    """
    effects = povm_effects.effects if hasattr(povm_effects, 'effects') else povm_effects
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.num_qubits != sigma.num_qubits:
        raise DimensionError(f'qubit 数不一致：{rho.num_qubits} 和 {sigma.num_qubits}')
    difference = rho.matrix - sigma.matrix
    total = 0.0
    for label, effect in effects.items():
        effect = np.asarray(effect)
        if effect.shape != difference.shape:
            raise DimensionError(f'结果 {label} 的效应维度 {effect.shape} 与态 {difference.shape} 不一致')
        total += abs(np.sum(effect * difference.T))
    return float(0.5 + 0.25 * total)


def _random_states(rng, count, dim):
    states = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return states / np.linalg.norm(states, axis=1, keepdims=True)


def _orthogonalize(psi, raw):
    phi = raw - np.sum(psi.conj() * raw, axis=1, keepdims=True) * psi
    return phi / np.linalg.norm(phi, axis=1, keepdims=True)


def _pair_values(effects, psi, phi):
    values = np.zeros(len(psi))
    for effect in effects:
        values += np.abs(np.real(np.einsum('bi,ij,bj->b', psi.conj(), effect, psi) -
                                 np.einsum('bi,ij,bj->b', phi.conj(), effect, phi)))
    return 0.5 * values


def oracle_k_star(model, num_samples=100000, rng_seed=0, batch_size=2000):
    """
    随机搜索的 K* 下界，用来独立检查特征值算法

    在正交纯态对 (ψ, φ) 上最大化 ½ Σ_i |tr(W_i(ψ−φ))|：
    前一半样本是独立的随机正交对，后一半在当前最优对附近做步长逐渐缩小的爬山
    """
    n = model.num_qubits
    if n > settings.dense.oracle_max_qubits:
        raise LipschitzError(f'随机搜索只支持 ≤ {settings.dense.oracle_max_qubits} 个 qubit，实际 {n}')
    rng = np.random.default_rng(rng_seed)
    effects = list(heisenberg_effects(model).values())
    dim = model.povm.dim

    best_value, best_psi, best_phi = -1.0, None, None
    remaining = max(num_samples // 2, 1)
    while remaining > 0:
        count = min(batch_size, remaining)
        psi = _random_states(rng, count, dim)
        phi = _orthogonalize(psi, _random_states(rng, count, dim))
        values = _pair_values(effects, psi, phi)
        index = int(np.argmax(values))
        if values[index] > best_value:
            best_value, best_psi, best_phi = values[index], psi[index], phi[index]
        remaining -= count

    step = 0.5
    remaining = num_samples - num_samples // 2
    while remaining > 0:
        count = min(batch_size, remaining)
        psi = best_psi + step * _random_states(rng, count, dim)
        psi = psi / np.linalg.norm(psi, axis=1, keepdims=True)
        phi = _orthogonalize(psi, best_phi + step * _random_states(rng, count, dim))
        values = _pair_values(effects, psi, phi)
        index = int(np.argmax(values))
        if values[index] > best_value:
            best_value, best_psi, best_phi = values[index], psi[index], phi[index]
        else:
            step = max(step / 2, 1e-8)
        remaining -= count

    return float(best_value)
