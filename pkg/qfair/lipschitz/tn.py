# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：lipschitz/tn.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：张量网络后端，M_A 只以张量网络的形式存在，用幂迭代求最大、最小特征值
#
#   网络的结构（自下而上）：
#       底部 n 条输入腿接向量 v，n 条输出腿是 M_A·v
#       每一层门在行一侧是 conj(U)，列一侧是 U；噪声层是连接两侧的 4k 腿张量
#       顶部是效应 Σ_{i∈A} ℳ_i，光锥内不在测量范围的 qubit 用 δ 连接两侧
#   光锥外的层对 M_A 没有贡献（E†(I) = I），直接去掉，光锥外的 qubit 输入腿就是输出腿
# ---------------------------------------
from dataclasses import dataclass, field

import numpy as np
import opt_einsum as oe

from qfair.config import settings
from qfair.time import Timer
from qfair.util import echo
from qfair.qstate import PureState, DimensionError
from qfair.channel import GlobalDepolarizing
from qfair.lipschitz.dense import (LipschitzError, LipschitzReport, subsets_with_pivot, select_best,
                                   phase_normalize, degenerate_kernel)


class NetworkError(ValueError):
    """ 网络无法构造，或输入不满足要求"""
    pass


@dataclass(frozen=True)
class PowerIterationConfig:
    """
    幂迭代参数，没有给出的项取 settings.solver 的默认值

    :param max_iters: 最大迭代次数
    :param tolerance: 相邻两次特征值估计之差和残差 ‖Mv − λv‖（相对 max(1, |λ|)）都不超过它时停止
    :param rng_seed: 初始随机向量的种子
    """
    max_iters: int = None
    tolerance: float = None
    rng_seed: int = None

    def __post_init__(self):
        solver = settings.solver
        max_iters = solver.max_iters if self.max_iters is None else int(self.max_iters)
        tolerance = solver.tolerance if self.tolerance is None else float(self.tolerance)
        rng_seed = solver.seed if self.rng_seed is None else int(self.rng_seed)
        if max_iters < 1:
            raise NetworkError(f'max_iters 必须 ≥ 1：{max_iters}')
        if not tolerance > 0:
            raise NetworkError(f'tolerance 必须 > 0：{tolerance}')
        object.__setattr__(self, 'max_iters', max_iters)
        object.__setattr__(self, 'tolerance', tolerance)
        object.__setattr__(self, 'rng_seed', rng_seed)

    @classmethod
    def from_dict(cls, data):
        """
        模型文件 solver 块：{"tolerance": ..., "max_iters": ..., "seed": ...}
        """
        data = dict(data or {})
        unknown = set(data) - {'tolerance', 'max_iters', 'seed'}
        if unknown:
            raise NetworkError(f'solver 块里有未知的键：{sorted(unknown)}')
        return cls(max_iters=data.get('max_iters'), tolerance=data.get('tolerance'), rng_seed=data.get('seed'))

    def to_dict(self):
        return {'tolerance': self.tolerance, 'max_iters': self.max_iters, 'seed': self.rng_seed}


@dataclass(frozen=True)
class Node:
    name: str
    tensor: np.ndarray
    indices: tuple


class _Symbols:
    """ 依次分配 einsum 下标"""

    def __init__(self):
        self.count = 0

    def __call__(self):
        symbol = oe.get_symbol(self.count)
        self.count += 1
        return symbol


class OperatorNetwork:
    """
    表示 M_A 的张量网络，只提供矩阵向量乘

    :param input_indices: 每个 qubit 接向量 v 的下标
    :param output_indices: 每个 qubit 输出的下标，光锥外的 qubit 与输入相同
    """

    def __init__(self, num_qubits, nodes, input_indices, output_indices, subset, labels, active_qubits, batch_index):
        self.num_qubits = num_qubits
        self.nodes = list(nodes)
        self.input_indices = tuple(input_indices)
        self.output_indices = tuple(output_indices)
        self.subset = tuple(subset)
        self.labels = tuple(labels)
        self.active_qubits = tuple(sorted(active_qubits))
        self.batch_index = batch_index
        self._expressions = {}

    @property
    def dim(self):
        return 2 ** self.num_qubits

    def equation(self, batch=False):
        extra = self.batch_index if batch else ''
        operands = [''.join(self.input_indices) + extra] + [''.join(node.indices) for node in self.nodes]
        return ','.join(operands) + '->' + ''.join(self.output_indices) + extra

    def _expression(self, batch_size):
        if batch_size not in self._expressions:
            shape = (2,) * self.num_qubits + ((batch_size,) if batch_size else ())
            constants = list(range(1, len(self.nodes) + 1))
            self._expressions[batch_size] = oe.contract_expression(
                self.equation(batch=bool(batch_size)), shape, *[node.tensor for node in self.nodes],
                constants=constants, optimize=settings.solver.optimize)
        return self._expressions[batch_size]

    def matvec(self, vector):
        """
        M_A·v，v 也可以是 2^n×m 的矩阵，每一列分别相乘
        """
        v = vector.amplitudes if isinstance(vector, PureState) else np.asarray(vector, dtype=complex)
        if v.ndim not in (1, 2) or v.shape[0] != self.dim:
            raise DimensionError(f'向量长度应为 {self.dim}，实际形状 {v.shape}')
        batch_size = v.shape[1] if v.ndim == 2 else None
        tensor = v.reshape((2,) * self.num_qubits + ((batch_size,) if batch_size else ()))
        return np.asarray(self._expression(batch_size)(tensor)).reshape(v.shape)

    def expectation(self, vector):
        """ ⟨v|M_A|v⟩"""
        v = vector.amplitudes if isinstance(vector, PureState) else np.asarray(vector, dtype=complex)
        return float(np.real(np.vdot(v, self.matvec(v))))

    def to_dense(self, max_qubits=12):
        """
        展开成 2^n×2^n 矩阵，只用于小规模检查
        """
        if self.num_qubits > max_qubits:
            raise NetworkError(f'{self.num_qubits} 个 qubit 太大，不能展开成稠密矩阵')
        return self.matvec(np.eye(self.dim, dtype=complex))


def light_cone(layers, support):
    """
    从测量的 qubit 往回走，只保留影响它们的层

    :return: (保留的层, 每层对应的光锥快照, 最终的光锥)
             快照只对全局退极化有意义，是这一层之后仍然处于光锥内的 qubit
    """
    active = set(support)
    kept = []
    for layer in reversed(layers):
        if isinstance(layer, GlobalDepolarizing):
            kept.append((layer, tuple(sorted(active))))
        elif active & set(layer.targets):
            active |= set(layer.targets)
            kept.append((layer, None))
    kept.reverse()
    return kept, active


def _channel_tensor(kraus_ops):
    """
    T[a,x,b,y] = Σ_j conj(E_j[a,x]) E_j[b,y]，a、b 朝上，x、y 朝下
    """
    dim = kraus_ops[0].shape[0]
    k = int(np.log2(dim))
    stacked = np.array(kraus_ops).reshape(len(kraus_ops), dim * dim)
    tensor = stacked.conj().T @ stacked
    return tensor.reshape((2,) * (4 * k))


def _global_depolarizing_tensor():
    """
    G[s,t,a,x,b,y] = δ_st·branch_s，branch_0 = δ_ax δ_by，branch_1 = δ_ab δ_xy / 2
    """
    delta = np.eye(2)
    tensor = np.zeros((2,) * 6, dtype=complex)
    tensor[0, 0] = np.einsum('ax,by->axby', delta, delta)
    tensor[1, 1] = np.einsum('ab,xy->axby', delta, delta) / 2
    return tensor


def build_operator_network(model, subset):
    """
    构造表示 M_A = Σ_{i∈A} E†(ℳ_i) 的网络，线路先合并相邻的门再做光锥裁剪
    """
    povm = model.povm
    subset = tuple(sorted(set(str(label) for label in subset)))
    unknown = [label for label in subset if label not in povm.local_effects]
    if not subset or unknown:
        raise NetworkError(f'子集无效：{subset}，可选标签 {povm.labels}')
    support = povm.support
    if len(support) > settings.solver.max_effect_qubits:
        raise NetworkError(f'效应作用在 {len(support)} 个 qubit 上，超过上限 {settings.solver.max_effect_qubits}')

    n = model.num_qubits
    layers, active = light_cone(model.circuit.fused.layers, support)
    symbol = _Symbols()
    rows, cols = {}, {}
    for q in range(n):
        rows[q] = symbol()
        cols[q] = symbol() if q in active else rows[q]
    output_indices = [rows[q] for q in range(n)]
    input_indices = [cols[q] for q in range(n)]

    nodes = []
    global_tensor = None
    for position, (layer, snapshot) in enumerate(layers):
        if isinstance(layer, GlobalDepolarizing):
            if global_tensor is None:
                global_tensor = _global_depolarizing_tensor()
            bond = symbol()
            nodes.append(Node(f'{position}:weight', np.array([1 - layer.p, layer.p], dtype=complex), (bond,)))
            for q in snapshot:
                upper_row, upper_col, next_bond = symbol(), symbol(), symbol()
                nodes.append(Node(f'{position}:global:{q}', global_tensor,
                                  (bond, next_bond, upper_row, rows[q], upper_col, cols[q])))
                rows[q], cols[q], bond = upper_row, upper_col, next_bond
            nodes.append(Node(f'{position}:close', np.ones(2, dtype=complex), (bond,)))
            continue

        targets = layer.targets
        upper_rows = [symbol() for _ in targets]
        upper_cols = [symbol() for _ in targets]
        lower_rows = [rows[t] for t in targets]
        lower_cols = [cols[t] for t in targets]
        k = len(targets)
        if layer.is_unitary:
            matrix = layer.matrix.reshape((2,) * (2 * k))
            nodes.append(Node(f'{position}:{layer.name}*', matrix.conj(), tuple(upper_rows + lower_rows)))
            nodes.append(Node(f'{position}:{layer.name}', matrix, tuple(upper_cols + lower_cols)))
        else:
            nodes.append(Node(f'{position}:{layer.name or layer.kind}', _channel_tensor(layer.kraus_ops),
                              tuple(upper_rows + lower_rows + upper_cols + lower_cols)))
        for t, upper_row, upper_col in zip(targets, upper_rows, upper_cols):
            rows[t], cols[t] = upper_row, upper_col

    effect = povm.local_sum(subset).reshape((2,) * (2 * len(support)))
    nodes.append(Node('effect', effect, tuple([rows[q] for q in support] + [cols[q] for q in support])))
    for q in sorted(active - set(support)):
        nodes.append(Node(f'identity:{q}', np.eye(2, dtype=complex), (rows[q], cols[q])))

    return OperatorNetwork(n, nodes, input_indices, output_indices, subset, povm.labels, active, symbol())


def matvec(net, vector):
    return net.matvec(vector)


@dataclass(eq=False)
class PowerResult:
    eigenvalue: float
    vector: np.ndarray
    history: list
    residual: float
    iterations: int
    converged: bool


def power_iteration(net, cfg=None, is_print=False):
    """
    幂迭代求 M_A 的最大特征值

    相邻两次 Rayleigh 商之差小于 tolerance，并且残差 ‖Mv − λv‖ ≤ tolerance·max(1, |λ|) 时才算收敛。
    M_A 半正定，Rayleigh 商单调不减；达到 max_iters 仍未收敛时不抛异常，
    返回最后的迭代结果，converged 为 False
    """
    cfg = cfg or PowerIterationConfig()
    rng = np.random.default_rng(cfg.rng_seed)
    vector = rng.standard_normal(net.dim) + 1j * rng.standard_normal(net.dim)
    vector /= np.linalg.norm(vector)
    image = net.matvec(vector)
    value = float(np.real(np.vdot(vector, image)))
    residual = float(np.linalg.norm(image - value * vector))
    history = [value]
    converged = False
    iterations = 0
    while iterations < cfg.max_iters:
        iterations += 1
        norm = np.linalg.norm(image)
        if norm == 0:
            # M_A = 0
            value, residual, converged = 0.0, 0.0, True
            break
        vector = image / norm
        image = net.matvec(vector)
        new_value = float(np.real(np.vdot(vector, image)))
        history.append(new_value)
        change = abs(new_value - value)
        value = new_value
        residual = float(np.linalg.norm(image - value * vector))
        if change < cfg.tolerance and residual <= cfg.tolerance * max(1.0, abs(value)):
            converged = True
            break

    if not converged:
        echo(f'幂迭代 {iterations} 次仍未收敛，特征值 {value:.10f}，残差 {residual:.3e}', is_print=is_print)
    return PowerResult(value, vector, history, residual, iterations, converged)


@dataclass(eq=False)
class ExtremalEigs:
    lambda_max: float
    lambda_min: float
    psi: np.ndarray
    phi: np.ndarray
    degenerate: bool
    residuals: tuple = ()
    iterations: tuple = ()
    converged: bool = True
    history: dict = field(default_factory=dict)


def extremal_eigs(net_a, net_complement, cfg=None, is_print=False):
    """
    λ_max(M_A) 由 M_A 的幂迭代得到，λ_min(M_A) = 1 − λ_max(M_{O∖A})

    跨度不退化时把 φ 对 ψ 再正交化一次
    """
    cfg = cfg or PowerIterationConfig()
    if net_a.num_qubits != net_complement.num_qubits or net_a.labels != net_complement.labels:
        raise NetworkError('两个网络不属于同一个模型')
    if set(net_a.subset) & set(net_complement.subset) or \
            set(net_a.subset) | set(net_complement.subset) != set(net_a.labels):
        raise NetworkError(f'子集 {net_a.subset} 和 {net_complement.subset} 不互补')

    top = power_iteration(net_a, cfg, is_print)
    bottom = power_iteration(net_complement, cfg, is_print)
    lambda_max = top.eigenvalue
    lambda_min = 1 - bottom.eigenvalue
    psi = top.vector
    phi = bottom.vector
    degenerate = lambda_max - lambda_min <= max(settings.tolerance.degenerate, cfg.tolerance)
    if not degenerate:
        phi = phi - np.vdot(psi, phi) * psi
    return ExtremalEigs(
        lambda_max=lambda_max,
        lambda_min=lambda_min,
        psi=phase_normalize(psi),
        phi=phase_normalize(phi),
        degenerate=degenerate,
        residuals=(top.residual, bottom.residual),
        iterations=(top.iterations, bottom.iterations),
        converged=top.converged and bottom.converged,
        history={'max': top.history, 'complement': bottom.history},
    )


def _complement_network(model, subset):
    complement = tuple(label for label in model.povm.labels if label not in subset)
    return build_operator_network(model, complement)


def lipschitz_tn(model, cfg=None, is_print=False):
    """
    张量网络后端，结果格式与稠密后端相同，backend 为 tensor-network
    """
    cfg = cfg or PowerIterationConfig()
    labels = model.povm.labels
    if len(labels) > settings.dense.max_outcomes:
        raise LipschitzError(f'结果数 {len(labels)} 超过上限 {settings.dense.max_outcomes}')
    n = model.num_qubits

    spreads, results = {}, {}
    with Timer('张量网络 Lipschitz', is_print=is_print) as timer:
        if len(labels) > 1:
            for subset in subsets_with_pivot(labels):
                net_a = build_operator_network(model, subset)
                echo(f'{model.name} 子集 {",".join(subset)}：光锥 {len(net_a.active_qubits)} 个 qubit，'
                     f'{len(net_a.nodes)} 个张量', is_print=is_print)
                eigs = extremal_eigs(net_a, _complement_network(model, subset), cfg, is_print)
                spreads[subset] = eigs.lambda_max - eigs.lambda_min
                results[subset] = eigs
        else:
            spreads[labels] = 0.0

    best = select_best(spreads)
    eigs = results.get(best)
    degenerate = eigs is None or eigs.degenerate
    if degenerate:
        psi, phi = degenerate_kernel(n)
    else:
        psi, phi = PureState(n, eigs.psi), PureState(n, eigs.phi)

    return LipschitzReport(
        k_star=float(np.clip(spreads[best], 0.0, 1.0)),
        optimal_subset=best,
        kernel_psi=psi,
        kernel_phi=phi,
        subset_spreads=spreads,
        wall_time=timer.elapsed,
        backend='tensor-network',
        degenerate=degenerate,
        converged=all(result.converged for result in results.values()),
        residuals={subset: list(result.residuals) for subset, result in results.items()},
        iterations={subset: list(result.iterations) for subset, result in results.items()},
        metadata={**model.metadata, 'solver': cfg.to_dict()},
    )
