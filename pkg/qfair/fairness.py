# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：fairness.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：(ε,δ)-公平性判定，以及由偏差核生成偏差对
#         模型 (ε,δ)-公平 当且仅当 δ ≥ K*·ε
# ---------------------------------------
import re
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from qfair.config import settings
from qfair.qstate import (DensityMatrix, DimensionError, as_density, mix, maximally_mixed, random_pure_state,
                          random_density_matrix, trace_distance, tv_distance)
from qfair.model import forward
from qfair.lipschitz import compute


class FairnessError(ValueError):
    """ 阈值无效、偏差核不正交等"""
    pass


@dataclass(eq=False)
class FairnessVerdict:
    """
    公平性判定结果，不公平时附带偏差核 (ψ, φ)

    witness_margin = K*ε − δ，大于 0 表示不公平
    """
    fair: bool
    epsilon: float
    delta: float
    k_star: float
    kernel: tuple = None
    witness_margin: float = 0.0
    backend: str = 'dense'
    report: object = None

    def to_dict(self):
        return {'fair': self.fair, 'epsilon': self.epsilon, 'delta': self.delta, 'k_star': self.k_star,
                'witness_margin': self.witness_margin}


@dataclass(eq=False)
class BiasPair:
    rho_psi: DensityMatrix
    rho_phi: DensityMatrix
    input_distance: float
    output_distance: float
    epsilon: float
    sigma_source: str = ''

    def summary(self):
        return {'sigma': self.sigma_source, 'epsilon': self.epsilon, 'input_distance': self.input_distance,
                'output_distance': self.output_distance}


def _check_threshold(name, value):
    if not 0 < value <= 1:
        raise FairnessError(f'{name} 必须在 (0,1] 内：{value}')
    return float(value)


def fairness_verdict(k_star, epsilon, delta, kernel=None, backend='dense', report=None):
    """
    按 δ ≥ K*ε 判定，比较带 settings.tolerance.comparison 的余量
    """
    epsilon = _check_threshold('epsilon', epsilon)
    delta = _check_threshold('delta', delta)
    fair = bool(delta >= k_star * epsilon - settings.tolerance.comparison)
    return FairnessVerdict(
        fair=fair,
        epsilon=epsilon,
        delta=delta,
        k_star=float(k_star),
        kernel=None if fair else kernel,
        witness_margin=float(k_star * epsilon - delta),
        backend=backend,
        report=report,
    )


def verify(model, epsilon, delta, backend='dense', cfg=None, max_workers=1, is_print=False):
    """
    先算 K* 和偏差核，再判定 (ε,δ)-公平性

    :param backend: dense 或 tn
    :param cfg: tn 后端的 PowerIterationConfig
    """
    _check_threshold('epsilon', epsilon)
    _check_threshold('delta', delta)
    report = compute(model, backend, cfg, max_workers=max_workers, is_print=is_print)
    return fairness_verdict(report.k_star, epsilon, delta, report.kernel, report.backend, report)


def bias_pairs(kernel, sigma, epsilon, model=None, sigma_source=''):
    """
    ρ_ψ = εψ + (1−ε)σ，ρ_φ = εφ + (1−ε)σ，两者迹距离恰好为 ε

    :param model: 给出时计算输出的全变差距离，否则 output_distance 为 nan
    """
    psi, phi = kernel
    epsilon = _check_threshold('epsilon', epsilon)
    sigma = as_density(sigma)
    if psi.num_qubits != phi.num_qubits or psi.num_qubits != sigma.num_qubits:
        raise DimensionError(f'偏差核和 σ 的 qubit 数不一致：{psi.num_qubits}, {phi.num_qubits}, {sigma.num_qubits}')
    overlap = abs(psi.overlap(phi))
    if overlap > settings.tolerance.orthogonality:
        raise FairnessError(f'偏差核不正交：|⟨ψ|φ⟩| = {overlap!r}')

    rho_psi = mix([psi, sigma], [epsilon, 1 - epsilon])
    rho_phi = mix([phi, sigma], [epsilon, 1 - epsilon])
    output_distance = float('nan')
    if model is not None:
        output_distance = tv_distance(forward(model, rho_psi), forward(model, rho_phi))
    return BiasPair(rho_psi, rho_phi, trace_distance(rho_psi, rho_phi), output_distance, epsilon, sigma_source)


def check_pair(model, rho, sigma, epsilon, delta):
    """
    (ρ, σ) 是 (ε,δ)-偏差对：D(ρ,σ) ≤ ε 并且 d(A(ρ),A(σ)) > δ
    """
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.num_qubits != sigma.num_qubits or rho.num_qubits != model.num_qubits:
        raise DimensionError(f'qubit 数不一致：模型 {model.num_qubits}，态 {rho.num_qubits}, {sigma.num_qubits}')
    if trace_distance(rho, sigma) > epsilon + settings.tolerance.comparison:
        return False
    return tv_distance(forward(model, rho), forward(model, sigma)) > delta


SIGMA_SOURCES = ('maximally-mixed', 'pure', 'mixed')


def parse_sigma_source(source):
    """
    'maximally-mixed'、'pure[:seed]'、'mixed[:seed]'，返回 (类型, 种子)
    """
    match = re.fullmatch(r'(maximally-mixed|pure|mixed)(?::(\d+))?', str(source).strip().lower())
    if match is None:
        raise FairnessError(f'未知的 σ 来源：{source}，可选 maximally-mixed、pure[:seed]、mixed[:seed]')
    return match.group(1), int(match.group(2) or 0)


def make_sigma(source, num_qubits, draw=0):
    """
    按来源生成 σ，第 draw 次抽样的种子为 seed + draw
    """
    kind, seed = parse_sigma_source(source)
    if kind == 'maximally-mixed':
        return maximally_mixed(num_qubits)
    if kind == 'pure':
        return random_pure_state(num_qubits, seed + draw).to_density()
    return random_density_matrix(num_qubits, seed + draw)


def generate_bias_pairs(model, kernel, epsilon, sigma_source='maximally-mixed', count=1, max_workers=1):
    """
    用 count 个不同的 σ 生成偏差对，可以多线程并行
    """
    if count < 1:
        raise FairnessError(f'count 必须 ≥ 1：{count}')

    def one(draw):
        sigma = make_sigma(sigma_source, model.num_qubits, draw)
        kind, seed = parse_sigma_source(sigma_source)
        label = kind if kind == 'maximally-mixed' else f'{kind}:{seed + draw}'
        return bias_pairs(kernel, sigma, epsilon, model, label)

    if max_workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            return list(executor.map(one, range(count)))
    return [one(draw) for draw in range(count)]


def expected_output_distance(k_star, epsilon):
    return float(np.clip(k_star * epsilon, 0.0, 1.0))
