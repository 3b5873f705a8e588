# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：report.py
#   版本：0.2
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：验证报告的 json 读写，偏差核默认只保留模最大的 64 个振幅
# ---------------------------------------
from dataclasses import dataclass, field, asdict

import numpy as np

from qfair.config import settings
from qfair.file import json_read, json_save
from qfair.qstate import PureState, StateError
from qfair.model import model_to_spec, model_from_spec, encode_complex, decode_complex, ModelError
from qfair.fairness import fairness_verdict
from qfair.lipschitz import PowerIterationConfig, NetworkError, compute


class ReportError(ValueError):
    """ 报告文件缺少字段或内容无效"""
    pass


def subset_key(subset):
    return ','.join(subset)


def serialize_state(state, top_k=None):
    """
    {"num_qubits", "indices", "amplitudes": [[re, im], ...], "truncated"}

    top_k 小于维度时只保留模最大的 top_k 个分量，按下标排序
    """
    amplitudes = state.amplitudes
    if top_k is not None and top_k < amplitudes.size:
        indices = np.sort(np.argsort(-np.abs(amplitudes), kind='stable')[:top_k])
        truncated = True
    else:
        indices = np.arange(amplitudes.size)
        truncated = False
    return {
        'num_qubits': state.num_qubits,
        'indices': indices.tolist(),
        'amplitudes': encode_complex(amplitudes[indices]),
        'truncated': truncated,
    }


def deserialize_state(data):
    """
    还原完整的纯态，截断过的态无法还原
    """
    if data.get('truncated', True):
        raise ReportError('偏差核已截断，无法还原完整的态，请用 --full-kernel 重新计算')
    try:
        num_qubits = int(data['num_qubits'])
        amplitudes = np.zeros(2 ** num_qubits, dtype=complex)
        amplitudes[np.asarray(data['indices'], dtype=int)] = decode_complex(data['amplitudes'])
        return PureState(num_qubits, amplitudes)
    except KeyError as e:
        raise ReportError(f'偏差核缺少字段：{e}')
    except (StateError, ModelError, IndexError, ValueError) as e:
        raise ReportError(f'偏差核无效：{e}')


@dataclass(eq=False)
class VerificationReport:
    """
    一次 lipschitz / verify 的结果，可以无损地写入和读回 json
    """
    model_name: str
    num_qubits: int
    backend: str
    k_star: float
    optimal_subset: list
    subset_spreads: dict
    wall_time: float
    kernel: dict = None
    degenerate: bool = False
    converged: bool = True
    residuals: dict = field(default_factory=dict)
    iterations: dict = field(default_factory=dict)
    verdict: dict = None
    metadata: dict = field(default_factory=dict)
    model_spec: dict = None

    @classmethod
    def from_lipschitz(cls, report, model, verdict=None, top_k=None, full_kernel=False, solver=None):
        """
        由 LipschitzReport 生成报告；给出 verdict 且判定为公平时不写偏差核
        """
        top_k = settings.report.kernel_top_k if top_k is None else top_k
        kernel = None
        if verdict is None or not verdict.fair:
            limit = None if full_kernel else top_k
            kernel = {'psi': serialize_state(report.kernel_psi, limit),
                      'phi': serialize_state(report.kernel_phi, limit)}
        return cls(
            model_name=model.name,
            num_qubits=model.num_qubits,
            backend=report.backend,
            k_star=report.k_star,
            optimal_subset=list(report.optimal_subset),
            subset_spreads={subset_key(subset): float(value) for subset, value in report.subset_spreads.items()},
            wall_time=report.wall_time,
            kernel=kernel,
            degenerate=report.degenerate,
            converged=report.converged,
            residuals={subset_key(subset): value for subset, value in report.residuals.items()},
            iterations={subset_key(subset): value for subset, value in report.iterations.items()},
            verdict=verdict.to_dict() if verdict is not None else None,
            metadata=report.metadata,
            model_spec=model_to_spec(model, solver),
        )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ReportError('报告的顶层必须是对象')
        required = ('model_name', 'num_qubits', 'backend', 'k_star', 'optimal_subset', 'subset_spreads', 'wall_time')
        missing = [key for key in required if key not in data]
        if missing:
            raise ReportError(f'报告缺少字段：{missing}')
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ReportError(f'报告里有未知的字段：{sorted(unknown)}')
        return cls(**data)

    def save(self, path):
        return json_save(self.to_dict(), path)

    @classmethod
    def load(cls, path):
        try:
            data = json_read(path)
        except FileNotFoundError:
            raise ReportError(f'报告文件不存在：{path}')
        except ValueError as e:
            raise ReportError(f'报告文件不是有效的 json：{path}，{e}')
        return cls.from_dict(data)

    def recompute_verdict(self, epsilon, delta):
        """
        用保存的 K* 重新判定，与计算时的判定规则相同
        """
        return fairness_verdict(self.k_star, epsilon, delta, backend=self.backend)

    def kernel_states(self):
        if self.kernel is None:
            raise ReportError('报告里没有偏差核（模型是公平的）')
        return deserialize_state(self.kernel['psi']), deserialize_state(self.kernel['phi'])

    def model(self):
        if self.model_spec is None:
            raise ReportError('报告里没有模型')
        try:
            return model_from_spec(self.model_spec)
        except ModelError as e:
            raise ReportError(f'报告里的模型无效：{e}')

    @property
    def kernel_truncated(self):
        if self.kernel is None:
            return False
        return any(self.kernel[key].get('truncated', True) for key in ('psi', 'phi'))

    def recompute(self, max_workers=1, is_print=False):
        """
        由报告里的模型和 solver 块，用报告的后端重新计算，返回 LipschitzReport

        偏差核被截断时用它拿回完整的 ψ、φ
        """
        try:
            cfg = PowerIterationConfig.from_dict((self.model_spec or {}).get('solver'))
        except NetworkError as e:
            raise ReportError(f'报告里的 solver 块无效：{e}')
        return compute(self.model(), self.backend, cfg, max_workers=max_workers, is_print=is_print)
