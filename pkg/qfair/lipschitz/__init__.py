# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：lipschitz
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：Lipschitz 常数的两个后端，dense 用于 ≤ 12 个 qubit 的精确计算，tn 用于更大的模型
# ---------------------------------------

from .dense import (LipschitzError, LipschitzReport, subsets_with_pivot, heisenberg_effects, lipschitz,
                    distinguishability, oracle_k_star)
from .tn import (NetworkError, PowerIterationConfig, OperatorNetwork, build_operator_network, matvec,
                 power_iteration, extremal_eigs, lipschitz_tn)

BACKENDS = ('dense', 'tn')


def compute(model, backend='dense', cfg=None, max_workers=1, is_print=False):
    """
    按后端名计算 K*，tensor-network 与 tn 等价
    """
    if backend == 'dense':
        return lipschitz(model, max_workers=max_workers, is_print=is_print)
    if backend in ('tn', 'tensor-network'):
        return lipschitz_tn(model, cfg, is_print=is_print)
    raise LipschitzError(f'未知的后端：{backend}，可选 {", ".join(BACKENDS)}')
