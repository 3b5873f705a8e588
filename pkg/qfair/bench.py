# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：bench.py
#   版本：0.2
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：随机 QCNN 的 K* 基准测试，qubit 数 × 噪声 × 概率 × 重复次数，结果写成 csv
#         每个格子在单独的进程里运行，超时记为 TO
#         status 为 ok、not-converged、timeout 或 error，出错时异常信息在 message 列
# ---------------------------------------
import time
import hashlib
import multiprocessing
from dataclasses import dataclass, asdict

import pandas as pd
from colorama import Fore

from qfair.config import as_dict, update_settings
from qfair.time import second_to_time_str
from qfair.util import echo
from qfair.model import build_qcnn, parse_noise_spec
from qfair.lipschitz import PowerIterationConfig, lipschitz_tn

TIMEOUT = 'TO'

COLUMNS = ['qubits', 'noise', 'prob', 'repeat', 'seed', 'k_star', 'time', 'status', 'message']


@dataclass(frozen=True)
class BenchCell:
    qubits: int
    noise: str
    prob: float
    repeat: int
    seed: int


def cell_seed(master_seed, qubits, repeat):
    """
    格子的模型种子 = md5(master_seed, qubits, repeat)

    同一个 (qubits, repeat) 的所有噪声和概率共用一个模型，才能比较噪声概率对 K* 的影响
    """
    digest = hashlib.md5(f'{master_seed}-{qubits}-{repeat}'.encode('utf-8')).hexdigest()
    return int(digest[:15], 16)


def bench_cells(qubits, noises, probs, repeats=3, master_seed=0):
    """
    枚举全部格子，noise 为 none 时每个重复只有一个 prob = 0 的格子
    """
    cells = []
    for n in qubits:
        for repeat in range(repeats):
            seed = cell_seed(master_seed, n, repeat)
            for noise in noises:
                if noise == 'none':
                    cells.append(BenchCell(n, 'none', 0.0, repeat, seed))
                    continue
                for prob in probs:
                    parse_noise_spec((noise, prob))
                    cells.append(BenchCell(n, noise, float(prob), repeat, seed))
    return cells


def run_cell(cell, solver=None):
    """
    在当前进程里计算一个格子，返回 {'k_star', 'time', 'converged'}
    """
    noise = None if cell.noise == 'none' else (cell.noise, cell.prob)
    model = build_qcnn(cell.qubits, rng_seed=cell.seed, noise=noise)
    cfg = PowerIterationConfig.from_dict(solver)
    start = time.perf_counter()
    report = lipschitz_tn(model, cfg)
    return {'k_star': report.k_star, 'time': time.perf_counter() - start, 'converged': report.converged}


def _cell_worker(cell, solver, settings_snapshot, connection):
    try:
        update_settings(settings_snapshot)
        connection.send(('ok', run_cell(cell, solver)))
    except Exception as e:
        connection.send(('error', f'{type(e).__name__}: {e}'))
    finally:
        connection.close()


def _row(cell, k_star, elapsed, status, message=''):
    return {**asdict(cell), 'k_star': k_star, 'time': elapsed, 'status': status, 'message': message}


def run_bench(cells, threads=1, timeout=3600.0, solver=None, is_print=False):
    """
    每个格子一个进程，最多 threads 个同时运行，超过 timeout 秒的格子被终止并记为 TO

    :return: pandas.DataFrame，列为 COLUMNS，按格子顺序排列
    """
    context = multiprocessing.get_context()
    snapshot = as_dict()
    pending = list(enumerate(cells))
    running = {}
    rows = {}

    while pending or running:
        while pending and len(running) < max(threads, 1):
            index, cell = pending.pop(0)
            receiver, sender = context.Pipe(duplex=False)
            process = context.Process(target=_cell_worker, args=(cell, solver, snapshot, sender), daemon=True)
            process.start()
            sender.close()
            running[index] = (cell, process, receiver, time.perf_counter())

        for index, (cell, process, receiver, start) in list(running.items()):
            elapsed = time.perf_counter() - start
            if receiver.poll():
                try:
                    status, result = receiver.recv()
                except EOFError:
                    status, result = 'error', '子进程没有返回结果'
                process.join()
                if status == 'ok':
                    state = 'ok' if result['converged'] else 'not-converged'
                    rows[index] = _row(cell, result['k_star'], result['time'], state)
                    echo(f'{cell.qubits} qubit {cell.noise}:{cell.prob:g} 第 {cell.repeat} 次：'
                         f'K* = {result["k_star"]:.6f}，用时 {second_to_time_str(result["time"])}', is_print=is_print)
                else:
                    rows[index] = _row(cell, 'error', elapsed, 'error', result)
                    echo(f'{cell.qubits} qubit {cell.noise}:{cell.prob:g} 出错：{result}', color=Fore.RED,
                         is_print=is_print)
                del running[index]
            elif elapsed > timeout:
                process.terminate()
                process.join()
                rows[index] = _row(cell, TIMEOUT, TIMEOUT, 'timeout')
                echo(f'{cell.qubits} qubit {cell.noise}:{cell.prob:g} 第 {cell.repeat} 次：超时',
                     color=Fore.YELLOW, is_print=is_print)
                del running[index]
        if running:
            time.sleep(0.01)

    return pd.DataFrame([rows[index] for index in range(len(cells))], columns=COLUMNS)


def save_table(frame, path):
    frame.to_csv(path, index=False, encoding='utf-8')
    return path
