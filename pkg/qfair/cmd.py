# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：cmd.py
#   版本：0.3
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：qfair 的命令行界面
#         lipschitz / verify / bias-pairs / bench / encode / config
#         退出码：0 正常或公平，1 不公平，2 输入有误，3 幂迭代没有收敛
# ---------------------------------------
import os
import sys
import json
import argparse

import colorama
from colorama import Fore

from qfair import __version__
from qfair.config import settings, CONFIG_FILE, load_config, save_config
from qfair.util import echo, error, warn
from qfair.file import json_read, json_save
from qfair.model import build_qcnn, build_rotation_entangling, append_noise, parse_noise_spec, load_model, save_model
from qfair.lipschitz import BACKENDS, PowerIterationConfig, compute
from qfair.fairness import verify, generate_bias_pairs, check_pair, expected_output_distance
from qfair.report import VerificationReport
from qfair.bench import bench_cells, run_bench, save_table
from qfair.encode import load_csv, save_states, save_sidecar

EXIT_OK = 0
EXIT_UNFAIR = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_CONVERGED = 3

BUILDERS = ('qcnn', 'rotation')


# ---------------------------------------------------------------- 参数

def _add_model_arguments(parser):
    group = parser.add_argument_group('模型')
    source = group.add_mutually_exclusive_group(required=True)
    source.add_argument('--model', help='模型 json 文件')
    source.add_argument('--build', choices=BUILDERS, help='用内置结构随机生成模型')
    group.add_argument('--qubits', type=int, default=4, help='qubit 数，默认 4')
    group.add_argument('--seed', type=int, default=0, help='生成参数的随机种子，默认 0')
    group.add_argument('--noise', default='none', help='噪声，例如 depolarizing:0.01，默认 none')
    group.add_argument('--rotation-blocks', type=int, default=3, help='rotation 结构的旋转块数')
    group.add_argument('--entangling-blocks', type=int, default=2, help='rotation 结构的纠缠块数')
    group.add_argument('--append-noise', action='append', default=[], metavar='NAME:P',
                       help='在线路末尾追加噪声，可以重复，例如 global-depolarizing:0.02')
    group.add_argument('--emit-model', metavar='PATH', help='把使用的模型保存成 json')


def _add_solver_arguments(parser):
    group = parser.add_argument_group('求解器')
    group.add_argument('--tolerance', type=float, default=None, help='幂迭代的收敛容差（特征值变化和残差）')
    group.add_argument('--max-iters', type=int, default=None, help='幂迭代的最大次数')
    group.add_argument('--solver-seed', type=int, default=None, help='幂迭代初始向量的种子')


def _add_output_arguments(parser, kernel=True):
    group = parser.add_argument_group('输出')
    group.add_argument('--json', action='store_true', default=False, help='在 stdout 输出 json')
    group.add_argument('-o', '--out', help='结果写入文件')
    if kernel:
        group.add_argument('--full-kernel', action='store_true', default=False, help='保存完整的偏差核')
        group.add_argument('--top-k', type=int, default=None,
                           help=f'偏差核保留的振幅个数，默认 {settings.report.kernel_top_k}')


def _add_compute_arguments(parser):
    _add_model_arguments(parser)
    parser.add_argument('--backend', choices=BACKENDS, default='dense', help='计算后端，默认 dense')
    parser.add_argument('--threads', type=int, default=1, help='线程数，默认 1')
    _add_solver_arguments(parser)
    _add_output_arguments(parser)


def build_parser():
    # https://docs.python.org/zh-cn/3/library/argparse.html
    description = '含噪声量子决策模型的 (ε,δ)-公平性验证。'
    parser = argparse.ArgumentParser(prog='qfair', description=description, epilog='谢谢使用！')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', help=f'ini 配置文件，默认读取存在的 {CONFIG_FILE}')
    parser.add_argument('-v', '--verbose', action='store_true', default=False, help='在 stderr 输出过程信息')

    commands = parser.add_subparsers(dest='command', metavar='命令')

    sub = commands.add_parser('lipschitz', help='计算 Lipschitz 常数 K* 和偏差核')
    _add_compute_arguments(sub)
    sub.set_defaults(handler=cmd_lipschitz)

    sub = commands.add_parser('verify', help='验证 (ε,δ)-公平性')
    _add_compute_arguments(sub)
    sub.add_argument('--epsilon', type=float, required=True, help='输入态的迹距离阈值 ε ∈ (0,1]')
    sub.add_argument('--delta', type=float, required=True, help='输出分布的距离阈值 δ ∈ (0,1]')
    sub.set_defaults(handler=cmd_verify)

    sub = commands.add_parser('bias-pairs', help='由报告里的偏差核生成偏差对')
    sub.add_argument('report', help='lipschitz 或 verify 保存的报告')
    sub.add_argument('--sigma', default='mixed', help='σ 的来源：maximally-mixed、pure[:seed]、mixed[:seed]')
    sub.add_argument('--epsilon', type=float, default=None, help='ε，默认取报告里的 ε')
    sub.add_argument('--count', type=int, default=1, help='生成的个数，默认 1')
    sub.add_argument('--threads', type=int, default=1, help='线程数，默认 1')
    _add_output_arguments(sub, kernel=False)
    sub.set_defaults(handler=cmd_bias_pairs)

    sub = commands.add_parser('bench', help='随机 QCNN 的 K* 基准测试，结果为 csv')
    sub.add_argument('--qubits', type=int, nargs='+', required=True, help='qubit 数列表')
    sub.add_argument('--noise', nargs='+', default=['none', 'bit-flip', 'depolarizing', 'phase-flip', 'mixed'],
                     help='噪声类型列表')
    sub.add_argument('--probs', type=float, nargs='+', default=[1e-4, 1e-3, 1e-2], help='噪声概率列表')
    sub.add_argument('--repeats', type=int, default=3, help='每种设置重复的次数，默认 3')
    sub.add_argument('--seed', type=int, default=0, help='主种子，默认 0')
    sub.add_argument('--threads', type=int, default=None, help='同时运行的进程数')
    sub.add_argument('--timeout', type=float, default=None, help='每个格子的超时秒数')
    _add_solver_arguments(sub)
    sub.add_argument('--json', action='store_true', default=False, help='在 stdout 输出 json')
    sub.add_argument('-o', '--out', help='csv 文件')
    sub.set_defaults(handler=cmd_bench)

    sub = commands.add_parser('encode', help='把 csv 数据集编码成量子态')
    sub.add_argument('csv', help='csv 文件')
    sub.add_argument('-o', '--out', required=True, help='编码结果 npz 文件')
    sub.add_argument('--label-column', help='标签列，不参与编码')
    sub.add_argument('--categorical-map', help='分类映射，json 文件或 json 字符串：{列名: {值: 整数}}')
    sub.add_argument('--sidecar', help='沿用已有旁注文件里的映射和最大值')
    sub.add_argument('--save-sidecar', help='旁注文件保存位置，默认与 npz 同名')
    sub.set_defaults(handler=cmd_encode)

    sub = commands.add_parser('config', help='保存当前配置为 ini 文件')
    sub.add_argument('-o', '--out', default=CONFIG_FILE, help=f'默认 {CONFIG_FILE}')
    sub.set_defaults(handler=cmd_config)

    return parser


# ---------------------------------------------------------------- 辅助

def _solver(args, base=None):
    """
    模型文件的 solver 块，再用命令行参数覆盖
    """
    solver = dict(base or {})
    for key, value in (('tolerance', args.tolerance), ('max_iters', args.max_iters), ('seed', args.solver_seed)):
        if value is not None:
            solver[key] = value
    return PowerIterationConfig.from_dict(solver)


def _model(args):
    """
    返回 (模型, PowerIterationConfig)
    """
    base = {}
    if args.model:
        model, base = load_model(args.model)
    elif args.build == 'qcnn':
        model = build_qcnn(args.qubits, rng_seed=args.seed, noise=args.noise)
    else:
        model = build_rotation_entangling(args.qubits, args.rotation_blocks, args.entangling_blocks,
                                          rng_seed=args.seed, noise=args.noise)
    for spec in args.append_noise:
        noise = parse_noise_spec(spec)
        if noise is not None:
            model = append_noise(model, *noise)
    cfg = _solver(args, base)
    if args.emit_model:
        save_model(model, args.emit_model, cfg.to_dict())
        echo(f'模型已保存：{args.emit_model}', is_print=args.verbose)
    return model, cfg


def _write(data, args):
    if args.out:
        json_save(data, args.out)
        echo(f'结果已保存：{args.out}', is_print=args.verbose)
    if args.json:
        print(json.dumps(data, ensure_ascii=False, indent=2))


def _summary(report):
    lines = [
        f'模型：{report.model_name}（{report.num_qubits} 个 qubit）',
        f'后端：{report.backend}',
        f'K* = {report.k_star:.10f}',
        f'最优子集：{{{", ".join(report.optimal_subset)}}}',
        f'用时：{report.wall_time:.3f} 秒',
    ]
    if report.degenerate:
        lines.append('所有子集的跨度为 0，偏差核取前两个计算基矢')
    if not report.converged:
        lines.append('幂迭代没有收敛')
    if report.verdict is not None:
        verdict = report.verdict
        state = '公平' if verdict['fair'] else '不公平'
        lines.append(f'ε = {verdict["epsilon"]:g}，δ = {verdict["delta"]:g}：{state}'
                     f'（K*ε − δ = {verdict["witness_margin"]:.3g}）')
    return '\n'.join(lines)


def _emit_report(report, args):
    _write(report.to_dict(), args)
    if not args.json:
        print(_summary(report))


def _not_converged(report):
    if report.converged:
        return False
    warn('特征值求解没有收敛，报告里保留了残差')
    return True


# ---------------------------------------------------------------- 命令

def cmd_lipschitz(args):
    model, cfg = _model(args)
    result = compute(model, args.backend, cfg, max_workers=args.threads, is_print=args.verbose)
    report = VerificationReport.from_lipschitz(result, model, top_k=args.top_k, full_kernel=args.full_kernel,
                                               solver=cfg.to_dict())
    _emit_report(report, args)
    return EXIT_NOT_CONVERGED if _not_converged(report) else EXIT_OK


def cmd_verify(args):
    model, cfg = _model(args)
    verdict = verify(model, args.epsilon, args.delta, args.backend, cfg, max_workers=args.threads,
                     is_print=args.verbose)
    report = VerificationReport.from_lipschitz(verdict.report, model, verdict, top_k=args.top_k,
                                               full_kernel=args.full_kernel, solver=cfg.to_dict())
    _emit_report(report, args)
    if _not_converged(report):
        return EXIT_NOT_CONVERGED
    return EXIT_OK if verdict.fair else EXIT_UNFAIR


def cmd_bias_pairs(args):
    report = VerificationReport.load(args.report)
    model = report.model()
    verdict = report.verdict or {}
    epsilon = args.epsilon if args.epsilon is not None else verdict.get('epsilon')
    if epsilon is None:
        raise ValueError('报告里没有 ε，请用 --epsilon 给出')
    if report.kernel_truncated:
        echo(f'报告里的偏差核被截断，用 {report.backend} 后端重新计算', is_print=args.verbose)
        result = report.recompute(max_workers=args.threads, is_print=args.verbose)
        if _not_converged(result):
            return EXIT_NOT_CONVERGED
        kernel = result.kernel_psi, result.kernel_phi
    else:
        kernel = report.kernel_states()

    pairs = generate_bias_pairs(model, kernel, epsilon, args.sigma, args.count, max_workers=args.threads)
    expected = expected_output_distance(report.k_star, epsilon)
    items = []
    for pair in pairs:
        item = {**pair.summary(), 'k_star': report.k_star, 'expected_output_distance': expected}
        if 'delta' in verdict:
            item['delta'] = verdict['delta']
            item['is_bias_pair'] = check_pair(model, pair.rho_psi, pair.rho_phi, epsilon, verdict['delta'])
        items.append(item)

    _write(items, args)
    if not args.json:
        for i, item in enumerate(items):
            print(f'{i + 1}. σ = {item["sigma"]}：输入迹距离 {item["input_distance"]:.10f}，'
                  f'输出距离 {item["output_distance"]:.10f}（K*ε = {expected:.10f}）')
    return EXIT_OK


def cmd_bench(args):
    threads = settings.bench.threads if args.threads is None else args.threads
    timeout = settings.bench.timeout if args.timeout is None else args.timeout
    cells = bench_cells(args.qubits, args.noise, args.probs, args.repeats, args.seed)
    solver = _solver(args).to_dict()
    echo(f'共 {len(cells)} 个格子，{threads} 个进程，超时 {timeout:g} 秒', color=Fore.BLUE, is_print=args.verbose)
    frame = run_bench(cells, threads=threads, timeout=timeout, solver=solver, is_print=args.verbose)
    if args.out:
        save_table(frame, args.out)
        echo(f'结果已保存：{args.out}', is_print=args.verbose)
    if args.json:
        print(frame.to_json(orient='records', force_ascii=False, indent=2))
    else:
        print(frame.to_string(index=False))
    if (frame['status'] == 'error').any():
        return EXIT_BAD_INPUT
    if (frame['status'] == 'not-converged').any():
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _categorical_map(text):
    if text is None:
        return None
    data = json_read(text) if os.path.exists(text) else json.loads(text)
    if not isinstance(data, dict):
        raise ValueError('分类映射必须是 {列名: {值: 整数}}')
    return data


def cmd_encode(args):
    dataset = load_csv(args.csv, args.label_column, _categorical_map(args.categorical_map), args.sidecar,
                       is_print=args.verbose)
    save_states(args.out, dataset)
    sidecar = args.save_sidecar or f'{os.path.splitext(args.out)[0]}.sidecar.json'
    save_sidecar(dataset, sidecar)
    print(json.dumps({'rows': len(dataset.rows), 'num_qubits': dataset.num_features,
                      'column_names': list(dataset.column_names), 'states': args.out, 'sidecar': sidecar},
                     ensure_ascii=False, indent=2))
    return EXIT_OK


def cmd_config(args):
    save_config(args.out)
    print(args.out)
    return EXIT_OK


def main(argv=None):
    colorama.just_fix_windows_console()
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_help(sys.stderr)
        return EXIT_BAD_INPUT

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_BAD_INPUT
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_BAD_INPUT

    try:
        if args.config:
            load_config(args.config)
        elif os.path.exists(CONFIG_FILE):
            load_config(CONFIG_FILE)
        return args.handler(args)
    except (ValueError, OSError, KeyError) as e:
        error(f'{type(e).__name__}: {e}')
        return EXIT_BAD_INPUT


if __name__ == '__main__':
    sys.exit(main())
