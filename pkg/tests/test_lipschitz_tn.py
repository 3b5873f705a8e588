# -*- coding: utf-8 -*-
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qfair.channel import CircuitChannel, LocalOp, GlobalDepolarizing
from qfair.measurement import Povm
from qfair.model import DecisionModel, build_qcnn, build_rotation_entangling, append_noise
from qfair.qstate import random_pure_state, DimensionError
from qfair.lipschitz import (NetworkError, PowerIterationConfig, build_operator_network, matvec, power_iteration,
                             extremal_eigs, lipschitz_tn, lipschitz, heisenberg_effects, compute, LipschitzError)
from qfair.lipschitz.tn import light_cone

TIGHT = PowerIterationConfig(max_iters=50000, tolerance=1e-10, rng_seed=0)
NOISES = ('bit-flip', 'phase-flip', 'bit-phase-flip', 'depolarizing', 'mixed')


def _dense_operator(model, subset):
    effects = heisenberg_effects(model, subset)
    return sum(effects[label] for label in subset)


class _MatrixOperator:
    """ 用稠密矩阵冒充网络，只有 dim 和 matvec"""

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.dim = self.matrix.shape[0]

    def matvec(self, vector):
        return self.matrix @ vector


def _mixed_model():
    """ 三个结果的 POVM 作用在两个 qubit 上，线路含有各种层"""
    layers = (
        LocalOp((0,), 'gate', 'H'),
        LocalOp((0, 1), 'gate', 'CNOT'),
        LocalOp((1,), 'noise', 'mixed', p=0.1),
        LocalOp((2,), 'gate', 'RY', (0.4,)),
        GlobalDepolarizing(0.05),
        LocalOp((1, 2), 'gate', 'XX', (1.1,)),
        LocalOp((2,), 'raw_kraus', matrices=(np.diag([1, np.sqrt(0.7)]), np.array([[0, np.sqrt(0.3)], [0, 0]]))),
        LocalOp((0,), 'noise', 'bit-flip', p=0.2),
        LocalOp((2,), 'gate', 'RX', (0.3,)),
    )
    effects = {'a': np.diag([1, 0, 0, 0]), 'b': np.diag([0, 1, 0, 0]), 'c': np.diag([0, 0, 1, 1])}
    return DecisionModel(CircuitChannel(3, layers), Povm(3, (1, 2), effects), 'mixed-3')


def test_power_iteration_config():
    cfg = PowerIterationConfig()
    assert cfg.max_iters == 10000 and cfg.tolerance == 1e-7 and cfg.rng_seed == 0
    assert PowerIterationConfig.from_dict({'tolerance': 1e-9, 'seed': 3}).to_dict() == \
        {'tolerance': 1e-9, 'max_iters': 10000, 'seed': 3}
    with pytest.raises(NetworkError):
        PowerIterationConfig.from_dict({'tol': 1e-9})
    with pytest.raises(NetworkError):
        PowerIterationConfig(max_iters=0)
    with pytest.raises(NetworkError):
        PowerIterationConfig(tolerance=0)


def test_light_cone_drops_unrelated_layers():
    x, h, cnot = LocalOp((0,), 'gate', 'X'), LocalOp((2,), 'gate', 'H'), LocalOp((1, 2), 'gate', 'CNOT')
    kept, active = light_cone((x, h, cnot), (2,))
    assert [layer for layer, _ in kept] == [h, cnot]
    assert active == {1, 2}


def test_light_cone_records_global_snapshot():
    layers = (LocalOp((0, 1), 'gate', 'CNOT'), GlobalDepolarizing(0.1), LocalOp((1, 2), 'gate', 'CNOT'))
    kept, active = light_cone(layers, (2,))
    assert kept[1][1] == (1, 2)
    assert active == {0, 1, 2}


@pytest.mark.parametrize('subset', [('a',), ('b',), ('a', 'b'), ('a', 'c'), ('a', 'b', 'c')])
def test_network_matches_dense_operator(subset):
    model = _mixed_model()
    net = build_operator_network(model, subset)
    assert_allclose(net.to_dense(), _dense_operator(model, subset), atol=1e-12)


def test_network_on_builders():
    for model in (build_qcnn(5, rng_seed=2, noise='mixed:0.1'),
                  append_noise(build_rotation_entangling(4, rng_seed=1, noise='depolarizing:0.1'),
                               'global-depolarizing', 0.2)):
        net = build_operator_network(model, ('0',))
        assert_allclose(net.to_dense(), _dense_operator(model, ('0',)), atol=1e-12)


def test_network_with_untouched_qubits():
    layers = (LocalOp((0,), 'gate', 'H'), LocalOp((2,), 'gate', 'RY', (0.3,)))
    model = DecisionModel(CircuitChannel(3, layers), Povm(3, (2,), {'0': np.diag([1, 0]), '1': np.diag([0, 1])}))
    net = build_operator_network(model, ('1',))
    assert net.active_qubits == (2,)
    assert_allclose(net.to_dense(), _dense_operator(model, ('1',)), atol=1e-12)


def test_matvec_batches_and_vectors():
    model = build_qcnn(4, rng_seed=3, noise='bit-flip:0.1')
    net = build_operator_network(model, ('0',))
    dense = _dense_operator(model, ('0',))
    psi = random_pure_state(4, 1)
    assert_allclose(matvec(net, psi), dense @ psi.amplitudes, atol=1e-12)
    block = np.stack([random_pure_state(4, seed).amplitudes for seed in range(3)], axis=1)
    assert_allclose(net.matvec(block), dense @ block, atol=1e-12)
    assert net.expectation(psi) == pytest.approx(np.real(np.vdot(psi.amplitudes, dense @ psi.amplitudes)))
    with pytest.raises(DimensionError):
        net.matvec(np.ones(8))


def test_matvec_is_linear_and_self_adjoint():
    model = build_qcnn(4, rng_seed=6, noise='mixed:0.1')
    net = build_operator_network(model, ('0',))
    rng = np.random.default_rng(4)
    for _ in range(5):
        u, v = (rng.standard_normal(16) + 1j * rng.standard_normal(16) for _ in range(2))
        alpha, beta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        assert_allclose(net.matvec(alpha * u + beta * v), alpha * net.matvec(u) + beta * net.matvec(v), atol=1e-9)
        assert np.vdot(u, net.matvec(v)) == pytest.approx(np.conj(np.vdot(v, net.matvec(u))), abs=1e-9)


def test_invalid_subsets():
    model = build_qcnn(3, rng_seed=0)
    with pytest.raises(NetworkError):
        build_operator_network(model, ())
    with pytest.raises(NetworkError):
        build_operator_network(model, ('2',))


def test_to_dense_size_limit():
    net = build_operator_network(build_qcnn(3, rng_seed=0), ('0',))
    with pytest.raises(NetworkError):
        net.to_dense(max_qubits=2)


def test_power_iteration_finds_largest_eigenvalue():
    model = build_qcnn(4, rng_seed=5, noise='depolarizing:0.1')
    net = build_operator_network(model, ('0',))
    result = power_iteration(net, TIGHT)
    assert result.converged
    assert result.eigenvalue == pytest.approx(np.linalg.eigvalsh(net.to_dense())[-1], abs=1e-8)
    assert result.residual <= 1e-10
    assert np.all(np.diff(result.history) > -1e-12)


def test_power_iteration_reports_non_convergence():
    model = build_qcnn(4, rng_seed=5, noise='depolarizing:0.1')
    net = build_operator_network(model, ('0',))
    result = power_iteration(net, PowerIterationConfig(max_iters=1, tolerance=1e-15))
    assert not result.converged
    assert result.iterations == 1
    assert result.residual > 0


def test_clustered_top_eigenvalues_are_not_converged_early():
    operator = _MatrixOperator(np.diag([1.0, 0.9999, 0.3, 0.0]))
    short = power_iteration(operator, PowerIterationConfig(rng_seed=0))
    assert not short.converged
    assert short.residual > 1e-7
    full = power_iteration(operator, PowerIterationConfig(max_iters=200000, rng_seed=0))
    assert full.converged
    assert full.residual <= 1e-7
    assert full.eigenvalue == pytest.approx(1.0, abs=1e-9)


def test_extremal_eigs():
    model = _mixed_model()
    eigs = extremal_eigs(build_operator_network(model, ('a',)), build_operator_network(model, ('b', 'c')), TIGHT)
    values = np.linalg.eigvalsh(_dense_operator(model, ('a',)))
    assert eigs.lambda_max == pytest.approx(values[-1], abs=1e-8)
    assert eigs.lambda_min == pytest.approx(values[0], abs=1e-8)
    assert abs(np.vdot(eigs.psi, eigs.phi)) < 1e-8
    with pytest.raises(NetworkError):
        extremal_eigs(build_operator_network(model, ('a',)), build_operator_network(model, ('a', 'b')))


def test_lipschitz_tn_report(identity_model):
    report = lipschitz_tn(identity_model, TIGHT)
    assert report.backend == 'tensor-network'
    assert report.k_star == pytest.approx(1.0, abs=1e-9)
    assert report.converged
    assert report.metadata['solver'] == TIGHT.to_dict()
    assert set(report.residuals) == {('0',)}


def test_lipschitz_tn_degenerate(uninformative_model):
    report = lipschitz_tn(uninformative_model, TIGHT)
    assert report.degenerate
    assert report.k_star == pytest.approx(0.0, abs=1e-9)
    assert_allclose(report.kernel_psi.amplitudes, [1, 0, 0, 0])


def test_lipschitz_tn_not_converged_is_reported():
    model = build_qcnn(4, rng_seed=5, noise='depolarizing:0.1')
    report = lipschitz_tn(model, PowerIterationConfig(max_iters=1, tolerance=1e-15))
    assert not report.converged
    assert report.iterations[('0',)] == [1, 1]


def test_compute_dispatch(identity_model):
    assert compute(identity_model, 'dense').backend == 'dense'
    assert compute(identity_model, 'tn', TIGHT).backend == 'tensor-network'
    with pytest.raises(LipschitzError):
        compute(identity_model, 'gpu')


def test_backends_agree_on_mixed_model():
    model = _mixed_model()
    dense, network = lipschitz(model), lipschitz_tn(model, TIGHT)
    assert network.k_star == pytest.approx(dense.k_star, abs=1e-6)


@pytest.mark.parametrize('n, noise', [(4, 'depolarizing:0.05'), (5, 'bit-flip:0.1'), (6, 'mixed:0.02'),
                                      (5, 'phase-flip:0.2')])
def test_backends_agree_on_qcnn(n, noise):
    model = build_qcnn(n, rng_seed=n, noise=noise)
    assert lipschitz_tn(model, TIGHT).k_star == pytest.approx(lipschitz(model).k_star, abs=1e-6)


def test_global_depolarizing_law_on_network(qcnn4):
    base = lipschitz_tn(qcnn4, TIGHT).k_star
    noisy = lipschitz_tn(append_noise(qcnn4, 'global-depolarizing', 0.01), TIGHT).k_star
    assert noisy == pytest.approx(0.99 * base, abs=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize('index', range(21))
def test_backends_agree_sweep(index):
    rng = np.random.default_rng(index)
    n = 4 + index % 7
    noise = NOISES[index % 5]
    p = float(rng.uniform(0.02, 0.2))
    model = build_qcnn(n, rng_seed=1000 + index, noise=(noise, p))
    assert lipschitz_tn(model, TIGHT).k_star == pytest.approx(lipschitz(model).k_star, abs=1e-6)


@pytest.mark.slow
def test_sixteen_qubits_noiseless():
    report = lipschitz_tn(build_qcnn(16, rng_seed=0))
    assert report.k_star == pytest.approx(1.0, abs=1e-6)


def _check_default_solver(model):
    network, dense = lipschitz_tn(model), lipschitz(model)
    if network.converged:
        assert network.k_star == pytest.approx(dense.k_star, abs=1e-6)
    else:
        residual = max(max(values) for values in network.residuals.values())
        assert residual > PowerIterationConfig().tolerance


@pytest.mark.parametrize('n, seed, noise, p', [
    (5, 2001, 'phase-flip', 1e-3),
    (4, 2002, 'bit-flip', 1e-2),
    (5, 2003, 'depolarizing', 1e-3),
    (6, 2004, 'mixed', 5e-3),
    (4, 2005, 'bit-phase-flip', 1e-1),
])
def test_default_solver_agrees_or_reports_non_convergence(n, seed, noise, p):
    _check_default_solver(build_qcnn(n, rng_seed=seed, noise=(noise, p)))


@pytest.mark.slow
@pytest.mark.parametrize('index', range(20))
def test_default_solver_sweep(index):
    rng = np.random.default_rng(100 + index)
    n = 4 + index % 5
    p = float(10 ** rng.uniform(-3, -1))
    _check_default_solver(build_qcnn(n, rng_seed=3000 + index, noise=(NOISES[index % 5], p)))


@pytest.mark.slow
def test_sixteen_qubits_noisy():
    model = build_qcnn(16, rng_seed=0, noise='depolarizing:0.01')
    report = lipschitz_tn(model, PowerIterationConfig(max_iters=5000))
    assert report.wall_time < 600
    assert 0 <= report.k_star < 1 - 1e-6
    if not report.converged:
        assert max(max(values) for values in report.residuals.values()) > PowerIterationConfig().tolerance
