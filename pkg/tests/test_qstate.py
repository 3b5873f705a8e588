# -*- coding: utf-8 -*-
import numpy as np
import pytest
from numpy.testing import assert_allclose

from qfair.qstate import (PureState, DensityMatrix, OutcomeDistribution, StateError, DimensionError,
                          pure_to_density, trace_distance, tv_distance, helstrom_probability, basis_state,
                          maximally_mixed, random_pure_state, random_density_matrix, mix, partial_trace)


def test_pure_state_requires_unit_norm():
    with pytest.raises(StateError):
        PureState(1, [1, 1])
    with pytest.raises(DimensionError):
        PureState(2, [1, 0])


def test_pure_state_is_read_only():
    psi = basis_state(2, 3)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 1


def test_pure_to_density_projector():
    psi = random_pure_state(3, 5)
    rho = pure_to_density(psi)
    assert_allclose(rho.matrix @ rho.matrix, rho.matrix, atol=1e-12)
    assert_allclose(np.trace(rho.matrix), 1, atol=1e-12)


def test_density_matrix_checks():
    with pytest.raises(StateError):
        DensityMatrix(1, [[1, 0.5], [0.2, 0]])
    with pytest.raises(StateError):
        DensityMatrix(1, [[0.5, 0], [0, 0.4]])
    with pytest.raises(StateError):
        DensityMatrix(1, [[1.5, 0], [0, -0.5]])
    with pytest.raises(DimensionError):
        DensityMatrix(2, np.eye(2) / 2)


def test_trace_distance_examples():
    zero, one = basis_state(1, 0), basis_state(1, 1)
    plus = PureState(1, np.array([1, 1]) / np.sqrt(2))
    assert trace_distance(zero, one) == pytest.approx(1.0, abs=1e-12)
    assert trace_distance(zero, zero) == pytest.approx(0.0, abs=1e-12)
    assert trace_distance(zero, plus) == pytest.approx(np.sqrt(0.5), abs=1e-12)
    assert trace_distance(zero, maximally_mixed(1)) == pytest.approx(0.5, abs=1e-12)


def test_trace_distance_symmetric_and_bounded():
    for seed in range(5):
        rho = random_density_matrix(2, seed)
        sigma = random_density_matrix(2, seed + 100)
        d = trace_distance(rho, sigma)
        assert 0 <= d <= 1
        assert d == pytest.approx(trace_distance(sigma, rho), abs=1e-12)


def test_trace_distance_triangle_inequality():
    rng = np.random.default_rng(11)
    for _ in range(20):
        rho, sigma, tau = (random_density_matrix(2, rng) for _ in range(3))
        assert trace_distance(rho, tau) <= trace_distance(rho, sigma) + trace_distance(sigma, tau) + 1e-10


def test_trace_distance_of_diagonal_states_is_tv_distance():
    rng = np.random.default_rng(12)
    labels = ('00', '01', '10', '11')
    for _ in range(10):
        p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        rho, sigma = DensityMatrix(2, np.diag(p)), DensityMatrix(2, np.diag(q))
        expected = tv_distance(OutcomeDistribution(labels, p), OutcomeDistribution(labels, q))
        assert trace_distance(rho, sigma) == pytest.approx(expected, abs=1e-12)


def test_trace_distance_dimension_mismatch():
    with pytest.raises(DimensionError):
        trace_distance(basis_state(1), basis_state(2))


def test_tv_distance():
    p = OutcomeDistribution(('0', '1'), [1, 0])
    q = OutcomeDistribution(('1', '0'), [0.5, 0.5])
    assert tv_distance(p, q) == pytest.approx(0.5)
    assert tv_distance(p, p) == 0
    with pytest.raises(DimensionError):
        tv_distance(p, OutcomeDistribution(('a', 'b'), [0.5, 0.5]))


def test_outcome_distribution_sorted_and_checked():
    distribution = OutcomeDistribution(('b', 'a'), [0.25, 0.75])
    assert distribution.labels == ('a', 'b')
    assert distribution['b'] == 0.25
    assert distribution.as_dict() == {'a': 0.75, 'b': 0.25}
    with pytest.raises(StateError):
        OutcomeDistribution(('a', 'b'), [0.5, 0.6])
    with pytest.raises(StateError):
        OutcomeDistribution(('a', 'a'), [0.5, 0.5])


def test_helstrom_probability():
    assert helstrom_probability(basis_state(1, 0), basis_state(1, 1)) == pytest.approx(1.0)
    assert helstrom_probability(basis_state(1, 0), basis_state(1, 0)) == pytest.approx(0.5)


def test_random_states_are_seeded():
    assert_allclose(random_pure_state(3, 7).amplitudes, random_pure_state(3, 7).amplitudes)
    assert not np.allclose(random_pure_state(3, 7).amplitudes, random_pure_state(3, 8).amplitudes)
    rho = random_density_matrix(2, 3, rank=2)
    assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 2


def test_random_pure_state_first_moment():
    rng = np.random.default_rng(13)
    overlaps = [abs(random_pure_state(1, rng).amplitudes[0]) ** 2 for _ in range(10000)]
    assert np.mean(overlaps) == pytest.approx(0.5, abs=0.02)


def test_mix():
    rho = mix([basis_state(1, 0), basis_state(1, 1)], [0.5, 0.5])
    assert_allclose(rho.matrix, maximally_mixed(1).matrix, atol=1e-12)
    plus = PureState(1, np.array([1, 1]) / np.sqrt(2))
    assert_allclose(mix([basis_state(1, 0), plus], [0.5, 0.5]).matrix, np.array([[3, 1], [1, 1]]) / 4, atol=1e-12)
    with pytest.raises(StateError):
        mix([basis_state(1, 0)], [0.5])
    with pytest.raises(DimensionError):
        mix([basis_state(1, 0), basis_state(2, 0)], [0.5, 0.5])


def test_partial_trace():
    zero, one = basis_state(1, 0), basis_state(1, 1)
    product = PureState(2, np.kron(zero.amplitudes, one.amplitudes))
    rho = product.to_density().matrix
    assert_allclose(partial_trace(rho, 2, [1]), np.diag([0, 1]), atol=1e-12)
    assert_allclose(partial_trace(rho, 2, [0]), np.diag([1, 0]), atol=1e-12)
    assert_allclose(partial_trace(rho, 2, [0, 1]), rho, atol=1e-12)


def test_expectation():
    rho = basis_state(1, 1).to_density()
    assert rho.expectation(np.diag([0, 1])) == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        rho.expectation(np.eye(4))
