# -*- coding: utf-8 -*-
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qfair.channel import GlobalDepolarizing, LocalOp, CircuitChannel, apply
from qfair.measurement import last_qubit_projective, Povm
from qfair.model import (DecisionModel, ModelError, forward, classify, parse_noise_spec, append_noise, build_qcnn,
                         build_rotation_entangling, qcnn_num_params, qcnn_pool_pairs, qcnn_conv_pairs,
                         entangling_pairs, model_to_spec, model_from_spec, load_model, save_model)
from qfair.qstate import basis_state, maximally_mixed, random_density_matrix, DimensionError


def test_forward_and_classify(identity_model):
    assert forward(identity_model, basis_state(2, 1))['1'] == pytest.approx(1.0)
    assert classify(identity_model, basis_state(2, 1)) == '1'
    assert classify(identity_model, basis_state(2, 2)) == '0'


def test_classify_ties_go_to_smallest_label(identity_model):
    assert classify(identity_model, maximally_mixed(2)) == '0'


def test_forward_dimension_mismatch(identity_model):
    with pytest.raises(DimensionError):
        forward(identity_model, basis_state(3))


def test_model_qubit_mismatch():
    with pytest.raises(ModelError):
        DecisionModel(CircuitChannel(2, ()), last_qubit_projective(3))


@pytest.mark.parametrize('text, expected', [
    ('none', None),
    ('depolarizing:0.01', ('depolarizing', 0.01)),
    ('Bit-Flip:0.1', ('bit-flip', 0.1)),
    ('global-depolarizing:0.5', ('global-depolarizing', 0.5)),
    (('mixed', '0.2'), ('mixed', 0.2)),
])
def test_parse_noise_spec(text, expected):
    assert parse_noise_spec(text) == expected


@pytest.mark.parametrize('text', ['depolarizing', 'depolarizing:x', 'amplitude:0.1', 'bit-flip:1.5'])
def test_parse_noise_spec_errors(text):
    with pytest.raises(ModelError):
        parse_noise_spec(text)


def test_qcnn_structure():
    assert qcnn_conv_pairs(5) == [(0, 1), (2, 3), (1, 2), (3, 4)]
    assert qcnn_pool_pairs(5) == [(0, 3), (1, 4)]
    assert qcnn_pool_pairs(4) == [(0, 2), (1, 3)]
    model = build_qcnn(5, rng_seed=0)
    assert model.metadata['num_params'] == qcnn_num_params(5) == 9 * 4 + 7 * 2 + 3
    assert model.circuit.is_unitary
    assert model.povm.support == (4,)


def test_qcnn_noise_between_conv_and_pool():
    model = build_qcnn(4, rng_seed=0, noise='bit-flip:0.1')
    kinds = [layer.kind for layer in model.circuit.layers]
    first = kinds.index('noise')
    assert kinds[first:first + 4] == ['noise'] * 4
    assert 'noise' not in kinds[first + 4:]
    assert model.metadata['noise'] == 'bit-flip'
    assert model.metadata['p'] == 0.1


def test_qcnn_seeded():
    a = build_qcnn(4, rng_seed=3)
    b = build_qcnn(4, rng_seed=3)
    assert a.metadata['params'] == b.metadata['params']
    assert a.metadata['params'] != build_qcnn(4, rng_seed=4).metadata['params']


def test_qcnn_explicit_params():
    params = np.zeros(qcnn_num_params(3))
    model = build_qcnn(3, params=params)
    assert_allclose(forward(model, basis_state(3, 0)).probabilities, [1, 0], atol=1e-12)
    with pytest.raises(ModelError):
        build_qcnn(3, params=np.zeros(5))
    with pytest.raises(ModelError):
        build_qcnn(3)


def test_rotation_entangling_structure():
    assert entangling_pairs(4) == [(0, 1), (1, 2), (2, 3), (3, 0)]
    assert entangling_pairs(2) == [(0, 1)]
    model = build_rotation_entangling(4, 3, 2, rng_seed=1, noise='phase-flip:0.01')
    assert model.metadata['num_params'] == 3 * 4 * 3 + 4 * 2
    names = [layer.name for layer in model.circuit.layers]
    # 第一个旋转块（12 个门）之后是噪声
    assert names[12:16] == ['phase-flip'] * 4
    assert names[16:20] == ['XX'] * 4


def test_append_noise():
    model = build_qcnn(3, rng_seed=0)
    noisy = append_noise(model, 'global-depolarizing', 0.1)
    assert isinstance(noisy.circuit.layers[-1], GlobalDepolarizing)
    assert len(noisy.circuit.layers) == len(model.circuit.layers) + 1
    local = append_noise(model, 'bit-flip', 0.1, targets=[2])
    assert local.circuit.layers[-1].targets == (2,)
    assert local.metadata['appended_noise'] == [{'noise': 'bit-flip', 'p': 0.1}]


def test_spec_round_trip(tmp_path):
    model = append_noise(build_qcnn(3, rng_seed=2, noise='mixed:0.05'), 'global-depolarizing', 0.02)
    path = str(tmp_path / 'model.json')
    save_model(model, path, solver={'tolerance': 1e-9})
    loaded, solver = load_model(path)
    assert solver == {'tolerance': 1e-9}
    rho = random_density_matrix(3, 1)
    assert_allclose(apply(loaded.circuit, rho).matrix, apply(model.circuit, rho).matrix, atol=1e-12)
    assert loaded.labels == model.labels


def test_spec_with_raw_kraus_and_effects():
    spec = {
        'num_qubits': 1,
        'layers': [
            {'kind': 'gate', 'name': 'H', 'targets': [0]},
            {'kind': 'raw_kraus', 'targets': [0],
             'matrices': [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]]},
        ],
        'measurement': {'effects': [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]] * 2, 'labels': ['a', 'b']},
    }
    model = model_from_spec(spec)
    assert model.labels == ('a', 'b')
    assert_allclose(forward(model, basis_state(1, 0)).probabilities, [0.5, 0.5], atol=1e-12)
    again = model_from_spec(json.loads(json.dumps(model_to_spec(model))))
    assert again.labels == ('a', 'b')


def test_spec_with_measurement_ops():
    spec = {
        'num_qubits': 2,
        'layers': [],
        'measurement': {'raw_ops': [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]],
                        'targets': [0]},
    }
    model = model_from_spec(spec)
    assert model.povm.support == (0,)
    assert forward(model, basis_state(2, 2))['1'] == pytest.approx(1.0)


@pytest.mark.parametrize('spec', [
    [],
    {'layers': []},
    {'num_qubits': 1, 'layers': [{'name': 'H'}]},
    {'num_qubits': 1, 'layers': [{'kind': 'gate', 'name': 'H'}]},
    {'num_qubits': 1, 'layers': [{'kind': 'gate', 'name': 'H', 'targets': [3]}]},
    {'num_qubits': 1, 'layers': [{'kind': 'teleport', 'targets': [0]}]},
    {'num_qubits': 1, 'measurement': {'effects': [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]}},
])
def test_spec_errors(spec):
    with pytest.raises(ModelError):
        model_from_spec(spec)


def test_load_model_errors(tmp_path):
    with pytest.raises(ModelError):
        load_model(str(tmp_path / 'missing.json'))
    path = tmp_path / 'broken.json'
    path.write_text('{not json', encoding='utf-8')
    with pytest.raises(ModelError):
        load_model(str(path))
