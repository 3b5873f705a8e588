# -*- coding: utf-8 -*-
import pytest

from qfair.config import reset_config
from qfair.channel import CircuitChannel, LocalOp
from qfair.measurement import last_qubit_projective, uniform_povm
from qfair.model import DecisionModel, build_qcnn, build_rotation_entangling


@pytest.fixture(autouse=True)
def default_settings():
    reset_config()
    yield
    reset_config()


@pytest.fixture
def identity_model():
    """ 空线路 + 最后一个 qubit 的计算基测量，K* = 1"""
    return DecisionModel(CircuitChannel(2, ()), last_qubit_projective(2), 'identity-2')


@pytest.fixture
def hadamard_model():
    layers = (LocalOp((0,), 'gate', 'H'), LocalOp((0, 1), 'gate', 'CNOT'))
    return DecisionModel(CircuitChannel(2, layers), last_qubit_projective(2), 'bell-2')


@pytest.fixture
def uninformative_model():
    return DecisionModel(CircuitChannel(2, ()), uniform_povm(2, 2), 'uniform-2')


@pytest.fixture
def qcnn4():
    return build_qcnn(4, rng_seed=1)


@pytest.fixture
def noisy_qcnn4():
    return build_qcnn(4, rng_seed=1, noise='depolarizing:0.05')


@pytest.fixture
def rotation3():
    return build_rotation_entangling(3, rng_seed=2)
