# -*- coding: utf-8 -*-
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qfair.model import build_qcnn, forward
from qfair.qstate import random_pure_state
from qfair.lipschitz import lipschitz, lipschitz_tn, PowerIterationConfig
from qfair.fairness import verify
from qfair.report import ReportError, VerificationReport, serialize_state, deserialize_state, subset_key


def test_serialize_state_full_and_truncated():
    state = random_pure_state(4, 0)
    full = serialize_state(state)
    assert not full['truncated']
    assert_allclose(deserialize_state(json.loads(json.dumps(full))).amplitudes, state.amplitudes)

    top = serialize_state(state, top_k=3)
    assert top['truncated']
    assert len(top['indices']) == 3
    assert top['indices'] == sorted(top['indices'])
    largest = np.sort(np.argsort(-np.abs(state.amplitudes))[:3])
    assert top['indices'] == largest.tolist()
    with pytest.raises(ReportError):
        deserialize_state(top)


def test_deserialize_errors():
    with pytest.raises(ReportError):
        deserialize_state({'truncated': False, 'indices': [0]})
    with pytest.raises(ReportError):
        deserialize_state({'truncated': False, 'num_qubits': 1, 'indices': [0, 1], 'amplitudes': [[1, 0], [1, 0]]})


def test_subset_key():
    assert subset_key(('0', '2')) == '0,2'


def test_fair_report_has_no_kernel(noisy_qcnn4):
    verdict = verify(noisy_qcnn4, 0.1, 0.5)
    report = VerificationReport.from_lipschitz(verdict.report, noisy_qcnn4, verdict)
    assert verdict.fair
    assert report.kernel is None
    with pytest.raises(ReportError):
        report.kernel_states()


def test_unfair_report_round_trip(tmp_path, noisy_qcnn4):
    verdict = verify(noisy_qcnn4, 0.1, 0.01)
    report = VerificationReport.from_lipschitz(verdict.report, noisy_qcnn4, verdict, full_kernel=True)
    path = str(tmp_path / 'report.json')
    report.save(path)
    loaded = VerificationReport.load(path)

    assert loaded.k_star == report.k_star
    assert loaded.optimal_subset == ['0']
    assert loaded.subset_spreads == {'0': pytest.approx(report.k_star)}
    assert loaded.verdict == report.verdict
    again = loaded.recompute_verdict(0.1, 0.01)
    assert again.fair == verdict.fair
    assert again.witness_margin == pytest.approx(verdict.witness_margin)

    psi, phi = loaded.kernel_states()
    assert_allclose(psi.amplitudes, verdict.kernel[0].amplitudes)
    assert_allclose(phi.amplitudes, verdict.kernel[1].amplitudes)

    model = loaded.model()
    assert model.num_qubits == 4
    assert_allclose(forward(model, psi).probabilities, forward(noisy_qcnn4, psi).probabilities, atol=1e-12)


def test_kernel_truncated_by_default():
    model = build_qcnn(7, rng_seed=0)
    report = VerificationReport.from_lipschitz(lipschitz(model), model)
    assert report.kernel['psi']['truncated']
    assert len(report.kernel['psi']['indices']) == 64
    with pytest.raises(ReportError):
        report.kernel_states()


def test_recompute_restores_truncated_kernel():
    model = build_qcnn(7, rng_seed=0, noise='depolarizing:0.05')
    first = lipschitz(model)
    report = VerificationReport.from_lipschitz(first, model)
    assert report.kernel_truncated
    again = report.recompute()
    assert again.backend == 'dense'
    assert again.k_star == pytest.approx(first.k_star, abs=1e-12)
    assert again.kernel_psi.num_qubits == 7
    assert abs(np.vdot(again.kernel_psi.amplitudes, first.kernel_psi.amplitudes)) == pytest.approx(1.0, abs=1e-8)


def test_recompute_uses_saved_solver(identity_model):
    cfg = PowerIterationConfig(tolerance=1e-10, max_iters=50000, rng_seed=3)
    report = VerificationReport.from_lipschitz(lipschitz_tn(identity_model, cfg), identity_model,
                                               solver=cfg.to_dict())
    assert not report.kernel_truncated
    again = report.recompute()
    assert again.backend == 'tensor-network'
    assert again.metadata['solver'] == cfg.to_dict()
    assert again.k_star == pytest.approx(1.0, abs=1e-9)
    report.model_spec = {**report.model_spec, 'solver': {'tol': 1e-9}}
    with pytest.raises(ReportError):
        report.recompute()


def test_network_report_keeps_solver(identity_model):
    cfg = PowerIterationConfig(tolerance=1e-10)
    report = VerificationReport.from_lipschitz(lipschitz_tn(identity_model, cfg), identity_model,
                                               solver=cfg.to_dict())
    assert report.backend == 'tensor-network'
    assert report.model_spec['solver'] == cfg.to_dict()
    assert report.residuals.keys() == {'0'}
    assert json.loads(json.dumps(report.to_dict()))['metadata']['solver']['tolerance'] == 1e-10


def test_from_dict_errors(identity_model):
    data = VerificationReport.from_lipschitz(lipschitz(identity_model), identity_model).to_dict()
    with pytest.raises(ReportError):
        VerificationReport.from_dict([])
    with pytest.raises(ReportError):
        VerificationReport.from_dict({key: value for key, value in data.items() if key != 'k_star'})
    with pytest.raises(ReportError):
        VerificationReport.from_dict({**data, 'colour': 'red'})


def test_load_errors(tmp_path):
    with pytest.raises(ReportError):
        VerificationReport.load(str(tmp_path / 'missing.json'))
    path = tmp_path / 'bad.json'
    path.write_text('{', encoding='utf-8')
    with pytest.raises(ReportError):
        VerificationReport.load(str(path))


def test_report_without_model(identity_model):
    report = VerificationReport.from_lipschitz(lipschitz(identity_model), identity_model)
    report.model_spec = None
    with pytest.raises(ReportError):
        report.model()
