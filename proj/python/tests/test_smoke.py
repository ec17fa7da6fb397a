"""Smoke tests for the qsing extension module."""

import math

import numpy as np
import pytest

import qsing


def test_eigh_round_trip():
    rng = np.random.default_rng(7)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = (g + g.conj().T) / 2
    w, v = qsing.eigh(a)
    w = np.asarray(w)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - a) < 1e-10


def test_matrix_log_exp_round_trip():
    rho = np.diag([0.25, 0.75]).astype(complex)
    back = qsing.matrix_exp(qsing.matrix_log(rho))
    assert np.linalg.norm(back - rho) < 1e-12


def test_matrix_log_rank_deficient_raises():
    with pytest.raises(ArithmeticError):
        qsing.matrix_log(np.diag([1.0, 0.0]).astype(complex))


def test_born_probabilities_uniform():
    scheme = qsing.PauliShadowScheme(1)
    rho = np.eye(2, dtype=complex) / 2
    probs = [qsing.trace_product(e, rho) for e in scheme.povm_elements()]
    assert probs == pytest.approx([1 / 6] * 6, abs=1e-12)
    assert qsing.is_tomographically_complete(scheme.povm_elements())


def test_shadow_unbiasedness():
    scheme = qsing.PauliShadowScheme(1)
    rho = np.array([[0.7, 0.1 + 0.05j], [0.1 - 0.05j, 0.3]], dtype=complex)
    elements = scheme.povm_elements()
    estimate = sum(
        qsing.trace_product(elements[m], rho) * scheme.snapshot(m)
        for m in range(scheme.n_outcomes)
    )
    assert np.abs(estimate - rho).max() < 1e-12


def test_divergences():
    rho = np.diag([0.5, 0.5]).astype(complex)
    sigma = np.diag([0.8, 0.2]).astype(complex)
    d = qsing.quantum_relative_entropy(rho, sigma)
    assert d > 0
    assert qsing.quantum_relative_entropy(rho, rho) == pytest.approx(0, abs=1e-10)
    assert qsing.kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2))


def test_model_registry():
    assert "ex41_regular" in qsing.model_ids()
    model = qsing.make_model("ex41_regular")
    assert model.dim_param == 1
    sigma = model.sigma([math.pi / 4])
    assert np.allclose(sigma, np.eye(2) / 2)
    assert model.domain_contains([0.3])
    assert not model.domain_contains([-0.1])


def test_mh_and_criteria_pipeline():
    scheme = qsing.PauliShadowScheme(1)
    model = qsing.make_model("ex41_regular")
    rho = model.true_state()
    outcomes = qsing.sample_outcomes(rho, scheme, 800, seed=42)
    samples = qsing.run_mh(model, outcomes, scheme, seed=43, n_samples=1200, burn_in=200)
    assert len(samples) == 1000
    assert 0 < samples.acceptance_rate < 1
    assert samples.thetas.shape == (1000, 1)

    report = qsing.compute_criteria(model, samples, outcomes, scheme, rho)
    assert report["qwaic"] == pytest.approx(report["t_n_q"] + report["c_n_q"], abs=1e-12)
    assert report["waic"] >= report["t_n"]
    assert report["n"] == 800

    sigma_b = qsing.bayes_mean_state(model, samples)
    assert np.trace(sigma_b).real == pytest.approx(1.0, abs=1e-10)


def test_theory_and_reference():
    model = qsing.make_model("sec42_regular")
    report = qsing.numerical_hessians(model)
    assert report["J"][0][0] == pytest.approx(1.308, abs=0.01)
    assert report["J_q"][0][0] == pytest.approx(10.565, abs=0.01)
    assert 2 * report["lambda_q"] == pytest.approx(8.08, abs=0.05)

    ref = qsing.reference("ex42_singular")
    assert ref["lambda"]["value"] == pytest.approx(0.5)
    assert ref["r_cq"]["value"] == pytest.approx(3.0)


def test_experiment_round_trip(tmp_path):
    config = {
        "model_id": "ex41_regular",
        "master_seed": 11,
        "n_grid": [100, 200],
        "repetitions": 2,
        "mh": {"n_samples": 400, "burn_in": 80},
    }
    records, aggregates = qsing.run_experiment(config, threads=2)
    assert len(records) == 4
    assert {r["n"] for r in records} == {100, 200}
    assert aggregates[0]["n"] == 100
    assert "qwaic" in aggregates[0]

    seeds = [qsing.derive_child_seed(11, n, rep) for n in (100, 200) for rep in (0, 1)]
    assert len(set(seeds)) == 4
    assert sorted(r["seed"] for r in records) == sorted(seeds)

    qsing.run_experiment_to_dir(config, str(tmp_path / "out"), threads=1)
    assert (tmp_path / "out" / "runs.csv").exists()
    assert (tmp_path / "out" / "config.json").exists()
