"""Tests for Loewner-interval interpolation with prescribed compressions."""

import json

import numpy as np
import pytest

from loewner_lab.errors import PreconditionViolated
from loewner_lab.hermitian import compress, derive_rng, lambda_min, operator_norm
from loewner_lab.interpolation import (
    CompressionTarget,
    OperatorInterval,
    estimate_constants,
    instance_from_json,
    instance_to_json,
    interpolate_exact,
    interpolate_one_sided,
    interpolate_with_slack,
    row_contraction_factor,
    sample_exact_instance,
    sample_one_sided_instance,
    sample_slack_instance,
)


def test_interval_rejects_reversed_pair():
    with pytest.raises(PreconditionViolated):
        OperatorInterval(np.eye(2), np.zeros((2, 2)))


def test_target_must_live_in_corner():
    with pytest.raises(PreconditionViolated):
        CompressionTarget(np.diag([1.0, 0.0]), np.ones((2, 2)))


def test_slack_p_identity_collapses_to_target():
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(3, 3))
    k = (Z + Z.T) / 2.0
    X = rng.normal(size=(3, 3))
    h = k + X.T @ X
    y = (k + h) / 2.0
    interval = OperatorInterval(k, h)
    cert = interpolate_with_slack(interval, CompressionTarget(np.eye(3), y), 0.05)
    assert operator_norm(cert.x - y) < 1e-10


def test_slack_dim2_hand_instance():
    interval = OperatorInterval(np.zeros((2, 2)), np.eye(2))
    target = CompressionTarget(np.diag([1.0, 0.0]), np.diag([0.5, 0.0]))
    cert = interpolate_with_slack(interval, target, 0.1)
    assert cert.compression_residual < 1e-10
    assert cert.lower_margin >= -1e-10 and cert.upper_margin >= -1e-10


def test_slack_randomized_audit():
    for trial in range(200):
        rng = derive_rng(100, trial)
        dim = int(rng.integers(2, 7))
        eps = float(rng.choice([1.0, 0.1, 0.01]))
        interval, target = sample_slack_instance(dim, eps, rng)
        cert = interpolate_with_slack(interval, target, eps)
        scale = interval.scale()
        assert cert.compression_residual <= 1e-8 * scale
        assert cert.lower_margin >= -1e-8 * scale
        assert cert.upper_margin >= -1e-8 * scale


def test_row_contraction_zero_target():
    interval = OperatorInterval(np.zeros((2, 2)), np.eye(2))
    t1, t2 = row_contraction_factor(interval, np.zeros((2, 2)), 0.5)
    assert operator_norm(t1) < 1e-12 and operator_norm(t2) < 1e-12


def test_row_contraction_scalar_hand_case():
    # k=0, h=1, y=1, eps=1: w^2 = 2, t1 = t2 = 1/2
    interval = OperatorInterval(np.zeros((1, 1)), np.eye(1))
    t1, t2 = row_contraction_factor(interval, np.eye(1), 1.0)
    assert abs(t1[0, 0] - 0.5) < 1e-12
    assert abs(t2[0, 0] - 0.5) < 1e-12


def test_row_contraction_random_row_norm():
    for trial in range(100):
        rng = derive_rng(5, trial)
        dim = int(rng.integers(2, 7))
        eps = float(rng.choice([0.5, 0.1, 0.01]))
        interval, p, y = sample_one_sided_instance(dim, eps, 1.0, rng)
        t1, t2 = row_contraction_factor(interval, y, eps)
        row = np.sqrt(operator_norm(t1 @ t1.conj().T + t2 @ t2.conj().T))
        assert row <= 1.0 + 1e-10


def test_one_sided_scalar_in_interval():
    # dim 1, p = 1: the compression pins x = y exactly, so y must already
    # satisfy the corner inequalities; take y inside [k, h].
    interval = OperatorInterval(np.zeros((1, 1)), np.eye(1))
    cert = interpolate_one_sided(interval, np.eye(1), np.array([[0.95]]), 0.1, 1.0)
    assert 0.0 - 1e-10 <= cert.x[0, 0].real <= 1.0 + 1e-10
    assert cert.compression_residual < 1e-10


def test_one_sided_rejects_target_above_corner():
    # y = 1.05 violates p h p >= p y p when p = 1
    interval = OperatorInterval(np.zeros((1, 1)), np.eye(1))
    with pytest.raises(PreconditionViolated):
        interpolate_one_sided(interval, np.eye(1), np.array([[1.05]]), 0.1, 1.0)


def test_one_sided_rejects_eps_geq_eta():
    interval = OperatorInterval(np.zeros((2, 2)), np.eye(2))
    with pytest.raises(PreconditionViolated):
        interpolate_one_sided(interval, np.eye(2), 0.5 * np.eye(2), 0.5, 0.5)


def test_one_sided_rejects_degenerate_interval():
    # h = k makes eta <= ||h - k|| impossible
    k = np.zeros((2, 2))
    interval = OperatorInterval(k, k)
    with pytest.raises(PreconditionViolated):
        interpolate_one_sided(interval, np.eye(2), k, 0.01, 0.5)


def test_one_sided_randomized_audit():
    for trial in range(200):
        rng = derive_rng(200, trial)
        dim = int(rng.integers(2, 7))
        eta = 1.0
        eps = float(rng.choice([1e-2, 1e-4]))
        interval, p, y = sample_one_sided_instance(dim, eps, eta, rng)
        cert = interpolate_one_sided(interval, p, y, eps, eta)
        scale = interval.scale()
        assert operator_norm(compress(p, cert.x) - compress(p, y)) <= 1e-8 * scale
        assert cert.lower_margin >= -1e-8 * scale
        assert cert.upper_margin >= -1e-8 * scale


def test_exact_symmetric_data():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(3, 3))
    g = X.T @ X + 1.5 * np.eye(3)
    interval = OperatorInterval(-g / 2.0, g / 2.0)
    p = np.diag([1.0, 0.0, 0.0])
    cert = interpolate_exact(interval, p, np.zeros((3, 3)), 0.05, 1.0)
    assert operator_norm(compress(p, cert.x)) < 1e-8 * interval.scale()


def test_exact_randomized_audit():
    for trial in range(200):
        rng = derive_rng(300, trial)
        dim = int(rng.integers(2, 7))
        eta = 1.0
        eps = float(rng.choice([1e-2, 1e-4]))
        interval, p, y = sample_exact_instance(dim, eps, eta, rng)
        cert = interpolate_exact(interval, p, y, eps, eta)
        scale = interval.scale()
        assert cert.compression_residual <= 1e-8 * scale
        assert cert.lower_margin >= -1e-8 * scale
        assert cert.upper_margin >= -1e-8 * scale


def test_audited_bound_formula_monotone_in_eps():
    # the bound c * (eps/eta)^{1/4} * ||g|| shrinks with eps
    etas = 1.0
    vals = [50.0 * (e / etas) ** 0.25 for e in (1e-2, 1e-3, 1e-4)]
    assert vals == sorted(vals, reverse=True)


def test_estimate_constants_empty_and_deterministic():
    empty = estimate_constants(dims=(2,), trials=0, eps_eta_grid=(1e-2,), seed=1)
    assert empty["sup_ratio"] == 0.0
    r1 = estimate_constants(dims=(2, 3), trials=3, eps_eta_grid=(1e-2,), seed=42)
    r2 = estimate_constants(dims=(2, 3), trials=3, eps_eta_grid=(1e-2,), seed=42)
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)
    assert 0.0 < r1["sup_ratio"] <= 50.0


def test_estimate_constants_argmax_replays():
    rep = estimate_constants(dims=(3,), trials=5, eps_eta_grid=(1e-2,), seed=7)
    cell = rep["cells"][0]
    assert cell["construction"] == "one_sided"
    interval, p, y, eps, eta = instance_from_json(cell["argmax_instance"])
    cert = interpolate_one_sided(interval, p, y, eps, eta)
    gnorm = operator_norm(interval.h - interval.k)
    ratio = cert.perturbation / ((eps / eta) ** 0.25 * gnorm)
    assert abs(ratio - cell["sup_ratio"]) < 1e-9


def test_instance_json_roundtrip():
    rng = derive_rng(9, 0)
    interval, p, y = sample_one_sided_instance(3, 0.01, 1.0, rng)
    obj = instance_to_json(interval, p, y, 0.01, 1.0)
    obj2 = json.loads(json.dumps(obj))
    interval2, p2, y2, eps2, eta2 = instance_from_json(obj2)
    assert operator_norm(interval2.k - interval.k) < 1e-15
    assert operator_norm(p2 - p) < 1e-15
    assert eps2 == 0.01 and eta2 == 1.0
