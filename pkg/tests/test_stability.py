import numpy as np
import pytest

from gramkit.exceptions import ConvergenceError, DimensionError, PreconditionError
from gramkit.frames import FrameSystem
from gramkit.sampling import random_frame, random_invertible
from gramkit.stability import (
    StabilityBudget,
    convergence_harness,
    joint_stability,
    neumann_inverse,
    neumann_partial,
    perturb_certificates,
    riesz_perturbation,
    stability_factor,
    stability_three_ops,
)


def _unit(rng, n):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return x / np.linalg.norm(x, 2)


# neumann

def test_neumann_scalar():
    r = neumann_inverse(np.array([[1.0]]), np.array([[0.5]]))
    assert r.inverse[0, 0] == pytest.approx(2)


def test_neumann_identity():
    r = neumann_inverse(np.eye(2), np.eye(2))
    np.testing.assert_array_equal(r.inverse, np.eye(2))
    assert r.terms == 1 and r.error_bound == 0


def test_neumann_random(rng):
    u2 = np.eye(2) - 0.3 * _unit(rng, 2)
    r = neumann_inverse(np.eye(2), u2)
    np.testing.assert_allclose(r.inverse, np.linalg.inv(u2), atol=1e-9)
    assert r.residual <= 1e-8


def test_neumann_divergent():
    with pytest.raises(ConvergenceError, match="not guaranteed convergent"):
        neumann_inverse(np.eye(2), -np.eye(2))


def test_neumann_singular_start():
    with pytest.raises(PreconditionError):
        neumann_inverse(np.zeros((2, 2)), np.eye(2))


def test_neumann_partial_truncation_bound(rng):
    u1 = random_invertible(3, rng, cond=3)
    inv_norm = np.linalg.norm(np.linalg.inv(u1), 2)
    u2 = u1 - 0.7 / inv_norm * _unit(rng, 3)
    r = inv_norm * np.linalg.norm(u1 - u2, 2)
    direct = np.linalg.inv(u2)
    for k in range(1, 40, 3):
        err = np.linalg.norm(neumann_partial(u1, u2, k) - direct, 2)
        assert err <= r**k / (1 - r) * inv_norm + 1e-12


def test_neumann_term_cap(rng):
    u2 = np.eye(2) - 0.999999 * _unit(rng, 2)
    r = neumann_inverse(np.eye(2), u2, max_terms=64)
    assert r.terms <= 64 and r.truncated


# three operators

def test_three_ops_trivial(onb2):
    c = stability_three_ops(np.eye(2), np.eye(2), np.eye(2), onb2)
    assert c.verdict and c.lhs == 0 and not c.violations


def test_three_ops_geometric(onb2):
    c = stability_three_ops(np.eye(2), 1.05 * np.eye(2), np.eye(2), onb2)
    assert c.lhs == pytest.approx(0.05) and c.verdict
    np.testing.assert_allclose(c.quantities["neumann_inverse"], np.eye(2) / 1.05, atol=1e-9)


def test_three_ops_inconclusive(onb2):
    c = stability_three_ops(np.eye(2), 3 * np.eye(2), np.eye(2), onb2)
    assert not c.verdict and c.status == "inconclusive"


def test_three_ops_singular_gram(redundant):
    with pytest.raises(PreconditionError):
        stability_three_ops(np.eye(2), np.eye(2), np.eye(2), redundant)


# factor

def test_factor_trivial(onb2):
    assert stability_factor(np.eye(2), np.eye(2), onb2).verdict


def test_factor_closed_form(onb2):
    u2 = np.eye(2) + 0.05 * np.array([[0.0, 1.0], [0.0, 0.0]])
    c = stability_factor(np.diag([2.0, 1.0]), u2, onb2)
    assert c.verdict and not c.violations
    assert max(c.quantities["closed_form_residuals"].values()) <= 1e-9


def test_factor_inconclusive(onb2):
    assert stability_factor(np.diag([2.0, 1.0]), 3 * np.eye(2), onb2).status == "inconclusive"


# C1-C3

def test_c1_example(onb2):
    c = perturb_certificates(np.eye(2), 1.5 * np.eye(2), onb2, onb2)["c1"]
    assert c.lhs == pytest.approx(0.5) and c.verdict
    assert c.quantities["sigma_min"] == pytest.approx(1.5)


def test_c2_zero_perturbation(onb2):
    c = perturb_certificates(np.eye(2), None, onb2, onb2, theta=onb2)["c2"]
    assert c.lhs == 0 and c.verdict


def test_c2_boundary_is_inconclusive(onb2):
    theta = FrameSystem(np.eye(2) + np.diag([1.0, 0.0]))
    c = perturb_certificates(np.eye(2), None, onb2, onb2, theta=theta)["c2"]
    assert c.lhs == pytest.approx(c.threshold) and not c.verdict


def test_certificate_selection(onb2):
    assert set(perturb_certificates(np.eye(2), None, onb2, onb2, which=("c3",))) == {"c3"}
    with pytest.raises(ValueError):
        perturb_certificates(np.eye(2), None, onb2, onb2, which=("c4",))


def test_perturb_shape_mismatch(onb2, redundant):
    with pytest.raises(DimensionError):
        perturb_certificates(np.eye(2), np.eye(3), onb2, onb2)


# Riesz perturbation

def test_riesz_trivial(onb2):
    c = riesz_perturbation(np.eye(2), onb2, onb2)
    assert c.lhs == 0 and c.verdict


def test_riesz_example(onb2):
    psi = FrameSystem(np.array([[1.0, 0.5], [0.0, 1.0]]))
    c = riesz_perturbation(np.eye(2), onb2, psi)
    assert c.lhs == pytest.approx(0.25) and c.verdict and not c.violations
    assert c.quantities["neumann_error"] <= 1e-9


def test_riesz_inconclusive(onb2):
    c = riesz_perturbation(np.eye(2), onb2, FrameSystem(3 * np.eye(2)))
    assert not c.verdict


def test_riesz_requires_basis(redundant):
    with pytest.raises(PreconditionError):
        riesz_perturbation(np.eye(2), redundant, redundant)


# joint

def test_joint_zero_perturbation(onb2):
    c = joint_stability(np.eye(2), np.eye(2), onb2, onb2, onb2, onb2, StabilityBudget((0, 0, 0, 0), 1e-3))
    assert c.verdict and c.quantities["sigma_min"] == pytest.approx(1)


def test_joint_small_perturbation(onb2, rng):
    v = np.eye(2) + 0.01 * _unit(rng, 2)
    xi = FrameSystem(np.eye(2) + 0.01 * _unit(rng, 2))
    budget = StabilityBudget((0.02, 0.02, 0.0, 0.0), 0.02)
    c = joint_stability(np.eye(2), v, onb2, onb2, xi, onb2, budget)
    assert set(c.quantities["checks"]) == {"surrogate", "sampled", "operator", "budget", "ratio"}
    assert c.verdict and not c.violations and c.quantities["sigma_min"] > 0


def test_joint_ratio_blocks(onb2):
    c = joint_stability(np.eye(2), np.eye(2), onb2, onb2, onb2, onb2, StabilityBudget((0.3, 0, 0, 0), 1e-3))
    assert not c.quantities["checks"]["ratio"] and not c.verdict


def test_joint_singular_operator(onb2):
    with pytest.raises(PreconditionError):
        joint_stability(np.diag([1.0, 0.0]), np.eye(2), onb2, onb2, onb2, onb2, StabilityBudget((0, 0, 0, 0), 1))


def test_joint_budget_validation():
    with pytest.raises(ValueError):
        StabilityBudget((-1, 0, 0, 0), 0.1)
    with pytest.raises(ValueError):
        StabilityBudget((0, 0, 0), 0.1)


# monotonicity of margins

def test_shrinking_never_flips_a_pass(rng):
    for _ in range(20):
        left, right = random_frame(3, 3, rng), random_frame(3, 3, rng)
        u = random_invertible(3, rng, cond=3)
        d = _unit(rng, 3)
        certs = [perturb_certificates(u, u + t * d, left, right, which=("c1",))["c1"] for t in (0.2, 0.1, 0.05)]
        for big, small in zip(certs, certs[1:]):
            assert small.verdict or not big.verdict


# convergence

def test_convergence_constant(onb2):
    seq = ((np.eye(2), onb2, onb2) for _ in range(5))
    t = convergence_harness(seq, (np.eye(2), onb2, onb2))
    assert t.holds and t.deviations == [0.0] * 5


def test_convergence_operator(onb2, rng):
    n_ = _unit(rng, 2)
    seq = ((np.eye(2) + n_ / n, onb2, onb2) for n in range(1, 51))
    t = convergence_harness(seq, (np.eye(2), onb2, onb2))
    assert t.holds
    np.testing.assert_allclose(t.deviations, [1 / n for n in range(1, 51)], rtol=1e-12)


def test_convergence_frames(rng):
    left, right = random_frame(3, 4, rng), random_frame(3, 5, rng)
    dl, dr = rng.standard_normal((3, 4)), rng.standard_normal((3, 5))
    seq = (
        (np.eye(3), FrameSystem(left.synthesis + dl / n), FrameSystem(right.synthesis + dr / n))
        for n in range(1, 31)
    )
    t = convergence_harness(seq, (np.eye(3), left, right))
    assert t.holds and not t.violations
