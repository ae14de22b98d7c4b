import numpy as np
import pytest

from gramkit.approx import (
    approx_dual_defect,
    corrected_dual,
    necessary_bound,
    right_inverse_condition,
    sufficient_conditions,
)
from gramkit.exceptions import DimensionError, PreconditionError
from gramkit.frames import FrameSystem, canonical_dual, is_dual_pair
from gramkit.sampling import random_frame


def _scaled(onb, c):
    return FrameSystem(c * onb.synthesis)


def test_defect_examples(onb2):
    assert approx_dual_defect(onb2, onb2) == 0
    assert approx_dual_defect(onb2, _scaled(onb2, 0.9)) == pytest.approx(0.1)
    assert approx_dual_defect(onb2, _scaled(onb2, -1)) == pytest.approx(2)


def test_defect_shape_mismatch(onb2, redundant):
    with pytest.raises(DimensionError):
        approx_dual_defect(onb2, redundant)


def test_defect_symmetric(rng):
    a, b = random_frame(3, 5, rng), random_frame(3, 5, rng)
    assert approx_dual_defect(a, b) == pytest.approx(approx_dual_defect(b, a), abs=1e-12)


def test_conditions_onb(onb2):
    cert = sufficient_conditions(onb2, onb2, onb2, onb2)
    assert all(c.lhs == 0 and c.verdict for c in cert.conditions)
    assert cert.defect == 0 and cert.conclusion and not cert.violations


def test_conditions_scaled(onb2):
    cert = sufficient_conditions(onb2, _scaled(onb2, 0.95))
    assert cert.quantities["gram_defect"] == pytest.approx(0.05)
    assert cert.defect == pytest.approx(0.05)
    stated = [c for c in cert.conditions if c.orientation == "stated" and c.name == "(1)"][0]
    assert stated.threshold == pytest.approx(1.0) and stated.verdict
    assert cert.conclusion


def test_conditions_redundant_records_numbers(redundant):
    cert = sufficient_conditions(redundant, redundant)
    g = redundant.analysis @ redundant.synthesis
    assert cert.quantities["gram_defect"] == pytest.approx(np.linalg.norm(np.eye(3) - g, 2))
    stated = [c for c in cert.conditions if c.orientation == "stated" and c.name == "(1)"][0]
    assert stated.threshold == pytest.approx(1 / np.sqrt(2 * 1))
    assert stated.verdict == (stated.lhs < stated.threshold)
    assert not cert.violations


def test_conditions_both_orientations(rng):
    left = random_frame(3, 5, rng)
    right = FrameSystem(canonical_dual(left).synthesis + 0.01 * rng.standard_normal((3, 5)))
    cert = sufficient_conditions(left, right)
    assert {c.orientation for c in cert.conditions} == {"stated", "swapped"}
    assert len(cert.conditions) == 6


def test_conditions_reject_wrong_dual(onb2, redundant):
    with pytest.raises(PreconditionError):
        sufficient_conditions(onb2, onb2, left_dual=_scaled(onb2, 2))


def test_right_inverse_identity_reduces_to_first(onb2):
    near = _scaled(onb2, 0.95)
    a = right_inverse_condition(np.eye(2), np.eye(2), onb2, near)
    b = sufficient_conditions(onb2, near)
    first = [c for c in b.conditions if c.orientation == "stated" and c.name == "(1)"][0]
    assert a.conditions[0].lhs == pytest.approx(first.lhs)
    assert a.conditions[0].threshold == pytest.approx(first.threshold)


def test_right_inverse_diagonal(onb2):
    near = _scaled(onb2, 0.95)
    cert = right_inverse_condition(np.diag([2.0, 1.0]), np.diag([0.5, 1.0]), onb2, near)
    assert cert.quantities["composite_residual"] <= 1e-12
    assert cert.conclusion and not cert.violations


def test_right_inverse_rejects_non_inverse(onb2):
    with pytest.raises(PreconditionError):
        right_inverse_condition(np.diag([2.0, 1.0]), np.eye(2), onb2, onb2)


def test_necessary_bound_examples(onb2):
    assert necessary_bound(onb2, onb2).lhs == 0
    cert = necessary_bound(onb2, _scaled(onb2, 0.9))
    assert cert.lhs == pytest.approx(0.1) and cert.threshold == pytest.approx(1)
    assert not cert.violations


def test_necessary_bound_inapplicable(onb2, redundant):
    with pytest.raises(PreconditionError, match="inapplicable"):
        necessary_bound(onb2, _scaled(onb2, -1))
    with pytest.raises(PreconditionError, match="inapplicable"):
        necessary_bound(redundant, canonical_dual(redundant))


def test_corrected_dual_examples(onb2):
    np.testing.assert_allclose(corrected_dual(onb2, _scaled(onb2, 0.9)).synthesis, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(corrected_dual(onb2, onb2).synthesis, np.eye(2))
    with pytest.raises(PreconditionError):
        corrected_dual(onb2, _scaled(onb2, -1))


def test_corrected_dual_random(rng):
    for _ in range(10):
        left = random_frame(3, 6, rng)
        right = FrameSystem(canonical_dual(left).synthesis + 0.05 * rng.standard_normal((3, 6)))
        if approx_dual_defect(left, right) < 1:
            assert is_dual_pair(left, corrected_dual(left, right)).verdict
