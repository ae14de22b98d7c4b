import numpy as np
import pytest

from gramkit.exceptions import DimensionError, PreconditionError
from gramkit.frames import (
    FrameKind,
    FrameSystem,
    analyze,
    canonical_dual,
    classify,
    dual_from_parameter,
    frame_bounds,
    frame_operator,
    is_dual_pair,
    synthesize,
)
from gramkit.sampling import random_frame

from .conftest import e, family


def test_synthesize_analyze_examples(onb2, redundant):
    np.testing.assert_allclose(synthesize(onb2, [1, 2]), [1, 2])
    np.testing.assert_allclose(analyze(redundant, e(0, 2)), [1, 1, 0])
    np.testing.assert_allclose(analyze(family(2 * e(0, 2)), e(0, 2)), [2])


def test_analysis_conjugates_the_family():
    f = family(np.array([1j, 0]))
    np.testing.assert_allclose(analyze(f, np.array([1, 0])), [-1j])


def test_dimension_mismatch(onb2):
    with pytest.raises(DimensionError):
        synthesize(onb2, [1, 2, 3])
    with pytest.raises(DimensionError):
        analyze(onb2, [1, 2, 3])


def test_frame_operator_examples(onb2, redundant):
    np.testing.assert_allclose(frame_operator(onb2), np.eye(2))
    np.testing.assert_allclose(frame_operator(redundant), np.diag([2, 1]))
    np.testing.assert_allclose(frame_operator(FrameSystem(np.zeros((2, 0)))), np.zeros((2, 2)))


def test_frame_bounds_examples(onb2, redundant):
    assert frame_bounds(onb2) == pytest.approx((1, 1))
    assert frame_bounds(redundant) == pytest.approx((1, 2))
    assert frame_bounds(family(e(0, 2))) == pytest.approx((1, 1))


def test_frame_bounds_zero_system():
    with pytest.raises(PreconditionError):
        frame_bounds(FrameSystem(np.zeros((2, 2))))


def test_classify_examples(onb2, redundant):
    assert classify(onb2).kind is FrameKind.ORTHONORMAL_BASIS
    c = classify(redundant)
    assert c.kind is FrameKind.FRAME and not c.is_riesz_sequence
    assert classify(family(e(0, 2), e(0, 2))).kind is FrameKind.FRAME_SEQUENCE
    assert classify(family(e(0, 3), e(1, 3))).kind is FrameKind.RIESZ_SEQUENCE
    assert classify(family(e(0, 2), 2 * e(1, 2))).kind is FrameKind.RIESZ_BASIS
    assert classify(FrameSystem(np.zeros((2, 1)))).kind is FrameKind.BESSEL_ONLY


def test_classify_implications(rng):
    for _ in range(20):
        f = random_frame(3, 3, rng)
        c = classify(f)
        assert c.is_riesz_basis and c.is_frame and c.is_riesz_sequence


def test_canonical_dual_examples(onb2, redundant):
    np.testing.assert_allclose(canonical_dual(onb2).synthesis, np.eye(2))
    np.testing.assert_allclose(
        canonical_dual(redundant).synthesis, np.array([[0.5, 0.5, 0], [0, 0, 1]]), atol=1e-15
    )
    np.testing.assert_allclose(
        canonical_dual(family(2 * e(0, 2), e(1, 2))).synthesis, np.diag([0.5, 1]), atol=1e-15
    )


def test_canonical_dual_of_frame_sequence():
    # on a subspace the canonical dual reproduces the projector
    f = family(e(0, 3), e(0, 3) + e(1, 3), e(1, 3))
    d = canonical_dual(f)
    np.testing.assert_allclose(d.synthesis @ f.analysis, np.diag([1, 1, 0]), atol=1e-12)


def test_canonical_dual_zero_system():
    with pytest.raises(PreconditionError):
        canonical_dual(FrameSystem(np.zeros((2, 2))))


def test_dual_pair_examples(onb2, redundant):
    assert is_dual_pair(onb2, onb2).verdict
    assert is_dual_pair(redundant, family([0.5, 0], [0.5, 0], [0, 1])).verdict
    assert not is_dual_pair(onb2, family(2 * e(0, 2), e(1, 2))).verdict


def test_dual_pair_shape_mismatch(onb2, redundant):
    with pytest.raises(DimensionError):
        is_dual_pair(onb2, redundant)


def test_dual_from_parameter_is_dual(rng):
    f = random_frame(3, 5, rng)
    for _ in range(5):
        w = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        assert is_dual_pair(f, dual_from_parameter(f, w)).verdict
    np.testing.assert_allclose(
        dual_from_parameter(f, np.zeros((3, 5))).synthesis, canonical_dual(f).synthesis, atol=1e-12
    )


def test_frame_system_construction():
    f = FrameSystem.from_vectors([[1, 0], [0, 1], [1, 1]])
    assert (f.dim, f.count) == (2, 3)
    assert len(f) == 3
    np.testing.assert_allclose(f[2], [1, 1])
    np.testing.assert_allclose(FrameSystem.standard(4).synthesis, np.eye(4))


def test_frame_system_is_immutable(onb2):
    with pytest.raises(ValueError):
        onb2.synthesis[0, 0] = 5


def test_frame_system_rejects_bad_input():
    with pytest.raises(DimensionError):
        FrameSystem(np.ones(3))


def test_zero_vectors_allowed():
    f = family(e(0, 2), np.zeros(2), e(1, 2))
    assert classify(f).is_frame
