import numpy as np
import pytest

from gramkit.frames import FrameSystem
from gramkit.exceptions import PreconditionError
from gramkit.sampling import random_frame, random_unitary
from gramkit.schatten import (
    mixed_norm,
    onb_pair_functional,
    schatten_gram_check,
    schatten_norm,
    truncation_decay,
)

from .conftest import e, family


def test_schatten_norm_examples():
    assert schatten_norm(np.diag([3.0, 4.0]), 1) == pytest.approx(7)
    assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5)
    for p in (0.5, 1, 3):
        assert schatten_norm(np.eye(4), p) == pytest.approx(4 ** (1 / p))


def test_schatten_norm_rejects_bad_p():
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), 0)
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), np.inf)


def test_schatten_2_is_frobenius(rng):
    a = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    assert schatten_norm(a, 2) == pytest.approx(np.sqrt(np.sum(np.abs(a) ** 2)), rel=1e-12)


def test_mixed_norm_examples():
    assert mixed_norm(np.ones((2, 2)), 2, 2) == pytest.approx(2)
    assert mixed_norm(np.eye(2), 1, 2) == pytest.approx(2)
    assert mixed_norm(np.array([[3.0, 4.0]]), 1, 2) == pytest.approx(5)


def test_onb_functional_standard_basis():
    u = np.diag([3.0, 4.0])
    std = FrameSystem(np.eye(2))
    for p in (1, 2, 3):
        assert onb_pair_functional(u, std, std, p) == pytest.approx(schatten_norm(u, p))


def test_onb_functional_random_pairs(rng):
    u = np.diag([3.0, 4.0])
    for _ in range(100):
        e1, f1 = FrameSystem(random_unitary(2, rng)), FrameSystem(random_unitary(2, rng))
        assert onb_pair_functional(u, e1, f1, 2) <= 5 + 1e-9


def test_onb_functional_zero_operator(rng):
    e1, f1 = FrameSystem(random_unitary(3, rng)), FrameSystem(random_unitary(3, rng))
    assert onb_pair_functional(np.zeros((3, 3)), e1, f1, 1.5) == 0


def test_onb_functional_rejects_non_onb(redundant, onb2):
    with pytest.raises(PreconditionError):
        onb_pair_functional(np.eye(2), family(2 * e(0, 2), e(1, 2)), onb2, 2)


def test_gram_check_onb(onb2):
    r = schatten_gram_check(np.eye(2), onb2, onb2, 2)
    assert r.norm_gram == pytest.approx(np.sqrt(2))
    assert r.hs_entry_sum == pytest.approx(2)
    assert not r.violations


def test_gram_check_trace_class(onb2):
    r = schatten_gram_check(np.diag([3.0, 4.0]), onb2, onb2, 1)
    assert r.norm_gram == pytest.approx(7)
    assert r.diagonal_sum == pytest.approx(7)
    assert r.verdicts["trace"] and not r.violations


def test_gram_check_redundant(redundant):
    r = schatten_gram_check(np.eye(2), redundant, redundant, 2)
    # G = [[1,1,0],[1,1,0],[0,0,1]]: five unit entries
    assert r.hs_entry_sum == pytest.approx(5)
    assert r.norm_gram ** 2 == pytest.approx(5)
    assert r.bound == pytest.approx(2 * np.sqrt(2))


def test_gram_check_random(rng):
    for p in (0.5, 1, 2, 3):
        left, right = random_frame(3, 5, rng), random_frame(3, 4, rng)
        op = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        r = schatten_gram_check(op, left, right, p)
        assert r.verdicts["ideal_bound"] and not r.violations


def test_truncation_decay_diagonal():
    sizes = [4, 8, 16, 32]
    op = lambda n: np.diag(1.0 / np.arange(1, n + 1) ** 2)
    std = lambda n: np.eye(n)
    table = truncation_decay(op, std, std, sizes)
    assert table.trend == "decay"
    assert table.tails[-1] == pytest.approx((1 / 17**2) ** 2)


def test_truncation_decay_identity():
    std = lambda n: np.eye(n)
    table = truncation_decay(std, std, std, [4, 8, 16])
    assert table.trend == "no decay"
    assert table.tails == pytest.approx([1, 1, 1])


def test_truncation_decay_rank_one():
    def op(n):
        a = np.zeros((n, n))
        a[0, 0] = 1
        return a

    std = lambda n: np.eye(n)
    table = truncation_decay(op, std, std, [2, 4, 8])
    assert table.trend == "zero"


def test_gram_check_reverse_bound(rng):
    for _ in range(20):
        left, right = random_frame(3, 4, rng), random_frame(3, 5, rng)
        r = schatten_gram_check(rng.standard_normal((3, 3)), left, right, 1.5)
        assert r.verdicts["reverse_bound"] is True and not r.violations


def test_gram_check_reverse_bound_needs_spanning():
    sub = family(e(0, 2))
    r = schatten_gram_check(np.eye(2), sub, sub, 2)
    assert r.verdicts["reverse_bound"] is None


def test_gram_check_reports_failed_inequality(onb2, monkeypatch):
    import gramkit.schatten as mod

    # a corrupted Gram builder must surface as a violation, not a silent pass
    monkeypatch.setattr(mod, "gram_matrix", lambda op, left, right: 100 * np.eye(2))
    r = schatten_gram_check(np.eye(2), onb2, onb2, 2)
    assert r.verdicts["ideal_bound"] is False and "ideal_bound" in r.violations
