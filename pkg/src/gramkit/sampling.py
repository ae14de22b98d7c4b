"""Seeded random operators and frames for property suites and self-tests."""
from __future__ import annotations

import numpy as np

from .frames import FrameSystem, dual_from_parameter

__all__ = [
    "rng_from",
    "complex_gaussian",
    "random_unitary",
    "random_unitaries",
    "UnitaryPool",
    "random_frame",
    "random_tight_frame",
    "random_invertible",
    "random_rank",
    "random_dual",
]


def rng_from(seed=None):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def complex_gaussian(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(n, rng):
    """Haar-distributed unitary (QR with the phase correction)."""
    q, r = np.linalg.qr(complex_gaussian(rng, n, n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_unitaries(n, count, rng):
    """``count`` independent Haar unitaries as a ``(count, n, n)`` stack."""
    q, r = np.linalg.qr(complex_gaussian(rng, count, n, n))
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


class UnitaryPool:
    """Hands out Haar unitaries drawn in batches from one generator.

    Batched QR amortises the per-call overhead that dominates for small
    ``n``; the draws stay deterministic given the generator state.
    """

    def __init__(self, rng, batch=256):
        self.rng = rng
        self.batch = batch
        self._stock = {}

    def unitary(self, n):
        stock = self._stock.get(n)
        if not stock:
            stock = list(random_unitaries(n, self.batch, self.rng))
            self._stock[n] = stock
        return stock.pop()

    def frame(self, n, m, lower=0.5, upper=2.0):
        """As :func:`random_frame`, using pooled unitaries."""
        if m < n:
            raise ValueError("a frame for C^n needs at least n vectors")
        s = _spectrum(n, lower, upper, self.rng)
        return FrameSystem((self.unitary(n) * s) @ self.unitary(m)[:n, :])

    def invertible(self, n, cond=10.0):
        """As :func:`random_invertible`, using pooled unitaries."""
        s = _geometric(n, cond)
        return (self.unitary(n) * s) @ self.unitary(n)


def _geometric(n, cond):
    """``n`` values from 1 down to ``1/cond`` in geometric progression."""
    return float(cond) ** -np.linspace(0.0, 1.0, n) if n > 1 else np.ones(1)


def _spectrum(k, lower, upper, rng):
    s = np.sqrt(rng.uniform(lower, upper, size=k))
    if k:
        s[0], s[-1] = np.sqrt(upper), np.sqrt(lower)
    return np.sort(s)[::-1]


def random_frame(n, m, rng, lower=0.5, upper=2.0):
    """A frame of ``m >= n`` vectors in C^n with optimal bounds ``(lower, upper)``."""
    if m < n:
        raise ValueError("a frame for C^n needs at least n vectors")
    s = _spectrum(n, lower, upper, rng)
    v = random_unitary(m, rng)[:n, :]
    return FrameSystem((random_unitary(n, rng) * s) @ v)


def random_tight_frame(n, m, rng, bound=1.0):
    """A tight frame (``S = bound * I``) of ``m >= n`` vectors."""
    if m < n:
        raise ValueError("a frame for C^n needs at least n vectors")
    return FrameSystem(np.sqrt(bound) * random_unitary(m, rng)[:n, :])


def random_invertible(n, rng, cond=10.0):
    """A random ``n x n`` matrix with condition number exactly ``cond``."""
    s = _geometric(n, cond)
    return (random_unitary(n, rng) * s) @ random_unitary(n, rng)


def random_rank(rows, cols, rank, rng, cond=10.0):
    """A ``rows x cols`` matrix of exact rank ``rank``."""
    s = np.zeros(min(rows, cols))
    if rank:
        s[:rank] = np.geomspace(1.0, 1.0 / cond, rank) if rank > 1 else 1.0
    left = random_unitary(rows, rng)[:, : len(s)]
    right = random_unitary(cols, rng)[: len(s), :]
    return (left * s) @ right


def random_dual(frame, rng, scale=1.0):
    """A random (generally non-canonical) dual of a spanning frame."""
    return dual_from_parameter(frame, scale * complex_gaussian(rng, frame.dim, frame.count))
