"""Dense complex matrix substrate.

Every other module goes through these helpers for singular value
decompositions, pseudo-inverses, ranks and subspace comparisons, so that a
single :class:`TolerancePolicy` decides what counts as zero.

Linear maps are plain two-dimensional ``complex128`` numpy arrays.  The
inner product is ``<x, y> = sum(x * conj(y))`` (linear in the first
argument), hence the analysis operator of a synthesis matrix ``T`` is
``T.conj().T``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, NonFiniteError

__all__ = [
    "RankAmbiguityWarning",
    "TolerancePolicy",
    "DEFAULT_POLICY",
    "SvdFactorization",
    "as_matrix",
    "herm",
    "svd",
    "singular_values",
    "pseudo_inverse",
    "operator_norm",
    "numeric_rank",
    "smallest_singular_value",
    "condition_number",
    "is_invertible",
    "range_projector",
    "range_equal",
    "kernel_equal",
    "subspace_gap",
    "strictly_less",
    "rank_is_reliable",
]


class RankAmbiguityWarning(RuntimeWarning):
    """Singular values sit close to the rank cutoff."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical thresholds shared by all operations.

    Attributes
    ----------
    relative_rank_cutoff : float
        A singular value counts as nonzero when it exceeds this fraction
        of the largest singular value.
    equality_tolerance : float
        Relative tolerance for matrix identities.
    condition_limit : float
        Square matrices with a larger condition number are treated as
        singular.
    """

    relative_rank_cutoff: float = 1e-10
    equality_tolerance: float = 1e-9
    condition_limit: float = 1e12

    def __post_init__(self):
        for name in ("relative_rank_cutoff", "equality_tolerance", "condition_limit"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.relative_rank_cutoff >= 1:
            raise ValueError("relative_rank_cutoff must be < 1")

    def rank_of(self, sigma):
        """Number of singular values above the cutoff."""
        if len(sigma) == 0 or sigma[0] == 0:
            return 0
        return int(np.count_nonzero(sigma > self.relative_rank_cutoff * sigma[0]))

    def allowance(self, cond=1.0):
        """Relative tolerance for an identity whose evaluation has condition ``cond``.

        Never tighter than ``equality_tolerance``; grows like the round-off
        of a backward-stable computation once ``cond`` gets large.
        """
        return max(self.equality_tolerance, 100 * np.finfo(float).eps * cond)

    def close(self, residual, scale=1.0, cond=1.0):
        """True if ``residual`` is negligible relative to ``scale``."""
        return residual <= self.allowance(cond) * max(1.0, scale)


DEFAULT_POLICY = TolerancePolicy()


def as_matrix(a, name="matrix"):
    """Validate and convert ``a`` to a 2-D complex array (copy-free when possible)."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return arr


def herm(a):
    """Conjugate transpose."""
    return a.conj().T


@dataclass(frozen=True)
class SvdFactorization:
    """Full SVD ``A = left @ diag(singular_values) @ herm(right)``.

    ``left`` is ``rows x rows`` and ``right`` is ``cols x cols``; only the
    first ``min(rows, cols)`` columns pair with singular values.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray
    rank_tolerance: float

    @property
    def shape(self):
        return self.left.shape[0], self.right.shape[0]

    @property
    def rank(self):
        return int(np.count_nonzero(self.singular_values > self.rank_tolerance))

    def reconstruct(self):
        k = len(self.singular_values)
        return (self.left[:, :k] * self.singular_values) @ herm(self.right[:, :k])

    def range_basis(self):
        return self.left[:, : self.rank]

    def corange_basis(self):
        """Orthonormal basis of ``(ker A)^perp = ran A*``."""
        return self.right[:, : self.rank]

    def kernel_basis(self):
        return self.right[:, self.rank :]

    def cokernel_basis(self):
        """Orthonormal basis of ``(ran A)^perp = ker A*``."""
        return self.left[:, self.rank :]

    def pseudo_inverse(self):
        r = self.rank
        return (self.right[:, :r] / self.singular_values[:r]) @ herm(self.left[:, :r])


def svd(a, pol=DEFAULT_POLICY):
    """Full SVD with the rank cutoff of ``pol`` attached."""
    a = as_matrix(a)
    n, m = a.shape
    if n == 0 or m == 0:
        return SvdFactorization(np.eye(n, dtype=complex), np.zeros(0), np.eye(m, dtype=complex), 0.0)
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    return SvdFactorization(u, s, herm(vh), pol.relative_rank_cutoff * s[0])


def singular_values(a):
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def rank_is_reliable(sigma, pol=DEFAULT_POLICY):
    """False when some singular value lies within a decade of the cutoff."""
    if len(sigma) == 0 or sigma[0] == 0:
        return True
    lo = pol.relative_rank_cutoff / 10 * sigma[0]
    hi = pol.relative_rank_cutoff * 10 * sigma[0]
    return not np.any((sigma >= lo) & (sigma <= hi))


def pseudo_inverse(a, pol=DEFAULT_POLICY):
    """Moore-Penrose pseudo-inverse via SVD with the policy's relative cutoff."""
    f = svd(a, pol)
    if not rank_is_reliable(f.singular_values, pol):
        warnings.warn(
            "singular values cluster at the rank cutoff; pseudo-inverse is rank-ambiguous",
            RankAmbiguityWarning,
            stacklevel=2,
        )
    return f.pseudo_inverse()


def operator_norm(a):
    s = singular_values(a)
    return float(s[0]) if len(s) else 0.0


def numeric_rank(a, pol=DEFAULT_POLICY):
    return pol.rank_of(singular_values(a))


def smallest_singular_value(a):
    """sigma_min over min(rows, cols) singular values (0 for empty)."""
    s = singular_values(a)
    return float(s[-1]) if len(s) else 0.0


def condition_number(a):
    s = singular_values(a)
    if len(s) == 0:
        return 1.0
    return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def is_invertible(a, pol=DEFAULT_POLICY):
    """Square, full numeric rank and condition number within the limit."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    if a.shape[0] == 0:
        return True
    s = singular_values(a)
    return bool(pol.rank_of(s) == len(s) and s[0] / s[-1] <= pol.condition_limit)


def range_projector(a, pol=DEFAULT_POLICY):
    """Orthogonal projector ``A A^+`` onto ran A."""
    w = svd(a, pol).range_basis()
    return w @ herm(w)


def range_equal(a, b, pol=DEFAULT_POLICY):
    """Whether ran A == ran B, compared through their orthogonal projectors."""
    a, b = as_matrix(a, "A"), as_matrix(b, "B")
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"row counts differ: {a.shape[0]} != {b.shape[0]}")
    diff = range_projector(a, pol) - range_projector(b, pol)
    return bool(operator_norm(diff) <= pol.equality_tolerance)


def kernel_equal(a, b, pol=DEFAULT_POLICY):
    """Whether ker A == ker B (same column count required)."""
    a, b = as_matrix(a, "A"), as_matrix(b, "B")
    if a.shape[1] != b.shape[1]:
        raise DimensionError(f"column counts differ: {a.shape[1]} != {b.shape[1]}")
    return range_equal(herm(a), herm(b), pol)


def subspace_gap(a, b, pol=DEFAULT_POLICY):
    """Operator norm distance between the range projectors of A and B."""
    return operator_norm(range_projector(a, pol) - range_projector(b, pol))


def strictly_less(lhs, rhs, guard=1e-9):
    """``lhs < rhs`` with a relative guard band against boundary flips."""
    return lhs < rhs * (1.0 - guard)
