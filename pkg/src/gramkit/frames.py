"""Finite frame systems and their duals.

A :class:`FrameSystem` stores its synthesis matrix ``T`` (one column per
element) and eagerly caches the frame operator ``S = T T*`` and the
singular values of ``T``.  Infinite index sets are always truncated;
zero vectors are legal elements.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .certificate import Certificate
from .exceptions import DimensionError, PreconditionError
from .numeric import DEFAULT_POLICY, as_matrix, herm, operator_norm, singular_values, svd

__all__ = [
    "FrameSystem",
    "FrameKind",
    "FrameClass",
    "as_frame",
    "synthesize",
    "analyze",
    "frame_operator",
    "frame_bounds",
    "classify",
    "canonical_dual",
    "dual_from_parameter",
    "is_dual_pair",
]


class FrameSystem:
    """A finite family ``{phi_1, ..., phi_m}`` in C^n.

    Parameters
    ----------
    synthesis : array_like, shape (n, m)
        Column ``j`` is ``phi_j``.
    """

    __slots__ = ("synthesis", "frame_operator", "singular_values")

    def __init__(self, synthesis):
        t = np.array(as_matrix(synthesis, "synthesis"), dtype=complex, copy=True)
        t.flags.writeable = False
        s = t @ herm(t)
        s = (s + herm(s)) / 2
        s.flags.writeable = False
        self.synthesis = t
        self.frame_operator = s
        self.singular_values = singular_values(t)

    @classmethod
    def from_vectors(cls, vectors, dim=None):
        vectors = [np.asarray(v, dtype=complex).ravel() for v in vectors]
        if not vectors:
            if dim is None:
                raise DimensionError("dim is required for an empty system")
            return cls(np.zeros((dim, 0), dtype=complex))
        lengths = {len(v) for v in vectors}
        if len(lengths) != 1 or (dim is not None and lengths != {dim}):
            raise DimensionError(f"inconsistent vector lengths {sorted(lengths)}")
        return cls(np.column_stack(vectors))

    @classmethod
    def standard(cls, m):
        """The standard orthonormal basis of C^m."""
        return cls(np.eye(m, dtype=complex))

    @property
    def dim(self):
        return self.synthesis.shape[0]

    @property
    def count(self):
        return self.synthesis.shape[1]

    @property
    def analysis(self):
        return herm(self.synthesis)

    @property
    def upper_bound(self):
        """Optimal Bessel bound ``sigma_1(T)^2``."""
        return float(self.singular_values[0] ** 2) if len(self.singular_values) else 0.0

    def vectors(self):
        return [self.synthesis[:, j] for j in range(self.count)]

    def __len__(self):
        return self.count

    def __getitem__(self, j):
        return self.synthesis[:, j]

    def __repr__(self):
        return f"FrameSystem(dim={self.dim}, count={self.count})"

    def mapped(self, op):
        """The image family ``{U phi_j}``."""
        op = as_matrix(op, "operator")
        if op.shape[1] != self.dim:
            raise DimensionError(f"operator {op.shape} cannot act on C^{self.dim}")
        return FrameSystem(op @ self.synthesis)

    def scaled(self, c):
        return FrameSystem(c * self.synthesis)

    def matches(self, other, pol=DEFAULT_POLICY):
        """Elementwise equality of two families up to the equality tolerance."""
        if self.synthesis.shape != other.synthesis.shape:
            return False
        scale = max(self.upper_bound, other.upper_bound, 1.0) ** 0.5
        return operator_norm(self.synthesis - other.synthesis) <= pol.equality_tolerance * scale


def as_frame(x):
    return x if isinstance(x, FrameSystem) else FrameSystem(x)


class FrameKind(enum.Enum):
    BESSEL_ONLY = "BesselOnly"
    FRAME_SEQUENCE = "FrameSequence"
    FRAME = "Frame"
    RIESZ_SEQUENCE = "RieszSequence"
    RIESZ_BASIS = "RieszBasis"
    ORTHONORMAL_BASIS = "OrthonormalBasis"


@dataclass(frozen=True)
class FrameClass:
    """Classification plus the optimal bounds on the span of the family."""

    kind: FrameKind
    lower: float
    upper: float
    spanning: bool
    rank: int

    @property
    def is_frame(self):
        return self.kind in (FrameKind.FRAME, FrameKind.RIESZ_BASIS, FrameKind.ORTHONORMAL_BASIS)

    @property
    def is_riesz_sequence(self):
        return self.kind in (
            FrameKind.RIESZ_SEQUENCE,
            FrameKind.RIESZ_BASIS,
            FrameKind.ORTHONORMAL_BASIS,
        )

    @property
    def is_riesz_basis(self):
        return self.kind in (FrameKind.RIESZ_BASIS, FrameKind.ORTHONORMAL_BASIS)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "lower": self.lower,
            "upper": self.upper,
            "spanning": self.spanning,
            "rank": self.rank,
        }


def synthesize(frame, coeffs):
    """``sum_j c_j phi_j``."""
    frame = as_frame(frame)
    c = np.asarray(coeffs, dtype=complex)
    if c.shape[0] != frame.count:
        raise DimensionError(f"{frame.count} coefficients expected, got {c.shape[0]}")
    return frame.synthesis @ c


def analyze(frame, f):
    """Coefficients ``<f, phi_j>``."""
    frame = as_frame(frame)
    f = np.asarray(f, dtype=complex)
    if f.shape[0] != frame.dim:
        raise DimensionError(f"vector of length {frame.dim} expected, got {f.shape[0]}")
    return frame.analysis @ f


def frame_operator(frame):
    return as_frame(frame).frame_operator


def frame_bounds(frame, pol=DEFAULT_POLICY):
    """Optimal ``(A, B)`` on the span of the family.

    ``A`` is the smallest nonzero squared singular value of the synthesis
    matrix, so non-spanning families still get their frame-sequence bound.
    """
    frame = as_frame(frame)
    s = frame.singular_values
    r = pol.rank_of(s)
    if r == 0:
        raise PreconditionError("frame bounds undefined for an empty or all-zero system")
    return float(s[r - 1] ** 2), float(s[0] ** 2)


def classify(frame, pol=DEFAULT_POLICY):
    frame = as_frame(frame)
    s = frame.singular_values
    r = pol.rank_of(s)
    if r == 0:
        return FrameClass(FrameKind.BESSEL_ONLY, 0.0, frame.upper_bound, frame.dim == 0, 0)
    lower, upper = float(s[r - 1] ** 2), float(s[0] ** 2)
    spanning = r == frame.dim
    independent = r == frame.count
    if spanning and independent:
        # ||T* T - I|| = max |s_i^2 - 1| for square T
        if np.max(np.abs(s**2 - 1)) <= pol.equality_tolerance:
            kind = FrameKind.ORTHONORMAL_BASIS
        else:
            kind = FrameKind.RIESZ_BASIS
    elif spanning:
        kind = FrameKind.FRAME
    elif independent:
        kind = FrameKind.RIESZ_SEQUENCE
    else:
        kind = FrameKind.FRAME_SEQUENCE
    return FrameClass(kind, lower, upper, spanning, r)


def canonical_dual(frame, pol=DEFAULT_POLICY):
    """``S^+ Phi``, equal to ``S^-1 Phi`` for spanning families.

    Computed as ``(T^+)^*`` so the rank decision is made on ``T`` itself.
    """
    frame = as_frame(frame)
    if pol.rank_of(frame.singular_values) == 0:
        raise PreconditionError("canonical dual undefined for an empty or all-zero system")
    return FrameSystem(herm(svd(frame.synthesis, pol).pseudo_inverse()))


def dual_from_parameter(frame, param, pol=DEFAULT_POLICY):
    """The dual ``S^-1 T + W (I - T* S^-1 T)`` of a spanning frame.

    Every dual of ``frame`` arises this way for some ``W`` of shape
    ``(dim, count)``; ``W = 0`` gives the canonical dual.
    """
    frame = as_frame(frame)
    w = as_matrix(param, "param")
    if w.shape != frame.synthesis.shape:
        raise DimensionError(f"parameter must have shape {frame.synthesis.shape}")
    dual = canonical_dual(frame, pol).synthesis
    proj = herm(frame.synthesis) @ dual
    return FrameSystem(dual + w @ (np.eye(frame.count) - proj))


def is_dual_pair(frame, other, pol=DEFAULT_POLICY, on=None):
    """Check ``T_F T_G* = I`` (or ``= I`` on ran ``on`` for a projector ``on``)."""
    frame, other = as_frame(frame), as_frame(other)
    if frame.synthesis.shape != other.synthesis.shape:
        raise DimensionError(
            f"shapes differ: {frame.synthesis.shape} vs {other.synthesis.shape}"
        )
    defect = frame.synthesis @ other.analysis - np.eye(frame.dim)
    if on is not None:
        defect = defect @ on
    residual = operator_norm(defect)
    return Certificate(
        name="dual-pair",
        verdict=residual <= pol.equality_tolerance,
        lhs=residual,
        threshold=pol.equality_tolerance,
        conclusion="f = sum <f, g_i> f_i for every f" + ("" if on is None else " in the subspace"),
    )
