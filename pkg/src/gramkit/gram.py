"""U-cross Gram matrices ``G[i, j] = <U psi_j, phi_i>`` and their algebra."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, PreconditionError, TheoremViolation
from .frames import FrameSystem, as_frame, canonical_dual, classify, is_dual_pair
from .numeric import DEFAULT_POLICY, as_matrix, herm, is_invertible, operator_norm

__all__ = [
    "CrossGram",
    "gram_matrix",
    "gram_entrywise",
    "cross_gram",
    "adjoint",
    "compose",
    "reconstruct_operator",
    "IdentityGramReport",
    "identity_gram_diagnosis",
]


@dataclass(frozen=True, eq=False)
class CrossGram:
    """A cross Gram matrix with the ``(U, Phi, Psi)`` that produced it.

    Matrices read from files carry no provenance (``op`` is None).
    ``rule`` records how a composed provenance operator was simplified.
    """

    matrix: np.ndarray
    op: np.ndarray | None = None
    left: FrameSystem | None = None
    right: FrameSystem | None = None
    rule: str | None = None

    @property
    def has_provenance(self):
        return self.op is not None and self.left is not None and self.right is not None

    @property
    def shape(self):
        return self.matrix.shape


def _operator(op, left, right):
    if op is None:
        if left.dim != right.dim:
            raise DimensionError("identity operator needs both frames in the same space")
        return np.eye(left.dim, dtype=complex)
    op = as_matrix(op, "operator")
    if op.shape != (left.dim, right.dim):
        raise DimensionError(
            f"operator of shape {op.shape} must map C^{right.dim} -> C^{left.dim}"
        )
    return op


def gram_matrix(op, left, right):
    """Plain ``T_left* U T_right`` without validation (hot path)."""
    return herm(left.synthesis) @ (op @ right.synthesis)


def gram_entrywise(op, left, right):
    """Entry by entry ``<U psi_j, phi_i>``; an independent oracle for tests."""
    left, right = as_frame(left), as_frame(right)
    op = _operator(op, left, right)
    out = np.empty((left.count, right.count), dtype=complex)
    for j in range(right.count):
        image = op @ right.synthesis[:, j]
        for i in range(left.count):
            out[i, j] = np.sum(image * np.conj(left.synthesis[:, i]))
    return out


def cross_gram(op, left, right, pol=DEFAULT_POLICY, verify=True):
    """Build ``G_{U, left, right}``.

    ``op=None`` means the identity.  With ``verify`` the entrywise
    definition is compared against the factorization and the norm bound
    ``||G|| <= sqrt(B_left B_right) ||U||`` is checked.
    """
    left, right = as_frame(left), as_frame(right)
    op = _operator(op, left, right)
    g = gram_matrix(op, left, right)
    if verify:
        scale = np.sqrt(left.upper_bound * right.upper_bound) * operator_norm(op)
        entrywise = gram_entrywise(op, left, right)
        if np.max(np.abs(entrywise - g), initial=0.0) > 1e-12 * max(scale, 1.0):
            raise TheoremViolation("entrywise and factorized Gram matrices disagree")
        if operator_norm(g) > scale * (1 + pol.equality_tolerance) + 1e-300:
            raise TheoremViolation("Gram norm exceeds sqrt(B_Phi B_Psi) ||U||")
    return CrossGram(g, op, left, right)


def adjoint(g):
    """``G_{U,Phi,Psi}* = G_{U*,Psi,Phi}``."""
    if not g.has_provenance:
        return CrossGram(herm(g.matrix))
    return CrossGram(herm(g.matrix), herm(g.op), g.right, g.left, g.rule)


def compose(g1, g2, pol=DEFAULT_POLICY, strict=False):
    """Product ``G_{U1,Phi,Psi} G_{U2,Theta,Xi} = G_{U1 T_Psi T_Theta* U2, Phi, Xi}``.

    The provenance operator is simplified to ``U1 S_Psi U2`` when the inner
    families coincide and to ``U1 U2`` when they are a dual pair.  Without
    provenance on both factors the plain product is returned, unless
    ``strict`` is set.
    """
    if g1.shape[1] != g2.shape[0]:
        raise DimensionError(f"cannot compose {g1.shape} with {g2.shape}")
    product = g1.matrix @ g2.matrix
    if not (g1.has_provenance and g2.has_provenance):
        if strict:
            raise PreconditionError("composition needs provenance on both factors")
        return CrossGram(product)
    inner_l, inner_r = g1.right, g2.left
    if inner_l.dim != inner_r.dim:
        raise DimensionError("inner families live in different spaces")
    if inner_l.matches(inner_r, pol):
        op, rule = g1.op @ inner_l.frame_operator @ g2.op, "same-frame"
    elif is_dual_pair(inner_l, inner_r, pol).verdict:
        op, rule = g1.op @ g2.op, "dual-pair"
    else:
        op, rule = g1.op @ inner_l.synthesis @ inner_r.analysis @ g2.op, "general"
    result = CrossGram(product, op, g1.left, g2.right, rule)
    check = gram_matrix(op, g1.left, g2.right)
    scale = operator_norm(g1.matrix) * operator_norm(g2.matrix)
    if operator_norm(check - product) > pol.equality_tolerance * max(scale, 1.0):
        raise TheoremViolation(f"composed provenance ({rule}) does not reproduce the product")
    return result


def reconstruct_operator(g, left_dual, right_dual, pol=DEFAULT_POLICY, left=None, right=None):
    """``U = T_{Phi^d} G T_{Psi^d}*`` for duals of the frames behind ``g``."""
    left = left if left is not None else g.left
    right = right if right is not None else g.right
    left_dual, right_dual = as_frame(left_dual), as_frame(right_dual)
    if left is None or right is None:
        raise PreconditionError("the primal frames are needed to verify the duals")
    for name, primal, dual in (("left", left, left_dual), ("right", right, right_dual)):
        cert = is_dual_pair(as_frame(primal), dual, pol)
        if not cert.verdict:
            raise PreconditionError(f"{name} dual fails duality (residual {cert.lhs:.3g})")
    return left_dual.synthesis @ g.matrix @ right_dual.analysis


@dataclass
class IdentityGramReport:
    is_identity: bool
    deviation: float
    clauses: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "is_identity": self.is_identity,
            "deviation": self.deviation,
            "clauses": self.clauses,
            "violations": self.violations,
        }


def identity_gram_diagnosis(op, left, right, pol=DEFAULT_POLICY):
    """Verify the consequences of ``G_{U,Phi,Psi} = I``.

    When ``G`` is the identity: both families are Riesz bases,
    ``Phi = S_Phi U Psi``, ``Psi = S_Psi U* Phi`` and
    ``U = T_{Phi~} T_{Psi~}*`` is invertible.
    """
    left, right = as_frame(left), as_frame(right)
    op = _operator(op, left, right)
    g = gram_matrix(op, left, right)
    if g.shape[0] != g.shape[1]:
        return IdentityGramReport(False, np.inf)
    deviation = operator_norm(g - np.eye(g.shape[0]))
    report = IdentityGramReport(deviation <= pol.equality_tolerance, deviation)
    if not report.is_identity:
        return report

    tl, tr = left.synthesis, right.synthesis
    scale = max(1.0, np.sqrt(max(left.upper_bound, right.upper_bound)))
    left_dual, right_dual = canonical_dual(left, pol), canonical_dual(right, pol)
    from_duals = left_dual.synthesis @ right_dual.analysis
    clauses = {
        "left_riesz_basis": classify(left, pol).is_riesz_basis,
        "right_riesz_basis": classify(right, pol).is_riesz_basis,
        "left_from_right": operator_norm(tl - left.frame_operator @ op @ tr)
        <= pol.equality_tolerance * scale**3,
        "right_from_left": operator_norm(tr - right.frame_operator @ herm(op) @ tl)
        <= pol.equality_tolerance * scale**3,
        "operator_from_duals": operator_norm(op - from_duals)
        <= pol.equality_tolerance * max(1.0, operator_norm(op)),
        "operator_invertible": is_invertible(op, pol),
    }
    report.clauses = clauses
    report.violations = [k for k, ok in clauses.items() if not ok]
    return report
