"""Approximate dual frames: defect, sufficient and necessary Gram conditions.

Two families are approximate duals when ``||I - T_Phi T_Psi*|| < 1``.  The
sufficient conditions compare ``||I - G_{Psi,Phi}||`` with thresholds
built from Bessel bounds of the families and of chosen exact duals; each
passing condition is followed by a measurement of the defect it promises.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, PreconditionError, TheoremViolation
from .certificate import Certificate
from .frames import FrameSystem, as_frame, canonical_dual, classify, is_dual_pair
from .numeric import DEFAULT_POLICY, as_matrix, herm, is_invertible, operator_norm, strictly_less

__all__ = [
    "ConditionCheck",
    "ApproxDualCertificate",
    "approx_dual_defect",
    "sufficient_conditions",
    "right_inverse_condition",
    "necessary_bound",
    "corrected_dual",
]


def _same_shape(a, b):
    if a.synthesis.shape != b.synthesis.shape:
        raise DimensionError(
            f"families differ in shape: {a.synthesis.shape} vs {b.synthesis.shape}"
        )


def approx_dual_defect(left, right):
    """``||I - T_Phi T_Psi*||``; the pair is approximately dual when this is < 1."""
    left, right = as_frame(left), as_frame(right)
    _same_shape(left, right)
    return operator_norm(np.eye(left.dim) - left.synthesis @ right.analysis)


@dataclass
class ConditionCheck:
    """One sufficient condition: ``lhs < threshold`` and what it then entails.

    ``implied`` names the pair whose defect is promised below one,
    ``implied_defect`` is that defect as measured.
    """

    name: str
    lhs: float
    threshold: float
    verdict: bool
    orientation: str
    implied: str
    implied_defect: float

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class ApproxDualCertificate:
    defect: float
    conditions: list = field(default_factory=list)
    conclusion: bool = False
    dual_conclusion: bool = False
    quantities: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def status(self):
        if self.violations:
            return "violated"
        return "pass" if self.conclusion or self.dual_conclusion else "inconclusive"

    def to_dict(self):
        out = dict(self.__dict__)
        out["conditions"] = [c.to_dict() for c in self.conditions]
        out["status"] = self.status
        return out


def _verified_dual(primal, dual, name, pol):
    if dual is None:
        return canonical_dual(primal, pol)
    dual = as_frame(dual)
    cert = is_dual_pair(primal, dual, pol)
    if not cert.verdict:
        raise PreconditionError(f"{name} is not a dual of its family (residual {cert.lhs:.3g})")
    return dual


def _record(cert, check):
    cert.conditions.append(check)
    if check.verdict and not check.implied_defect < 1:
        cert.violations.append(
            f"{check.name} ({check.orientation}) passed but defect is {check.implied_defect:.6g}"
        )


def sufficient_conditions(left, right, left_dual=None, right_dual=None, pol=DEFAULT_POLICY):
    """Evaluate the three Gram conditions for approximate duality.

    With ``D = ||I - G_{Phi,Psi}||`` (equal to ``||I - G_{Psi,Phi}||``):

    * ``(1)``: ``D < 1/sqrt(B_Phi B_Phid)`` gives ``||I - T_Phi T_Psi*|| < 1``;
    * ``(2)``: ``D < 1/sqrt(B_Phid B_Psid)`` gives ``||I - T_Phid T_Psid*|| < 1``;
    * ``(3)``: ``D < 1/sqrt(B_Phi B_Phid)`` gives ``||I - T_Psi T_Phi*|| < 1``.

    Each is evaluated as stated and with the roles of the two families
    swapped, and both orientations are reported.  Missing duals default to
    the canonical ones.

    Raises
    ------
    PreconditionError
        If a supplied dual fails the duality check or a family is not a frame.
    """
    left, right = as_frame(left), as_frame(right)
    _same_shape(left, right)
    for name, fam in (("left", left), ("right", right)):
        if not classify(fam, pol).is_frame:
            raise PreconditionError(f"{name} family is not a frame")
    ld = _verified_dual(left, left_dual, "left dual", pol)
    rd = _verified_dual(right, right_dual, "right dual", pol)

    m = left.count
    lhs = operator_norm(np.eye(m) - left.analysis @ right.synthesis)
    b = {"phi": left.upper_bound, "psi": right.upper_bound, "phid": ld.upper_bound, "psid": rd.upper_bound}
    defect = approx_dual_defect(left, right)
    dual_defect = approx_dual_defect(ld, rd)
    cert = ApproxDualCertificate(defect=defect, quantities={"gram_defect": lhs, "bounds": b, "dual_defect": dual_defect})

    def thr(x, y):
        return 1.0 / np.sqrt(x * y) if x * y > 0 else np.inf

    for orientation, (p, pd, sd) in {
        "stated": ("phi", "phid", "psid"),
        "swapped": ("psi", "psid", "phid"),
    }.items():
        _record(cert, ConditionCheck("(1)", lhs, thr(b[p], b[pd]), strictly_less(lhs, thr(b[p], b[pd])), orientation, "primal", defect))
        _record(cert, ConditionCheck("(2)", lhs, thr(b[pd], b[sd]), strictly_less(lhs, thr(b[pd], b[sd])), orientation, "duals", dual_defect))
        _record(cert, ConditionCheck("(3)", lhs, thr(b[p], b[pd]), strictly_less(lhs, thr(b[p], b[pd])), orientation, "primal", defect))
    cert.conclusion = any(c.verdict and c.implied == "primal" for c in cert.conditions)
    cert.dual_conclusion = any(c.verdict and c.implied == "duals" for c in cert.conditions)
    return cert


def right_inverse_condition(op, inverse, left, right, left_dual=None, pol=DEFAULT_POLICY):
    """Condition through a right inverse ``V`` of ``U`` (``U V = I``).

    The lhs is ``||I - G_{U,Psi,Phi} G_{V,Phid,Phi}||``.  With ``UV = I`` the
    product collapses to ``G_{Psi,Phi}``; that identity is verified and
    recorded as ``composite_residual``.  The variant ``G_{U Psi, Phi}`` (which
    needs ``U* V = I``) is recorded as ``image_form_residual`` for reference.
    """
    left, right = as_frame(left), as_frame(right)
    _same_shape(left, right)
    u, v = as_matrix(op, "U"), as_matrix(inverse, "V")
    n = left.dim
    if u.shape != (n, n) or v.shape != (n, n):
        raise DimensionError(f"U and V must both be {n} x {n}")
    if operator_norm(u @ v - np.eye(n)) > pol.equality_tolerance * max(1.0, operator_norm(u) * operator_norm(v)):
        raise PreconditionError("V is not a right inverse of U")
    ld = _verified_dual(left, left_dual, "left dual", pol)

    g_upp = right.analysis @ u @ left.synthesis
    g_vdp = ld.analysis @ v @ left.synthesis
    product = g_upp @ g_vdp
    g_pp = right.analysis @ left.synthesis
    scale = max(1.0, operator_norm(g_pp))
    composite = operator_norm(product - g_pp) / scale
    image_form = right.analysis @ herm(u) @ left.synthesis @ g_vdp
    lhs = operator_norm(np.eye(left.count) - product)
    thr = 1.0 / np.sqrt(left.upper_bound * ld.upper_bound)
    defect = approx_dual_defect(left, right)
    check = ConditionCheck("(4)", lhs, thr, strictly_less(lhs, thr), "stated", "primal", defect)
    cert = ApproxDualCertificate(
        defect=defect,
        quantities={
            "composite_residual": composite,
            "image_form_residual": operator_norm(image_form - g_pp) / scale,
        },
    )
    _record(cert, check)
    cond = np.linalg.cond(u) * np.linalg.cond(v) if is_invertible(u, pol) else 1.0
    if composite > pol.allowance(cond * max(1.0, left.upper_bound * ld.upper_bound)):
        cert.violations.append("G_{U,Psi,Phi} G_{V,Phid,Phi} != G_{Psi,Phi}")
    cert.conclusion = check.verdict
    return cert


def necessary_bound(left, right, pol=DEFAULT_POLICY):
    """``||I - G_{Phi,Psi}|| < sqrt(B_Phi B_Psi / (A_Phi A_Psi))`` for Riesz-basis approximate duals.

    Raises
    ------
    PreconditionError
        When the pair is not approximately dual or a family is not a Riesz
        basis (the lemma is then inapplicable).
    """
    left, right = as_frame(left), as_frame(right)
    defect = approx_dual_defect(left, right)
    if not defect < 1:
        raise PreconditionError(f"lemma inapplicable: defect {defect:.6g} is not below 1")
    cl, cr = classify(left, pol), classify(right, pol)
    if not (cl.is_riesz_basis and cr.is_riesz_basis):
        raise PreconditionError("lemma inapplicable: both families must be Riesz bases")
    lhs = operator_norm(np.eye(left.count) - left.analysis @ right.synthesis)
    thr = float(np.sqrt(cl.upper * cr.upper / (cl.lower * cr.lower)))
    ok = lhs < thr
    return Certificate(
        name="necessary-bound",
        verdict=True,
        lhs=lhs,
        threshold=thr,
        conclusion="||I - G_{Phi,Psi}|| < sqrt(B_Phi B_Psi / (A_Phi A_Psi))",
        quantities={"defect": defect},
        violations=[] if ok else ["necessary bound fails for an approximate dual pair"],
    )


def corrected_dual(left, right, pol=DEFAULT_POLICY):
    """The exact dual ``(T_Psi T_Phi*)^-1 Psi`` of ``Phi`` built from an approximate dual.

    Raises
    ------
    PreconditionError
        If the defect is not below one or ``T_Psi T_Phi*`` is numerically singular.
    TheoremViolation
        If the result fails the duality check.
    """
    left, right = as_frame(left), as_frame(right)
    defect = approx_dual_defect(left, right)
    if not defect < 1:
        raise PreconditionError(f"not approximate duals: defect {defect:.6g} >= 1")
    mixed = right.synthesis @ left.analysis
    if not is_invertible(mixed, pol):
        raise PreconditionError("T_Psi T_Phi* is numerically singular")
    dual = FrameSystem(np.linalg.solve(mixed, right.synthesis))
    residual = operator_norm(left.synthesis @ dual.analysis - np.eye(left.dim))
    if residual > pol.allowance(np.linalg.cond(mixed) * max(1.0, left.upper_bound)):
        raise TheoremViolation(f"corrected dual fails duality (residual {residual:.3g})", residual)
    return dual
