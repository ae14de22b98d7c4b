"""Inverses and pseudo-inverses of cross Gram matrices through dual frames.

The central facts checked here:

* an invertible ``G_{U,Phi,Psi}`` forces both families to be Riesz
  sequences, and for spanning families ``G^-1 = G_{U^-1, Psi~, Phi~}``;
* for invertible ``U`` and frames, ``G^+ = G_{U^-1, Psi~, Phi^(U,Psi)}``
  with the special dual ``Phi^(U,Psi) = {U T_Psi G^+ delta_i}``;
* for general ``U`` the same representation with ``U^+`` holds exactly
  when ``ran U* = S_Psi ran U*`` (mirrored on the other side).

Every report carries the residuals it measured; a residual that contradicts
a guaranteed identity raises :class:`TheoremViolation` or lands in the
report's ``violations`` list.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, PreconditionError, TheoremViolation
from .frames import FrameSystem, as_frame, canonical_dual, classify
from .gram import _operator, gram_matrix
from .numeric import (
    DEFAULT_POLICY,
    herm,
    is_invertible,
    kernel_equal,
    operator_norm,
    range_equal,
    range_projector,
    rank_is_reliable,
    svd,
)

__all__ = [
    "InversionReport",
    "OneSidedReport",
    "SpecialDual",
    "PinvReport",
    "ImageFrameReport",
    "TildeReport",
    "TransportedReport",
    "RangeWitnessReport",
    "invert_gram",
    "one_sided_diagnosis",
    "special_dual",
    "pinv_gram",
    "range_condition",
    "image_frame_inverse",
    "pinv_via_tilde",
    "pinv_transported",
    "gram_range_witness",
]

PHI, PSI = "phi", "psi"


def _setup(op, left, right):
    left, right = as_frame(left), as_frame(right)
    return _operator(op, left, right), left, right


def _rel(a, b):
    """Relative operator-norm distance ``||a - b|| / max(||b||, tiny)``."""
    scale = operator_norm(b)
    return operator_norm(a - b) / scale if scale > 0 else operator_norm(a)


def _effective_condition(sigma, pol):
    r = pol.rank_of(sigma)
    return float(sigma[0] / sigma[r - 1]) if r else 1.0


def _require_frames(pol, **families):
    for name, fam in families.items():
        if not classify(fam, pol).is_frame:
            raise PreconditionError(f"{name} family is not a frame (it does not span)")


def _sigma_min_synthesis(frame):
    """Lower Riesz witness: ``inf ||T c|| / ||c||`` over all coefficients."""
    if frame.count > frame.dim or frame.count == 0:
        return 0.0
    return float(frame.singular_values[-1])


def _dict(obj):
    return {k: v for k, v in obj.__dict__.items()}


@dataclass
class InversionReport:
    invertible: bool
    condition: float
    inverse: np.ndarray | None = None
    inverse_residual: float | None = None
    left_riesz: bool = False
    right_riesz: bool = False
    left_spanning: bool = False
    right_spanning: bool = False
    operator_invertible: bool | None = None
    sigma_min_left: float = 0.0
    sigma_min_right: float = 0.0
    lower_bound_left: float | None = None
    lower_bound_right: float | None = None
    violations: list = field(default_factory=list)

    def to_dict(self):
        return _dict(self)


def invert_gram(op, left, right, pol=DEFAULT_POLICY):
    """Invert a square ``G_{U,Phi,Psi}`` and check what invertibility entails.

    For invertible ``G``: both families must be Riesz sequences with
    ``sigma_min(T_Phi) >= 1 / (sqrt(B_Psi) ||G^-1|| ||U||)`` (and the mirror
    bound for ``Psi``).  When both families also span, ``U`` must be
    invertible and ``G^-1 = G_{U^-1, Psi~, Phi~}``.
    """
    op, left, right = _setup(op, left, right)
    if left.count != right.count:
        raise DimensionError(f"G is {left.count} x {right.count}, not square")
    g = gram_matrix(op, left, right)
    f = svd(g, pol)
    sigma = f.singular_values
    cond = float(sigma[0] / sigma[-1]) if len(sigma) and sigma[-1] > 0 else np.inf
    cl, cr = classify(left, pol), classify(right, pol)
    report = InversionReport(
        invertible=is_invertible(g, pol),
        condition=cond if len(sigma) else 1.0,
        left_riesz=cl.is_riesz_sequence,
        right_riesz=cr.is_riesz_sequence,
        left_spanning=cl.spanning,
        right_spanning=cr.spanning,
        sigma_min_left=_sigma_min_synthesis(left),
        sigma_min_right=_sigma_min_synthesis(right),
    )
    if not report.invertible or g.shape[0] == 0:
        return report

    ginv = f.pseudo_inverse()
    report.inverse = ginv
    ginv_norm = 1.0 / sigma[-1]
    u_norm = operator_norm(op)
    slack = 1 - pol.allowance(cond)
    report.lower_bound_left = float(1.0 / (np.sqrt(right.upper_bound) * ginv_norm * u_norm))
    report.lower_bound_right = float(1.0 / (np.sqrt(left.upper_bound) * ginv_norm * u_norm))
    if not report.left_riesz:
        report.violations.append("left family is not a Riesz sequence")
    if not report.right_riesz:
        report.violations.append("right family is not a Riesz sequence")
    if report.sigma_min_left < report.lower_bound_left * slack:
        report.violations.append("sigma_min(T_Phi) below the guaranteed lower bound")
    if report.sigma_min_right < report.lower_bound_right * slack:
        report.violations.append("sigma_min(T_Psi) below the guaranteed lower bound")

    if cl.spanning and cr.spanning:
        report.operator_invertible = is_invertible(op, pol)
        if not report.operator_invertible:
            report.violations.append("both families span but U is not invertible")
        else:
            formula = gram_matrix(
                np.linalg.inv(op), canonical_dual(right, pol), canonical_dual(left, pol)
            )
            report.inverse_residual = _rel(formula, ginv)
            if report.inverse_residual > pol.allowance(cond * np.linalg.cond(op)):
                report.violations.append("G^-1 differs from G_{U^-1, Psi~, Phi~}")
    return report


@dataclass
class OneSidedReport:
    right_invertible: bool
    left_invertible: bool
    rank: int
    clauses: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return _dict(self)


def one_sided_diagnosis(op, left, right, pol=DEFAULT_POLICY):
    """Consequences of a right (surjective) or left (injective) inverse of ``G``.

    A right inverse makes ``Phi`` and ``U* Phi`` Riesz sequences, and if
    ``Phi`` spans, ``Phi`` is a Riesz basis and ``U Psi`` a frame.  A left
    inverse gives the mirrored statements for ``Psi`` and ``U Psi``.
    """
    op, left, right = _setup(op, left, right)
    g = gram_matrix(op, left, right)
    f = svd(g, pol)
    rank = pol.rank_of(f.singular_values)
    rows, cols = g.shape
    right_inv = rank > 0 and rank == rows
    left_inv = rank > 0 and rank == cols
    clauses = {}
    if right_inv:
        clauses["left_riesz_sequence"] = classify(left, pol).is_riesz_sequence
        clauses["adjoint_image_left_riesz_sequence"] = classify(
            left.mapped(herm(op)), pol
        ).is_riesz_sequence
        if classify(left, pol).spanning:
            clauses["left_riesz_basis"] = classify(left, pol).is_riesz_basis
            clauses["image_right_frame"] = classify(right.mapped(op), pol).is_frame
    if left_inv:
        clauses["right_riesz_sequence"] = classify(right, pol).is_riesz_sequence
        clauses["image_right_riesz_sequence"] = classify(
            right.mapped(op), pol
        ).is_riesz_sequence
        if classify(right, pol).spanning:
            clauses["right_riesz_basis"] = classify(right, pol).is_riesz_basis
            clauses["adjoint_image_left_frame"] = classify(left.mapped(herm(op)), pol).is_frame
    violations = [k for k, ok in clauses.items() if not ok]
    return OneSidedReport(right_inv, left_inv, rank, clauses, violations)


@dataclass
class SpecialDual:
    """A special dual together with the data that certifies it."""

    frame: FrameSystem
    side: str
    pinv: np.ndarray
    projector: np.ndarray
    residual: float
    kernel_match: bool
    rank_reliable: bool

    def to_dict(self):
        return {
            "frame": self.frame,
            "side": self.side,
            "pinv": self.pinv,
            "residual": self.residual,
            "kernel_match": self.kernel_match,
            "rank_reliable": self.rank_reliable,
        }


def _special(op, left, right, side, gpinv, pol):
    if side == PHI:
        synth = op @ right.synthesis @ gpinv
        primal = left
        proj = range_projector(op, pol)
        kernel_ref = herm(op) @ left.synthesis
    else:
        synth = herm(op) @ left.synthesis @ herm(gpinv)
        primal = right
        proj = range_projector(herm(op), pol)
        kernel_ref = op @ right.synthesis
    return synth, primal, proj, kernel_ref


def special_dual(op, left, right, side=PHI, pol=DEFAULT_POLICY):
    """The special dual ``{U T_Psi G^+ delta_i}`` (phi side) or ``{U* T_Phi (G^+)* delta_i}``.

    The result is a dual of the primal family on ``ran U`` (phi side) or
    ``ran U*`` (psi side), which is the whole space when ``U`` is
    invertible.  Duality is measured as ``||(T_dual T_primal* - I) P||``
    with ``P`` the range projector, and ``ker T_dual`` is compared with
    ``ker U* T_Phi`` (``ker U T_Psi`` on the psi side).

    Raises
    ------
    TheoremViolation
        If the duality residual or the kernel identity fails.
    """
    if side not in (PHI, PSI):
        raise ValueError(f"side must be 'phi' or 'psi', got {side!r}")
    op, left, right = _setup(op, left, right)
    _require_frames(pol, left=left, right=right)
    g = gram_matrix(op, left, right)
    f = svd(g, pol)
    gpinv = f.pseudo_inverse()
    synth, primal, proj, kernel_ref = _special(op, left, right, side, gpinv, pol)
    cond = _effective_condition(f.singular_values, pol)
    defect = (synth @ primal.analysis - np.eye(primal.dim)) @ proj
    residual = operator_norm(defect)
    kernel_match = kernel_equal(synth, kernel_ref, pol) if synth.size else True
    result = SpecialDual(
        FrameSystem(synth),
        side,
        gpinv,
        proj,
        residual,
        kernel_match,
        rank_is_reliable(f.singular_values, pol),
    )
    if residual > pol.allowance(cond * max(1.0, primal.upper_bound)):
        raise TheoremViolation(
            f"{side}-side special dual fails duality on the range (residual {residual:.3g})",
            residual,
        )
    if not kernel_match:
        raise TheoremViolation(f"{side}-side special dual has the wrong kernel")
    return result


def range_condition(op, frame, side, pol=DEFAULT_POLICY):
    """``ran U* = S_Psi ran U*`` (side ``"psi"``) or ``ran U = S_Phi ran U`` (``"phi"``)."""
    frame = as_frame(frame)
    op = np.asarray(op, dtype=complex)
    if side == PSI:
        a = herm(op)
    elif side == PHI:
        a = op
    else:
        raise ValueError(f"side must be 'phi' or 'psi', got {side!r}")
    if a.shape[0] != frame.dim:
        raise DimensionError(f"frame lives in C^{frame.dim}, the range in C^{a.shape[0]}")
    return range_equal(a, frame.frame_operator @ a, pol)


@dataclass
class PinvReport:
    """Pseudo-inverse of ``G`` and every representation that was tested.

    ``residuals[name]`` is the relative distance between ``G^+`` and the
    representation; ``guaranteed[name]`` says whether theory promises it;
    ``holds[name]`` whether it was observed.
    """

    pinv: np.ndarray
    op_invertible: bool
    op_pinv: np.ndarray
    range_condition_psi: bool
    range_condition_phi: bool
    residuals: dict = field(default_factory=dict)
    holds: dict = field(default_factory=dict)
    guaranteed: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)
    triple_product_residual: float = 0.0
    rank_reliable: bool = True
    special_duals: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return _dict(self)


def pinv_gram(op, left, right, pol=DEFAULT_POLICY):
    """Pseudo-inverse of ``G_{U,Phi,Psi}`` and its cross Gram representations.

    Tested representations (``~`` is the canonical dual):

    ``inverse_phi`` / ``inverse_psi`` (invertible ``U`` only)
        ``G_{U^-1, Psi~, Phi^(U,Psi)}`` and ``G_{U^-1, Psi-bar, Phi~}``.
    ``pseudo_phi_special`` / ``pseudo_phi_canonical``
        ``G_{U^+, Psi~, Phi^(U,Psi)}`` and ``G_{U^+, Psi~, (UU^+Phi)~}``;
        these hold exactly when ``ran U* = S_Psi ran U*``.
    ``pseudo_psi_special`` / ``pseudo_psi_canonical``
        ``G_{U^+, Psi-bar, Phi~}`` and ``G_{U^+, (U^+U Psi)~, Phi~}``;
        these hold exactly when ``ran U = S_Phi ran U``.

    Here ``Psi-bar`` is the psi-side special dual.  Kernel and range
    identities for ``G^+`` and the triple product ``G G_{U^+,Psi~,Phi~} G = G``
    are verified too.

    Raises
    ------
    TheoremViolation
        When a representation that theory guarantees fails.
    """
    op, left, right = _setup(op, left, right)
    _require_frames(pol, left=left, right=right)
    g = gram_matrix(op, left, right)
    fg = svd(g, pol)
    gpinv = fg.pseudo_inverse()
    fu = svd(op, pol)
    upinv = fu.pseudo_inverse()
    op_inv = is_invertible(op, pol)
    cond_g = _effective_condition(fg.singular_values, pol)
    cond_u = _effective_condition(fu.singular_values, pol)
    tol = pol.allowance(cond_g * cond_u * max(1.0, left.upper_bound, right.upper_bound))

    cond_psi = range_condition(op, right, PSI, pol)
    cond_phi = range_condition(op, left, PHI, pol)
    rep = PinvReport(
        pinv=gpinv,
        op_invertible=op_inv,
        op_pinv=upinv,
        range_condition_psi=cond_psi,
        range_condition_phi=cond_phi,
        rank_reliable=rank_is_reliable(fg.singular_values, pol)
        and rank_is_reliable(fu.singular_values, pol),
    )
    if not rep.rank_reliable:
        rep.notes.append("closed-range unreliable: singular values near the rank cutoff")

    left_dual = canonical_dual(left, pol)
    right_dual = canonical_dual(right, pol)
    phi_sd = op @ right.synthesis @ gpinv
    psi_sd = herm(op) @ left.synthesis @ herm(gpinv)
    rep.special_duals = {PHI: FrameSystem(phi_sd), PSI: FrameSystem(psi_sd)}

    candidates = {}
    if op_inv:
        uinv = np.linalg.inv(op)
        candidates["inverse_phi"] = (herm(right_dual.synthesis) @ uinv @ phi_sd, True)
        candidates["inverse_psi"] = (herm(psi_sd) @ uinv @ left_dual.synthesis, True)
    image_left = left.mapped(op @ upinv)
    image_right = right.mapped(upinv @ op)
    if pol.rank_of(image_left.singular_values):
        projected_left = canonical_dual(image_left, pol).synthesis
    else:
        projected_left = np.zeros_like(left.synthesis)
    if pol.rank_of(image_right.singular_values):
        projected_right = canonical_dual(image_right, pol).synthesis
    else:
        projected_right = np.zeros_like(right.synthesis)
    rd = herm(right_dual.synthesis)
    candidates["pseudo_phi_special"] = (rd @ upinv @ phi_sd, cond_psi)
    candidates["pseudo_phi_canonical"] = (rd @ upinv @ projected_left, cond_psi)
    candidates["pseudo_psi_special"] = (herm(psi_sd) @ upinv @ left_dual.synthesis, cond_phi)
    candidates["pseudo_psi_canonical"] = (
        herm(projected_right) @ upinv @ left_dual.synthesis,
        cond_phi,
    )

    for name, (mat, promised) in candidates.items():
        res = _rel(mat, gpinv)
        rep.residuals[name] = res
        rep.guaranteed[name] = bool(promised)
        rep.holds[name] = res <= tol
        if promised and not rep.holds[name]:
            raise TheoremViolation(f"representation {name} fails (residual {res:.3g})", res)
        if not promised and rep.holds[name]:
            rep.violations.append(f"{name} holds although its range condition fails")
        if not promised:
            rep.notes.append(f"{name}: representation not guaranteed (range condition false)")

    # kernel and range of G^+
    subspaces = {
        "kernel_general": range_equal(herm(gpinv), herm(left.synthesis) @ op, pol),
        "range_general": range_equal(gpinv, herm(right.synthesis) @ herm(op), pol),
    }
    if op_inv:
        subspaces["kernel_invertible"] = range_equal(herm(gpinv), herm(left.synthesis), pol)
        subspaces["range_invertible"] = range_equal(gpinv, herm(right.synthesis), pol)
    rep.subspaces = subspaces
    rep.violations += [f"subspace identity {k} fails" for k, ok in subspaces.items() if not ok]

    middle = rd @ upinv @ left_dual.synthesis
    rep.triple_product_residual = _rel(g @ middle @ g, g) if g.any() else 0.0
    if rep.triple_product_residual > tol:
        rep.violations.append("G G_{U^+,Psi~,Phi~} G != G")
    return rep


@dataclass
class ImageFrameReport:
    formula: np.ndarray
    inverse: np.ndarray
    residual: float
    applicable: bool
    formula_matches: bool
    bounds: tuple | None
    bound_limits: tuple | None
    violations: list = field(default_factory=list)

    def to_dict(self):
        return _dict(self)


def image_frame_inverse(op, frame, pol=DEFAULT_POLICY):
    """Inverse of the frame operator of the image family ``U Psi`` on ``ran U``.

    Returns the report of ``X = U*^+ S_Psi^-1 U^+`` against the true
    ``S_{U Psi}^+``.  ``X`` inverts ``S_{U Psi}`` on ``ran U`` whenever ``U``
    is injective or ``S_Psi`` leaves ``ran U*`` invariant; in those cases a
    mismatch raises :class:`TheoremViolation`.  Outside them ``X`` is only
    reported and ``inverse`` holds the true pseudo-inverse.  The optimal
    bounds of ``U Psi`` are checked against ``[m A_Psi, M B_Psi]`` with
    ``m`` the smallest nonzero and ``M`` the largest squared singular value
    of ``U``.
    """
    frame = as_frame(frame)
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[1] != frame.dim:
        raise DimensionError(f"operator must act on C^{frame.dim}")
    cls = classify(frame, pol)
    if not cls.is_frame:
        raise PreconditionError("the family is not a frame")
    fu = svd(op, pol)
    upinv = fu.pseudo_inverse()
    sinv = np.linalg.inv(frame.frame_operator)
    formula = herm(upinv) @ sinv @ upinv
    image = frame.mapped(op)
    s_image = image.frame_operator
    inverse = svd(s_image, pol).pseudo_inverse()
    proj = range_projector(op, pol)
    residual = operator_norm(formula @ s_image @ proj - proj)
    rank = fu.rank
    applicable = rank == op.shape[1] or range_condition(op, frame, PSI, pol)
    cond = _effective_condition(fu.singular_values, pol) ** 2 * (cls.upper / cls.lower)
    matches = residual <= pol.allowance(cond)
    report = ImageFrameReport(formula, inverse, residual, applicable, matches, None, None)
    if applicable and not matches:
        raise TheoremViolation(f"U*^+ S^-1 U^+ does not invert S_(U Psi) on ran U ({residual:.3g})")
    if rank:
        lo, hi = cls.lower, cls.upper
        m, big = float(fu.singular_values[rank - 1] ** 2), float(fu.singular_values[0] ** 2)
        s = image.singular_values
        r = pol.rank_of(s)
        bounds = (float(s[r - 1] ** 2), float(s[0] ** 2))
        limits = (m * lo, big * hi)
        report.bounds, report.bound_limits = bounds, limits
        eps = pol.allowance(cond)
        if bounds[0] < limits[0] * (1 - eps) or bounds[1] > limits[1] * (1 + eps):
            report.violations.append("frame bounds of U Psi outside [m A, M B]")
    return report


@dataclass
class TildeReport:
    candidate: np.ndarray
    pinv: np.ndarray
    residual: float
    equals_pinv: bool
    stated_condition: bool
    exact_condition: bool
    violations: list = field(default_factory=list)

    def to_dict(self):
        return _dict(self)


def pinv_via_tilde(op, left, right, pol=DEFAULT_POLICY):
    """Test ``G^+ = T_{(U Psi)~}* T_{Phi~}``.

    ``stated_condition`` is ``ran T_Phi* = ran T_Phi* U``.  It is sufficient
    for the identity but not necessary.  ``exact_condition`` is
    ``S_Phi ran U`` contained in ``ran U``, and the identity holds if and
    only if it does.  The right family must span.  The left family must
    span or have exactly ``ran U`` as its span.  The sufficient direction of
    the stated condition and both directions of the exact one are asserted;
    failures are listed in ``violations``.
    """
    op, left, right = _setup(op, left, right)
    _require_frames(pol, right=right)
    proj = range_projector(op, pol)
    cl = classify(left, pol)
    if not cl.spanning and not range_equal(left.synthesis, op, pol):
        raise PreconditionError("left family must span the space or exactly ran U")
    g = gram_matrix(op, left, right)
    fg = svd(g, pol)
    gpinv = fg.pseudo_inverse()
    image = right.mapped(op)
    if pol.rank_of(image.singular_values) == 0:
        candidate = np.zeros_like(herm(g))
    else:
        candidate = herm(canonical_dual(image, pol).synthesis) @ canonical_dual(left, pol).synthesis
    residual = _rel(candidate, gpinv)
    cond = _effective_condition(fg.singular_values, pol) * max(
        1.0, cl.upper / cl.lower if cl.lower else 1.0
    )
    equal = residual <= pol.allowance(cond)
    stated = range_equal(herm(left.synthesis), herm(left.synthesis) @ op, pol)
    moved = left.frame_operator @ op
    scale = operator_norm(moved)
    exact = scale == 0 or operator_norm(moved - proj @ moved) <= pol.equality_tolerance * scale
    rep = TildeReport(candidate, gpinv, residual, equal, stated, exact)
    if stated and not equal:
        rep.violations.append("stated range condition holds but the candidate is not G^+")
    if exact != equal:
        rep.violations.append("candidate = G^+ disagrees with the invariance criterion")
    return rep


@dataclass
class TransportedReport:
    gram: np.ndarray
    pinv: np.ndarray
    formula: np.ndarray
    residual: float
    rank: int
    ambient_gram_residual: float
    ambient_formula_residual: float

    def to_dict(self):
        return _dict(self)


def pinv_transported(op, left, right, pol=DEFAULT_POLICY):
    """Pseudo-inverse of the Gram matrix of the restricted operator.

    ``U_1`` is ``U`` restricted to ``(ker U)^perp -> ran U``, written in the
    singular-vector bases, so it is the invertible ``diag(sigma_1..sigma_r)``.
    The families are projected onto those coordinates and
    ``G_{U_1, U_1 Phi, U_1* Psi}^+ = G_{(U_1* U_1 U_1*)^-1, Psi~, Phi~}`` is
    asserted with canonical duals of the projected families.

    The report also records how far the same formula with the ambient
    canonical duals is from ``G^+`` (informational only).
    """
    op, left, right = _setup(op, left, right)
    _require_frames(pol, left=left, right=right)
    f = svd(op, pol)
    r = f.rank
    w, v, s = f.left[:, :r], f.right[:, :r], f.singular_values[:r]
    p_left = herm(v) @ left.synthesis  # Phi in (ker U)^perp coordinates
    q_right = herm(w) @ right.synthesis  # Psi in ran U coordinates
    g = herm(p_left) @ ((s**3)[:, None] * q_right)
    fg = svd(g, pol)
    gpinv = fg.pseudo_inverse()
    if r == 0:
        formula = np.zeros_like(gpinv)
    else:
        pd = herm(svd(p_left, pol).pseudo_inverse())
        qd = herm(svd(q_right, pol).pseudo_inverse())
        formula = herm(qd) @ ((1.0 / s**3)[:, None] * pd)
    residual = _rel(formula, gpinv) if gpinv.any() else operator_norm(formula)
    ambient = herm(left.synthesis) @ herm(op) @ op @ herm(op) @ right.synthesis
    ambient_res = _rel(ambient, g) if g.any() else operator_norm(ambient)
    ambient_formula = (
        herm(canonical_dual(right, pol).synthesis)
        @ svd(herm(op) @ op @ herm(op), pol).pseudo_inverse()
        @ canonical_dual(left, pol).synthesis
    )
    ambient_formula_res = _rel(ambient_formula, gpinv) if gpinv.any() else 0.0
    cond = _effective_condition(fg.singular_values, pol)
    if residual > pol.allowance(cond):
        raise TheoremViolation(f"transported pseudo-inverse formula fails ({residual:.3g})", residual)
    return TransportedReport(g, gpinv, formula, residual, r, ambient_res, ambient_formula_res)


@dataclass
class RangeWitnessReport:
    rank: int
    range_matches: bool | None
    factorization_residuals: dict
    violations: list = field(default_factory=list)

    def to_dict(self):
        return _dict(self)


def gram_range_witness(op, left, right, pol=DEFAULT_POLICY):
    """``ran G = ran T_{U* Phi}*`` (for spanning ``Psi``) and two factorizations.

    ``G = T_{UU^+ Phi}* T_{U Psi}`` and ``G = T_{U* Phi}* T_{U^+ U Psi}`` hold
    for every ``U``.
    """
    op, left, right = _setup(op, left, right)
    g = gram_matrix(op, left, right)
    upinv = svd(op, pol).pseudo_inverse()
    rank = pol.rank_of(svd(g, pol).singular_values)
    matches = None
    if classify(right, pol).is_frame:
        matches = range_equal(g, herm(left.synthesis) @ op, pol)
    f1 = herm(op @ upinv @ left.synthesis) @ (op @ right.synthesis)
    f2 = herm(herm(op) @ left.synthesis) @ (upinv @ op @ right.synthesis)
    scale = max(operator_norm(g), 1e-300)
    residuals = {
        "projected_left": operator_norm(f1 - g) / scale if g.any() else operator_norm(f1),
        "projected_right": operator_norm(f2 - g) / scale if g.any() else operator_norm(f2),
    }
    cond = _effective_condition(svd(op, pol).singular_values, pol)
    violations = [k for k, v in residuals.items() if v > pol.allowance(cond)]
    if matches is False:
        violations.append("ran G differs from ran T_(U* Phi)*")
    return RangeWitnessReport(rank, matches, residuals, violations)
