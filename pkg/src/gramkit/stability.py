"""Perturbation certificates for invertible cross Gram matrices.

Each certificate compares a perturbation size (``lhs``) with a threshold
built from ``||G^-1||`` and Bessel bounds.  A strict ``lhs < threshold``
(with a relative guard band) entitles the conclusion that the perturbed
Gram matrix is invertible; the certificate then carries ``sigma_min`` of
that matrix as a witness and a Neumann-series inverse with its truncation
bound.  A failed bound is "inconclusive", never a claim of singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certificate import Certificate
from .exceptions import ConvergenceError, DimensionError, PreconditionError
from .frames import FrameSystem, as_frame, canonical_dual, classify, frame_bounds
from .numeric import (
    DEFAULT_POLICY,
    as_matrix,
    herm,
    is_invertible,
    operator_norm,
    singular_values,
    strictly_less,
)

__all__ = [
    "NeumannResult",
    "neumann_inverse",
    "neumann_partial",
    "StabilityBudget",
    "stability_three_ops",
    "stability_factor",
    "perturb_certificates",
    "riesz_perturbation",
    "joint_stability",
    "ConvergenceTable",
    "convergence_harness",
]

MAX_TERMS = 10_000
GUARD = 1e-9


@dataclass
class NeumannResult:
    """Partial sum ``sum_{k<terms} X^k U1^-1`` with ``X = U1^-1 (U1 - U2)``.

    ``error_bound`` is ``r^terms / (1 - r) ||U1^-1||``, a bound on the
    distance to the exact inverse of ``U2``.  ``truncated`` is set when the
    term cap stopped the series before the requested accuracy.
    """

    inverse: np.ndarray
    terms: int
    ratio: float
    error_bound: float
    residual: float
    truncated: bool = False

    def to_dict(self):
        return dict(self.__dict__)


def _neumann_setup(u1, u2, pol, sigma=None):
    u1, u2 = as_matrix(u1, "U1"), as_matrix(u2, "U2")
    if u1.shape != u2.shape or u1.shape[0] != u1.shape[1]:
        raise DimensionError(f"U1 {u1.shape} and U2 {u2.shape} must be square of equal size")
    sigma = singular_values(u1) if sigma is None else sigma
    if len(sigma) and not (pol.rank_of(sigma) == len(sigma) and sigma[0] / sigma[-1] <= pol.condition_limit):
        raise PreconditionError("U1 is not invertible")
    u1inv = np.linalg.inv(u1)
    inv_norm = 1.0 / float(sigma[-1]) if len(sigma) else 0.0
    ratio = inv_norm * operator_norm(u1 - u2)
    return u1, u2, u1inv, inv_norm, ratio


def neumann_partial(u1, u2, terms, pol=DEFAULT_POLICY):
    """``sum_{k=0}^{terms-1} [U1^-1 (U1 - U2)]^k U1^-1`` term by term."""
    u1, u2, u1inv, _, _ = _neumann_setup(u1, u2, pol)
    step = u1inv @ (u1 - u2)
    acc = np.zeros_like(u1inv)
    power = np.eye(u1.shape[0], dtype=complex)
    for _ in range(terms):
        acc += power
        power = power @ step
    return acc @ u1inv


def neumann_inverse(u1, u2, pol=DEFAULT_POLICY, max_terms=MAX_TERMS):
    """Invert ``U2`` from a nearby invertible ``U1`` by a Neumann series.

    Requires ``r = ||U1^-1|| ||U1 - U2|| < 1``.  The number of terms is the
    smallest power of two ``K`` with ``r^K <= tol (1 - r) / (1 + r)``, which
    makes the truncation error at most ``tol ||U2^-1||``; partial sums are
    formed by repeated squaring, ``sum_{k<2^j} X^k = prod_i (I + X^(2^i))``.

    Raises
    ------
    ConvergenceError
        If ``r >= 1``.
    """
    return _neumann(u1, u2, pol, max_terms)


def _neumann(u1, u2, pol, max_terms, sigma1=None):
    u1, u2, u1inv, inv_norm, r = _neumann_setup(u1, u2, pol, sigma1)
    if not r < 1:
        raise ConvergenceError(f"series not guaranteed convergent: r = {r:.6g} >= 1")
    n = u1.shape[0]
    eye = np.eye(n, dtype=complex)
    tol = pol.equality_tolerance
    if r == 0:
        needed = 1
    else:
        needed = max(1, math.ceil(math.log(tol * (1 - r) / (1 + r)) / math.log(r)))
    step = u1inv @ (u1 - u2)
    acc = eye.copy()
    power = step
    terms = 1
    while terms < needed and 2 * terms <= max_terms:
        acc = acc + power @ acc
        power = power @ power
        terms *= 2
    inverse = acc @ u1inv
    bound = r**terms / (1 - r) * inv_norm
    residual = operator_norm(u2 @ inverse - eye)
    return NeumannResult(inverse, terms, r, float(bound), residual, terms < needed)


@dataclass(frozen=True)
class StabilityBudget:
    """Coefficients of the joint perturbation hypothesis.

    ``lambdas[0..3]`` weight ``||T_Psi c||``, ``||T_Phi c||``, ``||T_Xi c||``
    and ``||T_Theta c||``; ``mu`` bounds ``||U - V||``.
    """

    lambdas: tuple = (0.0, 0.0, 0.0, 0.0)
    mu: float = 0.0

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        if len(lam) != 4:
            raise ValueError("exactly four lambda coefficients are required")
        if any(not (np.isfinite(x) and x >= 0) for x in lam + (float(self.mu),)):
            raise ValueError("budget coefficients must be finite and nonnegative")
        object.__setattr__(self, "lambdas", lam)

    @property
    def total(self):
        return sum(self.lambdas)


def _certificate(name, lhs, threshold, conclusion, **quantities):
    return Certificate(
        name=name,
        verdict=bool(strictly_less(lhs, threshold, GUARD)),
        lhs=float(lhs),
        threshold=float(threshold),
        conclusion=conclusion,
        quantities=dict(quantities),
    )


def _inverse_norm(a, pol, what, sigma=None):
    """``(||A^-1||, cond(A))`` from one SVD; A must pass :func:`is_invertible`."""
    s = singular_values(a) if sigma is None else sigma
    if not len(s):
        return 0.0, 1.0
    if not (a.shape[0] == a.shape[1] and pol.rank_of(s) == len(s) and s[0] / s[-1] <= pol.condition_limit):
        raise PreconditionError(f"{what} is not invertible")
    return 1.0 / float(s[-1]), float(s[0] / s[-1])


def _witness(cert, g_old, g_new, pol, neumann=True, sigma_old=None):
    """Record invertibility witnesses of ``g_new`` on a passing certificate."""
    s = singular_values(g_new)
    smin = float(s[-1]) if len(s) else 0.0
    cert.quantities["sigma_min"] = smin
    if not cert.verdict:
        return s
    if len(s) and not smin > pol.relative_rank_cutoff * s[0]:
        cert.violations.append("certificate passed but the perturbed Gram matrix is singular")
        return s
    if neumann:
        _attach_neumann(cert, g_old, g_new, pol, sigma_new=s, sigma_old=sigma_old)
    return s


def _attach_neumann(
    cert, a_old, a_new, pol, left=None, right=None, target=None, sigma_new=None, sigma_target=None, sigma_old=None
):
    """Compare a Neumann inverse of ``a_new`` with a direct inverse.

    With ``left``/``right`` the series is sandwiched as ``left @ S @ right``
    and compared with ``inv(target)``.  The ``sigma_*`` arguments may carry
    already computed singular values.
    """
    try:
        res = _neumann(a_old, a_new, pol, MAX_TERMS, sigma_old)
    except ConvergenceError as exc:
        cert.violations.append(f"Neumann series does not converge: {exc}")
        return None
    series = res.inverse
    s_new = singular_values(a_new) if sigma_new is None else sigma_new
    if target is None:
        s_target = s_new
    elif sigma_target is None:
        s_target = singular_values(target)
    else:
        s_target = sigma_target
    cond_new = float(s_new[0] / s_new[-1]) if len(s_new) else 1.0
    cond_target = float(s_target[0] / s_target[-1]) if len(s_target) else 1.0
    target = a_new if target is None else target
    direct = np.linalg.inv(target)
    if left is not None:
        series = left @ series @ right
        bound = res.error_bound * operator_norm(left) * operator_norm(right)
    else:
        bound = res.error_bound
    err = operator_norm(series - direct)
    slack = pol.allowance(cond_new * cond_target) * (1.0 / float(s_target[-1]) if len(s_target) else 0.0)
    cert.quantities.update(
        neumann_terms=res.terms,
        neumann_ratio=res.ratio,
        neumann_error=err,
        neumann_bound=bound,
        neumann_inverse=series,
    )
    if err > bound + slack:
        cert.violations.append("Neumann inverse outside its truncation bound")
    return series


def stability_three_ops(u1, u2, u3, frame, pol=DEFAULT_POLICY):
    """``G_{U1, U2 Phi, U3 Phi}`` stays invertible when ``||U2* U1 U3 - U1|| < 1/(||G^-1|| B_Phi)``.

    ``G = G_{U1,Phi,Phi}``.  When ``Phi`` spans, it must be a Riesz basis,
    ``U1`` invertible, and the inverse equals
    ``T_{Phi~}* sum_k (I - U1^-1 U2* U1 U3)^k U1^-1 T_{Phi~}``.
    """
    frame = as_frame(frame)
    n = frame.dim
    u1, u2, u3 = (as_matrix(x, name) for x, name in ((u1, "U1"), (u2, "U2"), (u3, "U3")))
    for x in (u1, u2, u3):
        if x.shape != (n, n):
            raise DimensionError(f"operators must be {n} x {n}")
    t = frame.synthesis
    g = herm(t) @ u1 @ t
    s_g = singular_values(g)
    ginv_norm, _ = _inverse_norm(g, pol, "G_{U1,Phi,Phi}", s_g)
    moved = herm(u2) @ u1 @ u3
    lhs = operator_norm(moved - u1)
    thr = 1.0 / (ginv_norm * frame.upper_bound)
    cert = _certificate("three-ops", lhs, thr, "G_{U1,U2 Phi,U3 Phi} is invertible")
    g_new = herm(u2 @ t) @ u1 @ (u3 @ t)
    s_new = _witness(cert, g, g_new, pol, neumann=False)
    if not cert.verdict or cert.violations:
        return cert
    cls = classify(frame, pol)
    if cls.spanning:
        if not cls.is_riesz_basis:
            cert.violations.append("spanning frame with invertible Gram is not a Riesz basis")
        if not is_invertible(u1, pol):
            cert.violations.append("U1 is not invertible")
            return cert
        dual = canonical_dual(frame, pol).synthesis
        _attach_neumann(cert, u1, moved, pol, herm(dual), dual, target=g_new, sigma_target=s_new)
    else:
        _attach_neumann(cert, g, g_new, pol, sigma_new=s_new, sigma_old=s_g)
    return cert


def stability_factor(u1, u2, frame, pol=DEFAULT_POLICY):
    """``G_{U1,Phi,U2 Phi}`` and ``G_{U1,U2 Phi,Phi}`` stay invertible when ``||U2 - I|| < 1/(||G^-1|| B_Phi ||U1||)``.

    For a frame and invertible ``U1`` the closed forms
    ``G_{U1,Phi,U2 Phi}^-1 = G_{U1^-1, (U2 Phi)~, Phi~}`` and
    ``G_{U1,U2 Phi,Phi}^-1 = G_{U1^-1, Phi~, (U2 Phi)~}`` are checked.
    """
    frame = as_frame(frame)
    n = frame.dim
    u1, u2 = as_matrix(u1, "U1"), as_matrix(u2, "U2")
    if u1.shape != (n, n) or u2.shape != (n, n):
        raise DimensionError(f"operators must be {n} x {n}")
    t = frame.synthesis
    g = herm(t) @ u1 @ t
    s_g = singular_values(g)
    ginv_norm, _ = _inverse_norm(g, pol, "G_{U1,Phi,Phi}", s_g)
    s_u1 = singular_values(u1)
    lhs = operator_norm(u2 - np.eye(n))
    thr = 1.0 / (ginv_norm * frame.upper_bound * (float(s_u1[0]) if n else 0.0))
    cert = _certificate("factor", lhs, thr, "G_{U1,Phi,U2 Phi} and G_{U1,U2 Phi,Phi} are invertible")
    image = u2 @ t
    g_right = herm(t) @ u1 @ image
    g_left = herm(image) @ u1 @ t
    s_right = _witness(cert, g, g_right, pol, sigma_old=s_g)
    s_left = singular_values(g_left)
    cert.quantities["sigma_min_mirrored"] = float(s_left[-1]) if len(s_left) else 0.0
    if not cert.verdict or cert.violations:
        return cert
    if not s_left[-1] > pol.relative_rank_cutoff * s_left[0]:
        cert.violations.append("mirrored Gram matrix is singular")
        return cert
    cond_u1 = float(s_u1[0] / s_u1[-1]) if len(s_u1) else 1.0
    if classify(frame, pol).is_frame and pol.rank_of(s_u1) == n and cond_u1 <= pol.condition_limit:
        u1inv = np.linalg.inv(u1)
        dual = canonical_dual(frame, pol).synthesis
        image_dual = canonical_dual(FrameSystem(image), pol).synthesis
        residuals = {}
        for key, gm, sg, closed in (
            ("right", g_right, s_right, herm(image_dual) @ u1inv @ dual),
            ("left", g_left, s_left, herm(dual) @ u1inv @ image_dual),
        ):
            direct = np.linalg.inv(gm)
            residuals[key] = operator_norm(closed - direct) * sg[-1]
            if residuals[key] > pol.allowance(sg[0] / sg[-1] * cond_u1):
                cert.violations.append(f"closed-form inverse ({key}) disagrees with the direct inverse")
        cert.quantities["closed_form_residuals"] = residuals
    return cert


def _frobenius(a):
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def perturb_certificates(op, v, left, right, xi=None, theta=None, pol=DEFAULT_POLICY, which=("c1", "c2", "c3")):
    """Certificates for perturbing ``U``, the right family or the left family.

    ``c1``: ``||U - V|| < 1/(||G^-1|| sqrt(B_Phi B_Psi))`` makes ``G_{V,Phi,Psi}`` invertible.
    ``c2``: ``(sum ||psi_i - theta_i||^2)^(1/2) < 1/(||G^-1|| sqrt(B_Phi) ||U||)`` makes ``G_{U,Phi,Theta}`` invertible.
    ``c3``: ``(sum ||phi_i - xi_i||^2)^(1/2) < 1/(||G^-1|| sqrt(B_Psi) ||U||)`` makes ``G_{U,Xi,Psi}`` invertible.

    Missing ``V``, ``Xi`` or ``Theta`` mean "no perturbation".  Returns a
    dict ``{"c1": ..., "c2": ..., "c3": ...}`` restricted to ``which``.
    """
    left, right = as_frame(left), as_frame(right)
    op = as_matrix(op, "U")
    if op.shape != (left.dim, right.dim):
        raise DimensionError(f"U must be {left.dim} x {right.dim}")
    v = op if v is None else as_matrix(v, "V")
    xi = left if xi is None else as_frame(xi)
    theta = right if theta is None else as_frame(theta)
    if v.shape != op.shape:
        raise DimensionError("V must have the shape of U")
    if xi.synthesis.shape != left.synthesis.shape or theta.synthesis.shape != right.synthesis.shape:
        raise DimensionError("perturbed families must match the shape of the originals")
    tl, tr = left.synthesis, right.synthesis
    g = herm(tl) @ op @ tr
    s_g = singular_values(g)
    gnorm, _ = _inverse_norm(g, pol, "G_{U,Phi,Psi}", s_g)
    unorm = operator_norm(op)
    bl, br = left.upper_bound, right.upper_bound

    unknown = set(which) - {"c1", "c2", "c3"}
    if unknown:
        raise ValueError(f"unknown certificates {sorted(unknown)}")

    out = {}
    if "c1" in which:
        c1 = _certificate("c1", operator_norm(op - v), 1.0 / (gnorm * np.sqrt(bl * br)), "G_{V,Phi,Psi} is invertible")
        _witness(c1, g, herm(tl) @ v @ tr, pol, sigma_old=s_g)
        out["c1"] = c1
    if "c2" in which:
        thr2 = 1.0 / (gnorm * np.sqrt(bl) * unorm) if unorm > 0 else np.inf
        c2 = _certificate("c2", _frobenius(tr - theta.synthesis), thr2, "G_{U,Phi,Theta} is invertible")
        _witness(c2, g, herm(tl) @ op @ theta.synthesis, pol, sigma_old=s_g)
        out["c2"] = c2
    if "c3" in which:
        thr3 = 1.0 / (gnorm * np.sqrt(br) * unorm) if unorm > 0 else np.inf
        c3 = _certificate("c3", _frobenius(tl - xi.synthesis), thr3, "G_{U,Xi,Psi} is invertible")
        _witness(c3, g, herm(xi.synthesis) @ op @ tr, pol, sigma_old=s_g)
        out["c3"] = c3
    return out


def riesz_perturbation(op, left, right, pol=DEFAULT_POLICY):
    """``sum ||U psi_i - phi_i||^2 < A_Phi^2 / B_Phi`` makes ``G_{U,Phi,Psi}`` invertible.

    ``Phi`` must be a Riesz basis.  On success the series
    ``sum_k (I - T_Phi^-1 U T_Psi)^k G_Phi^-1`` is compared with the direct
    inverse and ``||G_Phi^-1|| <= 1 / A_Phi`` is checked.
    """
    left, right = as_frame(left), as_frame(right)
    op = as_matrix(op, "U")
    if op.shape != (left.dim, right.dim):
        raise DimensionError(f"U must be {left.dim} x {right.dim}")
    if left.count != right.count:
        raise DimensionError("families must have equal length")
    cls = classify(left, pol)
    if not cls.is_riesz_basis:
        raise PreconditionError("left family is not a Riesz basis")
    a, b = cls.lower, cls.upper
    tl = left.synthesis
    image = op @ right.synthesis
    lhs = float(np.sum(np.abs(image - tl) ** 2))
    cert = _certificate("riesz", lhs, a * a / b, "G_{U,Phi,Psi} is invertible")
    g_phi = herm(tl) @ tl
    g = herm(tl) @ image
    s_phi = singular_values(g_phi)
    gphi_inv_norm = 1.0 / float(s_phi[-1]) if len(s_phi) else 0.0
    cert.quantities["gram_inverse_norm"] = gphi_inv_norm
    if gphi_inv_norm > (1 / a) * (1 + pol.allowance(b / a)):
        cert.violations.append("||G_Phi^-1|| exceeds 1/A_Phi")
    _witness(cert, g_phi, g, pol, sigma_old=s_phi)
    return cert


def _falsify_hypothesis(left, right, xi, theta, lambdas, samples, rng):
    """Search random coefficients for a violation of the joint hypothesis.

    Returns the largest ratio lhs / rhs found (> 1 means falsified).
    """
    if samples <= 0:
        return 0.0
    m = left.count
    c = rng.standard_normal((m, samples)) + 1j * rng.standard_normal((m, samples))
    norm = lambda t: np.sqrt(np.sum(np.abs(t @ c) ** 2, axis=0))
    lhs = norm(right.synthesis - theta.synthesis) + norm(left.synthesis - xi.synthesis)
    l1, l2, l3, l4 = lambdas
    rhs = l1 * norm(right.synthesis) + l2 * norm(left.synthesis) + l3 * norm(xi.synthesis) + l4 * norm(theta.synthesis)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    return float(ratio.max())


def joint_stability(op, v, left, right, xi, theta, budget, pol=DEFAULT_POLICY, samples=10_000, rng=None):
    """Joint perturbation of the operator and both families.

    The coefficient hypothesis is certified through the operator-norm
    surrogate ``||T_Psi - T_Theta|| + ||T_Phi - T_Xi|| <= l1 sqrt(B_Psi) +
    l2 sqrt(B_Phi) + l3 sqrt(B_Xi) + l4 sqrt(B_Theta)`` and stress-tested on
    ``samples`` random coefficient vectors.  The remaining hypotheses are
    ``||U - V|| < mu``, ``mu + 2 ||U|| l < sqrt(A_Psi A_Phi) / (||U^-1|| B)``
    and ``l (1 + 3 sqrt(B / A)) < 1``, where ``l`` is the sum of the
    coefficients, ``B`` the largest Bessel bound of the four families and
    ``A = min(A_Phi, A_Psi)``.

    On success ``G_{V,Xi,Theta}`` must be invertible and ``Xi``, ``Theta``
    Riesz bases.

    Raises
    ------
    PreconditionError
        If ``G_{U,Phi,Psi}`` or ``U`` is singular or a family is not a frame.
    """
    left, right = as_frame(left), as_frame(right)
    xi, theta = as_frame(xi), as_frame(theta)
    op, v = as_matrix(op, "U"), as_matrix(v, "V")
    if not isinstance(budget, StabilityBudget):
        budget = StabilityBudget(*budget)
    n = left.dim
    if op.shape != (n, n) or v.shape != (n, n) or right.dim != n:
        raise DimensionError(f"operators must be {n} x {n} and all families in C^{n}")
    if xi.synthesis.shape != left.synthesis.shape or theta.synthesis.shape != right.synthesis.shape:
        raise DimensionError("perturbed families must match the shape of the originals")
    for name, fam in (("left", left), ("right", right)):
        if not classify(fam, pol).is_frame:
            raise PreconditionError(f"{name} family is not a frame")
    g = herm(left.synthesis) @ op @ right.synthesis
    s_g = singular_values(g)
    ginv_norm, g_cond = _inverse_norm(g, pol, "G_{U,Phi,Psi}", s_g)
    s_u = singular_values(op)
    uinv_norm, _ = _inverse_norm(op, pol, "U", s_u)
    a_phi, b_phi = frame_bounds(left, pol)
    a_psi, b_psi = frame_bounds(right, pol)
    b_xi, b_theta = xi.upper_bound, theta.upper_bound
    big_b = max(b_phi, b_psi, b_xi, b_theta)
    small_a = min(a_phi, a_psi)
    l1, l2, l3, l4 = budget.lambdas
    lam = budget.total
    unorm = float(s_u[0]) if n else 0.0
    shift = operator_norm(op - v)

    surrogate_lhs = operator_norm(right.synthesis - theta.synthesis) + operator_norm(left.synthesis - xi.synthesis)
    surrogate_rhs = l1 * np.sqrt(b_psi) + l2 * np.sqrt(b_phi) + l3 * np.sqrt(b_xi) + l4 * np.sqrt(b_theta)
    rng = rng if rng is not None else np.random.default_rng(0xC0FFEE)
    falsify = _falsify_hypothesis(left, right, xi, theta, budget.lambdas, samples, rng)
    cap = np.sqrt(a_psi * a_phi) / (uinv_norm * big_b)
    checks = {
        "surrogate": bool(surrogate_lhs <= surrogate_rhs),
        "sampled": bool(falsify <= 1.0),
        "operator": bool(strictly_less(shift, budget.mu, GUARD)),
        "budget": bool(strictly_less(budget.mu + 2 * unorm * lam, cap, GUARD)),
        "ratio": bool(strictly_less(lam * (1 + 3 * np.sqrt(big_b / small_a)), 1.0, GUARD)),
    }
    margin_lhs = budget.mu + 2 * unorm * lam
    cert = Certificate(
        name="joint",
        verdict=all(checks.values()),
        lhs=float(margin_lhs),
        threshold=float(cap),
        conclusion="G_{V,Xi,Theta} is invertible and Xi, Theta are Riesz bases",
        quantities={
            "checks": checks,
            "surrogate_lhs": float(surrogate_lhs),
            "surrogate_rhs": float(surrogate_rhs),
            "sampled_max_ratio": falsify,
            "perturbation_norm": shift,
            "ratio_lhs": float(lam * (1 + 3 * np.sqrt(big_b / small_a))),
            "B": big_b,
            "A": small_a,
        },
    )
    # the intermediate bound needs only invertibility of G and U
    shart = np.sqrt(a_psi * a_phi) / uinv_norm
    cert.quantities["lower_bound_chain"] = float(shart)
    cert.quantities["inverse_gram_reciprocal"] = 1.0 / ginv_norm
    if shart > (1.0 / ginv_norm) * (1 + pol.allowance(g_cond)):
        cert.violations.append("sqrt(A_Psi A_Phi)/||U^-1|| exceeds 1/||G^-1||")
    g_new = herm(xi.synthesis) @ v @ theta.synthesis
    _witness(cert, g, g_new, pol, sigma_old=s_g)
    if cert.verdict and not cert.violations:
        if not (classify(xi, pol).is_riesz_basis and classify(theta, pol).is_riesz_basis):
            cert.violations.append("perturbed families are not Riesz bases")
    return cert


@dataclass
class ConvergenceTable:
    deviations: list
    bounds: list
    holds: bool
    violations: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def convergence_harness(sequence, limit, pol=DEFAULT_POLICY):
    """``||G_{Un,Phin,Psin} - G_{U,Phi,Psi}||`` against the perturbation chain bound.

    ``sequence`` yields triples ``(Un, Phin, Psin)``, ``limit`` is
    ``(U, Phi, Psi)``.  The bound per step is
    ``||T_Phin* Un|| ||T_Psin - T_Psi|| + (||T_Phin - T_Phi|| ||Un|| + ||T_Phi|| ||Un - U||) ||T_Psi||``.
    """
    op, left, right = limit
    left, right = as_frame(left), as_frame(right)
    op = as_matrix(op, "U")
    if op.shape != (left.dim, right.dim):
        raise DimensionError(f"U must be {left.dim} x {right.dim}")
    g = herm(left.synthesis) @ op @ right.synthesis
    tl_norm = np.sqrt(left.upper_bound)
    tr_norm = np.sqrt(right.upper_bound)
    deviations, bounds, violations = [], [], []
    for k, (un, ln, rn) in enumerate(sequence):
        ln, rn = as_frame(ln), as_frame(rn)
        un = as_matrix(un, "Un")
        if un.shape != op.shape or ln.synthesis.shape != left.synthesis.shape or rn.synthesis.shape != right.synthesis.shape:
            raise DimensionError(f"step {k} has inconsistent shapes")
        gn = herm(ln.synthesis) @ un @ rn.synthesis
        dev = operator_norm(gn - g)
        bound = operator_norm(herm(ln.synthesis) @ un) * operator_norm(rn.synthesis - right.synthesis) + (
            operator_norm(ln.synthesis - left.synthesis) * operator_norm(un)
            + tl_norm * operator_norm(un - op)
        ) * tr_norm
        deviations.append(dev)
        bounds.append(float(bound))
        scale = max(1.0, operator_norm(g))
        if dev > bound + 10 * np.finfo(float).eps * scale * max(1, g.shape[0]):
            violations.append(k)
    return ConvergenceTable(deviations, bounds, not violations, violations)
