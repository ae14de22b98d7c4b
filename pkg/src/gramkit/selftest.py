"""Seeded invariant suite over random instances at n in {2, 4, 8}.

Each suite draws instances, runs one operation and checks its guaranteed
content.  A suite trial fails on a theorem violation, on an unexpected
precondition error, or when an independent recomputation contradicts the
result.  The instance generators are public so the test-suite can reuse
them with its own oracles.
"""
from __future__ import annotations

import numpy as np

from . import approx, inversion, schatten, stability
from .exceptions import GramkitError
from .frames import FrameSystem, canonical_dual, is_dual_pair
from .gram import cross_gram, gram_entrywise
from .numeric import DEFAULT_POLICY, herm, operator_norm, pseudo_inverse, singular_values
from .sampling import (
    UnitaryPool,
    complex_gaussian,
    random_frame,
    random_invertible,
    random_rank,
    random_tight_frame,
    random_unitary,
)

__all__ = ["SIZES", "STABILITY_THEOREMS", "stability_instance", "range_condition_instance", "run_selftest"]

SIZES = (2, 4, 8)
STABILITY_THEOREMS = ("three-ops", "factor", "c1", "c2", "c3", "riesz", "joint")


def _unit(rng, *shape):
    x = complex_gaussian(rng, *shape)
    return x / operator_norm(x)


def _inv_norm(a):
    """``||A^-1||`` for invertible square ``A``."""
    return 1.0 / singular_values(a)[-1]


def _scale(rng, threshold):
    """Perturbation size spread around ``threshold`` (about 2/3 below it)."""
    return threshold * 10 ** rng.uniform(-1.5, 0.5)


def stability_instance(theorem, rng, n, pol=DEFAULT_POLICY, pool=None):
    """Draw a random instance, evaluate the certificate and rebuild the perturbed Grams.

    Returns ``(certificate, grams)`` where ``grams`` lists the perturbed Gram
    matrices formed directly from the instance data, independently of the
    certificate code.  Pass a :class:`UnitaryPool` over ``rng`` when drawing
    many instances.
    """
    pool = UnitaryPool(rng, batch=4) if pool is None else pool
    random_frame = lambda n, m, rng, lower=0.5, upper=2.0: pool.frame(n, m, lower, upper)
    random_invertible = lambda n, rng, cond=10.0: pool.invertible(n, cond)
    if theorem == "three-ops":
        m = n if rng.random() < 0.7 else max(1, n - 1)
        frame = random_frame(n, n, rng)
        frame = FrameSystem(frame.synthesis[:, :m])
        u1 = random_invertible(n, rng, cond=rng.uniform(1, 5))
        g = herm(frame.synthesis) @ u1 @ frame.synthesis
        thr = 1.0 / (_inv_norm(g) * frame.upper_bound)
        eps = _scale(rng, thr) / 3
        u2 = np.eye(n) + eps * _unit(rng, n, n)
        u3 = np.eye(n) + eps * _unit(rng, n, n)
        cert = stability.stability_three_ops(u1, u2, u3, frame, pol)
        t = frame.synthesis
        return cert, [herm(u2 @ t) @ u1 @ (u3 @ t)]
    if theorem == "factor":
        frame = random_frame(n, n, rng)
        u1 = random_invertible(n, rng, cond=rng.uniform(1, 5))
        g = herm(frame.synthesis) @ u1 @ frame.synthesis
        thr = 1.0 / (_inv_norm(g) * frame.upper_bound * operator_norm(u1))
        u2 = np.eye(n) + _scale(rng, thr) * _unit(rng, n, n)
        cert = stability.stability_factor(u1, u2, frame, pol)
        t = frame.synthesis
        return cert, [herm(t) @ u1 @ u2 @ t, herm(u2 @ t) @ u1 @ t]
    if theorem in ("c1", "c2", "c3"):
        left, right = random_frame(n, n, rng), random_frame(n, n, rng)
        op = random_invertible(n, rng, cond=rng.uniform(1, 5))
        g = herm(left.synthesis) @ op @ right.synthesis
        gnorm = _inv_norm(g)
        unorm = operator_norm(op)
        bl, br = left.upper_bound, right.upper_bound
        if theorem == "c1":
            v = op + _scale(rng, 1 / (gnorm * np.sqrt(bl * br))) * _unit(rng, n, n)
            certs = stability.perturb_certificates(op, v, left, right, pol=pol, which=("c1",))
            return certs["c1"], [herm(left.synthesis) @ v @ right.synthesis]
        d = complex_gaussian(rng, n, n)
        d /= np.linalg.norm(d)  # Frobenius
        if theorem == "c2":
            theta = FrameSystem(right.synthesis + _scale(rng, 1 / (gnorm * np.sqrt(bl) * unorm)) * d)
            certs = stability.perturb_certificates(op, None, left, right, theta=theta, pol=pol, which=("c2",))
            return certs["c2"], [herm(left.synthesis) @ op @ theta.synthesis]
        xi = FrameSystem(left.synthesis + _scale(rng, 1 / (gnorm * np.sqrt(br) * unorm)) * d)
        certs = stability.perturb_certificates(op, None, left, right, xi=xi, pol=pol, which=("c3",))
        return certs["c3"], [herm(xi.synthesis) @ op @ right.synthesis]
    if theorem == "riesz":
        lo = rng.uniform(0.3, 1.0)
        left = random_frame(n, n, rng, lower=lo, upper=lo * rng.uniform(1, 4))
        op = random_invertible(n, rng, cond=rng.uniform(1, 5))
        a, b = left.singular_values[-1] ** 2, left.upper_bound
        d = complex_gaussian(rng, n, n)
        d /= np.linalg.norm(d)
        image = left.synthesis + np.sqrt(_scale(rng, a * a / b)) * d
        right = FrameSystem(np.linalg.solve(op, image))
        cert = stability.riesz_perturbation(op, left, right, pol)
        return cert, [herm(left.synthesis) @ op @ right.synthesis]
    if theorem == "joint":
        left, right = random_frame(n, n, rng), random_frame(n, n, rng)
        op = random_invertible(n, rng, cond=rng.uniform(1, 3))
        eps = 10 ** rng.uniform(-4, -1)
        v = op + eps * rng.uniform(0, 1) * _unit(rng, n, n)
        xi = FrameSystem(left.synthesis + eps * rng.uniform(0, 1) * _unit(rng, n, n))
        theta = FrameSystem(right.synthesis + eps * rng.uniform(0, 1) * _unit(rng, n, n))
        # coefficients chosen so the coefficient hypothesis holds for every c
        a_phi, a_psi = left.singular_values[-1] ** 2, right.singular_values[-1] ** 2
        l1 = operator_norm(right.synthesis - theta.synthesis) / np.sqrt(a_psi)
        l2 = operator_norm(left.synthesis - xi.synthesis) / np.sqrt(a_phi)
        mu = operator_norm(op - v) * 1.01 + 1e-12
        budget = stability.StabilityBudget((l1 * 1.01, l2 * 1.01, 0.0, 0.0), mu)
        cert = stability.joint_stability(op, v, left, right, xi, theta, budget, pol, samples=256, rng=rng)
        return cert, [herm(xi.synthesis) @ v @ theta.synthesis]
    raise ValueError(f"unknown theorem {theorem!r}")


def range_condition_instance(rng, n, holds):
    """An instance whose psi-side range condition is forced true or false.

    True: ``Psi`` is a tight frame, so ``S_Psi`` is scalar.  False: ``Psi``
    has frame operator ``diag(1, 2, ...)`` after a random rotation and
    ``ran U*`` is spanned by the rotated ``e_1 + e_2``.
    """
    m = n + 1 + int(rng.integers(0, n))
    left = random_frame(n, m, rng)
    q = random_unitary(n, rng)
    if holds:
        right = random_tight_frame(n, m, rng, bound=rng.uniform(0.5, 2))
        op = random_rank(n, n, int(rng.integers(1, n)) if n > 1 else 1, rng)
    else:
        spectrum = np.linspace(1.0, 2.0, n)
        right = FrameSystem((q * np.sqrt(spectrum)) @ random_unitary(m, rng)[:n, :])
        w = q[:, 0] + q[:, 1]
        op = np.outer(complex_gaussian(rng, n), np.conj(w))
    return op, left, right


def _suite_pinv_axioms(rng, n, pol, pool):
    a = random_rank(n, n + 1, max(1, n - 1), rng)
    x = pseudo_inverse(a, pol)
    tol = 100 * pol.equality_tolerance
    checks = (a @ x @ a - a, x @ a @ x - x, a @ x - herm(a @ x), x @ a - herm(x @ a))
    return all(np.linalg.norm(c, 2) <= tol * max(1, np.linalg.norm(x, 2) ** 2) for c in checks)


def _suite_dual(rng, n, pol, pool):
    frame = random_frame(n, n + 2, rng)
    return is_dual_pair(frame, canonical_dual(frame, pol), pol).verdict


def _suite_gram(rng, n, pol, pool):
    left, right = random_frame(n, n + 1, rng), random_frame(n, n + 2, rng)
    op = complex_gaussian(rng, n, n)
    g = cross_gram(op, left, right, pol)
    return np.allclose(g.matrix, gram_entrywise(op, left, right), rtol=0, atol=1e-11 * np.linalg.norm(g.matrix))


def _suite_inverse(rng, n, pol, pool):
    left, right = random_frame(n, n, rng), random_frame(n, n, rng)
    rep = inversion.invert_gram(random_invertible(n, rng), left, right, pol)
    return rep.invertible and not rep.violations and rep.inverse_residual <= 1e-8


def _suite_pinv(rng, n, pol, pool):
    m = (3 * n + 1) // 2
    rep = inversion.pinv_gram(random_invertible(n, rng), random_frame(n, m, rng), random_frame(n, m, rng), pol)
    return not rep.violations and rep.residuals["inverse_phi"] <= 1e-8


def _suite_range(rng, n, pol, pool):
    if n < 2:
        return True
    holds = bool(rng.integers(0, 2))
    op, left, right = range_condition_instance(rng, n, holds)
    rep = inversion.pinv_gram(op, left, right, pol)
    return rep.range_condition_psi == holds and rep.holds["pseudo_phi_special"] == holds and not rep.violations


def _suite_schatten(rng, n, pol, pool):
    left, right = random_frame(n, n + 1, rng), random_frame(n, n + 1, rng)
    p = float(rng.choice([1.0, 2.0, 3.0]))
    rep = schatten.schatten_gram_check(complex_gaussian(rng, n, n), left, right, p, pol)
    return not rep.violations


def _suite_approx(rng, n, pol, pool):
    left = random_frame(n, n + 2, rng)
    dual = canonical_dual(left, pol)
    right = FrameSystem(dual.synthesis + 10 ** rng.uniform(-3, 0) * _unit(rng, n, n + 2))
    cert = approx.sufficient_conditions(left, right, pol=pol)
    if cert.violations:
        return False
    if cert.defect < 1:
        fixed = approx.corrected_dual(left, right, pol)
        return is_dual_pair(left, fixed, pol).verdict
    return True


def _suite_neumann(rng, n, pol, pool):
    u1 = random_invertible(n, rng, cond=3)
    r = rng.uniform(0, 0.95)
    u2 = u1 - r / np.linalg.norm(np.linalg.inv(u1), 2) * _unit(rng, n, n)
    res = stability.neumann_inverse(u1, u2, pol)
    return np.linalg.norm(res.inverse - np.linalg.inv(u2), 2) <= res.error_bound + 1e-12


def _stability_suite(theorem):
    def run(rng, n, pol, pool):
        cert, grams = stability_instance(theorem, rng, n, pol, pool=pool)
        if cert.violations:
            return False
        if cert.verdict:
            for g in grams:
                s = np.linalg.svd(g, compute_uv=False)
                if not s[-1] > pol.relative_rank_cutoff * s[0]:
                    return False
        return True

    return run


SUITES = {
    "pseudo-inverse axioms": _suite_pinv_axioms,
    "canonical dual": _suite_dual,
    "gram factorization": _suite_gram,
    "inverse gram": _suite_inverse,
    "pseudo-inverse representation": _suite_pinv,
    "range-condition equivalence": _suite_range,
    "schatten bounds": _suite_schatten,
    "approximate duals": _suite_approx,
    "neumann series": _suite_neumann,
}
SUITES.update({f"stability {t}": _stability_suite(t) for t in STABILITY_THEOREMS})


def run_selftest(seed=0xC0FFEE, pol=DEFAULT_POLICY, trials=20, sizes=SIZES):
    """Run every suite ``trials`` times per size; return counts per theorem."""
    root = np.random.SeedSequence(seed)
    theorems = {}
    ok = True
    for name, suite in SUITES.items():
        passed = total = 0
        failures = []
        for n, child in zip(sizes, root.spawn(len(sizes))):
            rng = np.random.default_rng(child)
            pool = UnitaryPool(rng)
            for _ in range(trials):
                total += 1
                try:
                    good = bool(suite(rng, n, pol, pool))
                    detail = "check failed"
                except GramkitError as exc:
                    good, detail = False, f"{type(exc).__name__}: {exc}"
                except np.linalg.LinAlgError as exc:
                    good, detail = False, f"LinAlgError: {exc}"
                passed += good
                if not good and len(failures) < 3:
                    failures.append(f"n={n}: {detail}")
        theorems[name] = {"trials": total, "passed": passed, "failures": failures}
        ok = ok and passed == total
    return {"seed": int(seed), "ok": ok, "theorems": theorems}
