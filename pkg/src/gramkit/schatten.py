"""Schatten norms and the Schatten-class inequalities for cross Gram matrices.

In finite dimension every operator is compact and lies in every Schatten
class, so membership statements are vacuous.  What remains testable are
the quantitative inequalities between ``U`` and ``G_{U,Phi,Psi}``, plus a
truncation diagnostic that watches column tails of growing sections.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import PreconditionError
from .frames import as_frame, classify
from .gram import _operator, gram_matrix
from .numeric import DEFAULT_POLICY, as_matrix, singular_values

__all__ = [
    "schatten_norm",
    "mixed_norm",
    "onb_pair_functional",
    "SchattenReport",
    "schatten_gram_check",
    "DecayTable",
    "truncation_decay",
]


def _check_exponent(p, name="p"):
    if not (np.isfinite(p) and p > 0):
        raise ValueError(f"{name} must be positive and finite, got {p!r}")


def _lp(values, p):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    top = values.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((values / top) ** p) ** (1.0 / p))


def schatten_norm(a, p):
    """``(sum sigma_i^p)^(1/p)``; a quasi-norm for ``p < 1``."""
    _check_exponent(p)
    return _lp(singular_values(as_matrix(a)), p)


def mixed_norm(m, p, q):
    """Row-wise l^q norms, then the l^p norm of those (Frobenius for p = q = 2)."""
    _check_exponent(p)
    _check_exponent(q, "q")
    m = as_matrix(m)
    rows = [_lp(np.abs(row), q) for row in m]
    return _lp(rows, p)


def onb_pair_functional(op, domain_basis, codomain_basis, p, pol=DEFAULT_POLICY):
    """``(sum_i |<U e_i, f_i>|^p)^(1/p)`` for orthonormal bases ``E``, ``F``.

    Bounded by ``||U||_p`` for ``p >= 1`` with equality at the singular
    vector bases.
    """
    _check_exponent(p)
    e, f = as_frame(domain_basis), as_frame(codomain_basis)
    for name, basis in (("domain", e), ("codomain", f)):
        if classify(basis, pol).kind.value != "OrthonormalBasis":
            raise PreconditionError(f"{name} family is not an orthonormal basis")
    op = _operator(op, f, e)
    k = min(e.count, f.count)
    vals = np.abs(np.sum((op @ e.synthesis[:, :k]) * np.conj(f.synthesis[:, :k]), axis=0))
    return _lp(vals, p)


@dataclass
class SchattenReport:
    p: float
    norm_op: float
    norm_gram: float
    bound: float
    diagonal_sum: float
    mixed_norm: float
    hs_entry_sum: float
    verdicts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def schatten_gram_check(op, left, right, p, pol=DEFAULT_POLICY):
    """Compare ``||G||_p`` with ``||U||_p`` and with entry sums of ``G``.

    Checks, each reported separately:

    * ``ideal_bound``: ``||G||_p <= sqrt(B_Phi B_Psi) ||U||_p`` (all p);
    * ``reverse_bound`` (both families spanning): ``||U||_p <= ||G||_p / sqrt(A_Phi A_Psi)``,
      from ``U = T_Phi~ G T_Psi~*``; None otherwise;
    * ``hilbert_schmidt``: ``||G||_2^2`` equals the double sum of ``|G_ij|^2``;
    * ``diagonal``: ``(sum |G_ii|^p)^(1/p) <= ||G||_p`` (p >= 1 only);
    * ``mixed_norm``: ``||G||_{p,2} <= ||G||_p`` for p >= 2, reversed for p <= 2;
    * ``trace`` (p = 1, square G): ``|tr G| <= sum |G_ii| <= ||G||_1``.
    """
    _check_exponent(p)
    left, right = as_frame(left), as_frame(right)
    op = _operator(op, left, right)
    g = gram_matrix(op, left, right)
    tol = pol.equality_tolerance

    norm_op = schatten_norm(op, p)
    norm_gram = schatten_norm(g, p)
    bound = np.sqrt(left.upper_bound * right.upper_bound) * norm_op
    cl, cr = classify(left, pol), classify(right, pol)
    spanning = cl.spanning and cr.spanning and left.dim > 0 and right.dim > 0
    k = min(g.shape)
    diag = np.abs(np.diagonal(g)[:k])
    diagonal_sum = _lp(diag, p)
    mixed = mixed_norm(g, p, 2)

    # the double sum is formed from the definition, not from g
    hs = 0.0
    for i in range(right.count):
        image = op @ right.synthesis[:, i]
        for l in range(left.count):
            hs += abs(np.sum(image * np.conj(left.synthesis[:, l]))) ** 2
    frob = schatten_norm(g, 2) ** 2 if g.size else 0.0

    verdicts = {
        "ideal_bound": norm_gram <= bound * (1 + tol) + 1e-300,
        "reverse_bound": norm_op * np.sqrt(cl.lower * cr.lower) <= norm_gram * (1 + tol) + 1e-300
        if spanning
        else None,
        "hilbert_schmidt": abs(frob - hs) <= tol * max(hs, 1.0),
        "diagonal": diagonal_sum <= norm_gram * (1 + tol) + 1e-300 if p >= 1 else None,
    }
    if p >= 2:
        verdicts["mixed_norm"] = mixed <= norm_gram * (1 + tol) + 1e-300
    if p <= 2:
        ok = mixed >= norm_gram * (1 - tol)
        verdicts["mixed_norm"] = ok if p != 2 else ok and verdicts["mixed_norm"]
    if p == 1 and g.shape[0] == g.shape[1]:
        verdicts["trace"] = abs(np.trace(g)) <= diagonal_sum * (1 + tol) + 1e-300
    verdicts = {k: None if v is None else bool(v) for k, v in verdicts.items()}
    violations = [k for k, v in verdicts.items() if v is False]
    return SchattenReport(
        p=float(p),
        norm_op=norm_op,
        norm_gram=norm_gram,
        bound=float(bound),
        diagonal_sum=diagonal_sum,
        mixed_norm=mixed,
        hs_entry_sum=float(hs),
        verdicts=verdicts,
        violations=violations,
    )


@dataclass
class DecayTable:
    sizes: list
    tails: list
    trend: str

    def to_dict(self):
        return {"sizes": self.sizes, "tails": self.tails, "trend": self.trend}


def truncation_decay(op_section, left_section, right_section, sizes, pol=DEFAULT_POLICY):
    """Column-tail diagnostic over growing sections.

    Each ``*_section`` is a callable ``n -> matrix`` (or family).  For each
    ``n`` the tail ``max_{i > n/2} sum_l |<U psi_i, phi_l>|^2`` is recorded.
    The trend is ``"zero"`` when every tail vanishes, ``"decay"`` when the
    tails never increase and end below where they start, ``"no decay"``
    otherwise.
    """
    tails = []
    for n in sizes:
        left, right = as_frame(left_section(n)), as_frame(right_section(n))
        op = _operator(op_section(n), left, right)
        g = gram_matrix(op, left, right)
        cols = np.sum(np.abs(g) ** 2, axis=0)
        tail = cols[g.shape[1] // 2 :]
        tails.append(float(tail.max()) if tail.size else 0.0)
    tol = pol.equality_tolerance
    scale = max(tails, default=0.0)
    if scale <= tol:
        trend = "zero"
    elif all(b <= a + tol * scale for a, b in zip(tails, tails[1:])) and tails[-1] < tails[0] - tol * scale:
        trend = "decay"
    else:
        trend = "no decay"
    return DecayTable(list(sizes), tails, trend)
