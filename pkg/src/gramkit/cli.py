"""Command-line front end.

Exit codes: 0 computed and every asserted identity held, 1 a certificate
is inconclusive, 2 a theorem identity was violated, 64 usage or input
error.
"""
from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

import numpy as np

from . import approx, formats, inversion, schatten, stability
from .certificate import INCONCLUSIVE, PASS, VIOLATED
from .exceptions import GramkitError, TheoremViolation
from .frames import FrameSystem, canonical_dual, classify, dual_from_parameter, is_dual_pair
from .gram import CrossGram, adjoint, compose, cross_gram, reconstruct_operator
from .numeric import TolerancePolicy, operator_norm

__all__ = ["main", "build_parser", "DEFAULT_SEED", "EXIT_CODES"]

DEFAULT_SEED = 0xC0FFEE
EXIT_CODES = {PASS: 0, INCONCLUSIVE: 1, VIOLATED: 2}
EXIT_USAGE = 64


class UsageError(GramkitError):
    """Bad command-line usage detected after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not (np.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=_seed, default=None,
                   help=f"random seed (default $GRAMKIT_SEED or {DEFAULT_SEED:#x})")
    g.add_argument("--cutoff", type=_positive, default=1e-10, help="relative rank cutoff")
    g.add_argument("--eq-tol", type=_positive, default=1e-9, help="relative equality tolerance")
    g.add_argument("--cond-limit", type=_positive, default=1e12, help="condition number limit")
    g.add_argument("-o", "--output", help="write the result here instead of stdout")
    g.add_argument("--format", choices=("json", "csv-summary"), default="json")
    return p


def _frame_args(p, left=True, right=True, op=True, op_required=False):
    if op:
        p.add_argument("--op", required=op_required, help="operator U (matrix file; identity if omitted)")
    if left:
        p.add_argument("--left", required=True, help="left family Phi (frame file)")
    if right:
        p.add_argument("--right", required=True, help="right family Psi (frame file)")


def build_parser():
    common = _common()
    parser = _Parser(prog="gramkit", description="Cross Gram matrices of finite frames.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, helptext):
        return sub.add_parser(name, parents=[common], help=helptext, description=helptext)

    p = add("classify", "classify a family and report its frame bounds")
    p.add_argument("frame")

    _frame_args(add("gram", "build G_{U,Phi,Psi}"))

    p = add("adjoint", "adjoint of a Gram matrix (from a file or from U, Phi, Psi)")
    p.add_argument("gram_file", nargs="?")
    p.add_argument("--op")
    p.add_argument("--left")
    p.add_argument("--right")

    p = add("compose", "product of two Gram matrices with simplified provenance")
    for k in ("1", "2"):
        p.add_argument(f"--op{k}")
        p.add_argument(f"--left{k}", required=True)
        p.add_argument(f"--right{k}", required=True)

    p = add("reconstruct", "recover U = T_Phid G T_Psid*")
    p.add_argument("--gram", required=True)
    p.add_argument("--left-dual", required=True)
    p.add_argument("--right-dual", required=True)
    p.add_argument("--left", required=True, help="primal left family (for the duality check)")
    p.add_argument("--right", required=True, help="primal right family (for the duality check)")

    p = add("dual", "canonical dual, or the dual with parameter W")
    p.add_argument("frame")
    p.add_argument("--param", help="matrix W of shape dim x count")

    p = add("special-dual", "special dual of the phi or psi side")
    _frame_args(p)
    p.add_argument("--side", choices=("phi", "psi"), default="phi")

    p = add("pinv", "pseudo-inverse of G and its representations")
    _frame_args(p)
    p.add_argument("--report", help="write the full report here; the main output is then G^+")
    p.add_argument("--left-duals", nargs=2, metavar=("DUAL_A", "DUAL_B"),
                   help="two duals of Phi to compare through U^+ T_dual")
    p.add_argument("--expect-op-pinv", help="expected U^+ (checked entrywise to 1e-12)")

    _frame_args(add("pinv-tilde", "test G^+ = T_(U Psi)~* T_Phi~"))
    _frame_args(add("pinv-transported", "pseudo-inverse through the restricted operator"))

    p = add("schatten", "Schatten-norm inequalities between U and G")
    _frame_args(p)
    p.add_argument("--p", type=_positive, default=2.0)

    p = add("approx-dual", "approximate-duality certificate")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--left-dual")
    p.add_argument("--right-dual")
    p.add_argument("--op", help="U for the right-inverse condition (needs --inverse)")
    p.add_argument("--inverse", help="right inverse V of U")

    p = add("corrected-dual", "exact dual (T_Psi T_Phi*)^-1 Psi of an approximate dual")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = add("stability", "perturbation certificate")
    p.add_argument("--theorem", required=True,
                   choices=("three-ops", "factor", "c1", "c2", "c3", "riesz", "joint"))
    for name in ("--op", "--v", "--u1", "--u2", "--u3"):
        p.add_argument(name, help="operator file")
    for name in ("--left", "--right", "--frame", "--xi", "--theta"):
        p.add_argument(name, help="frame file")
    p.add_argument("--lambdas", type=float, nargs=4, default=(0.0, 0.0, 0.0, 0.0))
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=10_000, help="random vectors for the joint hypothesis")

    p = add("neumann", "Neumann-series inverse of U2 around U1")
    p.add_argument("--u1", required=True)
    p.add_argument("--u2", required=True)

    p = add("converge", "Gram deviation along U_n = U + N/n (and optionally perturbed frames)")
    _frame_args(p)
    p.add_argument("--noise", help="matrix N (random with ||N|| = 1 if omitted)")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--perturb-frames", action="store_true", help="also move every frame element by D/n")

    p = add("selftest", "run the invariant suite at n in {2, 4, 8}")
    p.add_argument("--trials", type=int, default=20, help="trials per theorem and size")
    return parser


def _policy(args):
    return TolerancePolicy(args.cutoff, args.eq_tol, args.cond_limit)


def _resolve(path):
    """Paths starting with ``fixtures:`` refer to the packaged fixtures."""
    if path is not None and path.startswith("fixtures:"):
        return str(resources.files("gramkit") / "fixtures" / path.split(":", 1)[1])
    return path


def _matrix(path):
    return None if path is None else formats.read_matrix(_resolve(path))


def _frame(path):
    return None if path is None else formats.read_frame(_resolve(path))


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command} needs {flags}")


def _status_of(violations, verdict=True):
    if violations:
        return VIOLATED
    return PASS if verdict else INCONCLUSIVE


# each handler returns (payload, status)


def _cmd_classify(args, pol):
    frame = _frame(args.frame)
    cls = classify(frame, pol)
    return {"class": cls, "dim": frame.dim, "count": frame.count}, PASS


def _cmd_gram(args, pol):
    g = cross_gram(_matrix(args.op), _frame(args.left), _frame(args.right), pol)
    return g.matrix, PASS


def _cmd_adjoint(args, pol):
    if args.gram_file:
        return adjoint(CrossGram(_matrix(args.gram_file))).matrix, PASS
    _need(args, "left", "right")
    g = cross_gram(_matrix(args.op), _frame(args.left), _frame(args.right), pol)
    a = adjoint(g)
    check = cross_gram(a.op, a.left, a.right, pol, verify=False).matrix
    if operator_norm(check - a.matrix) > pol.equality_tolerance * max(1.0, operator_norm(a.matrix)):
        raise TheoremViolation("adjoint provenance does not reproduce the adjoint matrix")
    return a.matrix, PASS


def _cmd_compose(args, pol):
    g1 = cross_gram(_matrix(args.op1), _frame(args.left1), _frame(args.right1), pol)
    g2 = cross_gram(_matrix(args.op2), _frame(args.left2), _frame(args.right2), pol)
    c = compose(g1, g2, pol, strict=True)
    return {"matrix": c.matrix, "op": c.op, "rule": c.rule}, PASS


def _cmd_reconstruct(args, pol):
    g = CrossGram(_matrix(args.gram))
    u = reconstruct_operator(g, _frame(args.left_dual), _frame(args.right_dual), pol,
                             left=_frame(args.left), right=_frame(args.right))
    return u, PASS


def _cmd_dual(args, pol):
    frame = _frame(args.frame)
    if args.param:
        if not classify(frame, pol).is_frame:
            raise UsageError("a parametrized dual needs a spanning frame")
        dual = dual_from_parameter(frame, _matrix(args.param), pol)
    else:
        dual = canonical_dual(frame, pol)
    on = None if classify(frame, pol).spanning else frame.synthesis @ np.linalg.pinv(frame.synthesis)
    cert = is_dual_pair(frame, dual, pol, on=on)
    return dual, _status_of([] if cert.verdict else ["dual fails the duality check"])


def _cmd_special_dual(args, pol):
    sd = inversion.special_dual(_matrix(args.op), _frame(args.left), _frame(args.right), args.side, pol)
    return sd, PASS


def _cmd_pinv(args, pol):
    op, left, right = _matrix(args.op), _frame(args.left), _frame(args.right)
    rep = inversion.pinv_gram(op, left, right, pol)
    payload = rep.to_dict()
    violations = list(rep.violations)
    if args.expect_op_pinv:
        expected = _matrix(args.expect_op_pinv)
        if expected.shape != rep.op_pinv.shape:
            raise UsageError(f"expected U^+ has shape {expected.shape}, computed {rep.op_pinv.shape}")
        err = float(np.max(np.abs(expected - rep.op_pinv), initial=0.0))
        payload["op_pinv_check"] = {"max_entry_error": err, "matches": err <= 1e-12}
        if err > 1e-12:
            violations.append("U^+ differs from the expected matrix")
    if args.left_duals:
        a, b = (_frame(p) for p in args.left_duals)
        for name, d in (("first", a), ("second", b)):
            cert = is_dual_pair(left, d, pol)
            if not cert.verdict:
                raise UsageError(f"{name} --left-duals family is not a dual of Phi")
        pa, pb = rep.op_pinv @ a.synthesis, rep.op_pinv @ b.synthesis
        diff = float(np.max(np.abs(pa - pb), initial=0.0))
        payload["dual_comparison"] = {
            "duals_differ": not a.matches(b, pol),
            "pinv_images_max_difference": diff,
            "pinv_images_equal": diff <= 1e-12,
            "representing_dual_unique": not (diff <= 1e-12 and not a.matches(b, pol)),
        }
    payload["violations"] = violations
    status = _status_of(violations)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(formats.dumps(payload) + "\n")
        return rep.pinv, status
    return payload, status


def _cmd_pinv_tilde(args, pol):
    rep = inversion.pinv_via_tilde(_matrix(args.op), _frame(args.left), _frame(args.right), pol)
    return rep, _status_of(rep.violations)


def _cmd_pinv_transported(args, pol):
    rep = inversion.pinv_transported(_matrix(args.op), _frame(args.left), _frame(args.right), pol)
    return rep, PASS


def _cmd_schatten(args, pol):
    rep = schatten.schatten_gram_check(_matrix(args.op), _frame(args.left), _frame(args.right), args.p, pol)
    return rep, _status_of(rep.violations)


def _cmd_approx_dual(args, pol):
    left, right = _frame(args.left), _frame(args.right)
    cert = approx.sufficient_conditions(left, right, _frame(args.left_dual), _frame(args.right_dual), pol)
    payload = {"sufficient": cert}
    violations = list(cert.violations)
    passed = cert.conclusion or cert.dual_conclusion
    if args.op or args.inverse:
        _need(args, "op", "inverse")
        rc = approx.right_inverse_condition(_matrix(args.op), _matrix(args.inverse), left, right,
                                            _frame(args.left_dual), pol)
        payload["right_inverse"] = rc
        violations += rc.violations
        passed = passed or rc.conclusion
    return payload, _status_of(violations, passed)


def _cmd_corrected_dual(args, pol):
    return approx.corrected_dual(_frame(args.left), _frame(args.right), pol), PASS


def _cmd_stability(args, pol):
    t = args.theorem
    if t == "three-ops":
        _need(args, "u1", "u2", "u3", "frame")
        cert = stability.stability_three_ops(_matrix(args.u1), _matrix(args.u2), _matrix(args.u3),
                                             _frame(args.frame), pol)
    elif t == "factor":
        _need(args, "u1", "u2", "frame")
        cert = stability.stability_factor(_matrix(args.u1), _matrix(args.u2), _frame(args.frame), pol)
    elif t in ("c1", "c2", "c3"):
        _need(args, "left", "right")
        need = {"c1": "v", "c2": "theta", "c3": "xi"}[t]
        _need(args, need)
        op = _matrix(args.op)
        left, right = _frame(args.left), _frame(args.right)
        if op is None:
            op = np.eye(left.dim, right.dim)
        certs = stability.perturb_certificates(op, _matrix(args.v), left, right,
                                               _frame(args.xi), _frame(args.theta), pol, which=(t,))
        cert = certs[t]
    elif t == "riesz":
        _need(args, "left", "right")
        left, right = _frame(args.left), _frame(args.right)
        op = _matrix(args.op)
        cert = stability.riesz_perturbation(np.eye(left.dim, right.dim) if op is None else op, left, right, pol)
    else:
        _need(args, "op", "v", "left", "right", "xi", "theta")
        budget = stability.StabilityBudget(tuple(args.lambdas), args.mu)
        cert = stability.joint_stability(
            _matrix(args.op), _matrix(args.v), _frame(args.left), _frame(args.right),
            _frame(args.xi), _frame(args.theta), budget, pol,
            samples=args.samples, rng=np.random.default_rng(args.seed),
        )
    return cert, cert.status


def _cmd_neumann(args, pol):
    res = stability.neumann_inverse(_matrix(args.u1), _matrix(args.u2), pol)
    ok = res.residual <= 10 * pol.equality_tolerance * max(1.0, operator_norm(res.inverse))
    status = INCONCLUSIVE if res.truncated else (PASS if ok else VIOLATED)
    return res, status


def _cmd_converge(args, pol):
    left, right = _frame(args.left), _frame(args.right)
    op = _matrix(args.op)
    if op is None:
        op = np.eye(left.dim, right.dim)
    rng = np.random.default_rng(args.seed)
    noise = _matrix(args.noise)
    if noise is None:
        noise = rng.standard_normal(op.shape) + 1j * rng.standard_normal(op.shape)
        noise /= operator_norm(noise)
    if noise.shape != op.shape:
        raise UsageError("noise must have the shape of U")
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    dl = dr = None
    if args.perturb_frames:
        dl = rng.standard_normal(left.synthesis.shape) + 1j * rng.standard_normal(left.synthesis.shape)
        dr = rng.standard_normal(right.synthesis.shape) + 1j * rng.standard_normal(right.synthesis.shape)

    def sequence():
        for n in range(1, args.steps + 1):
            ln = left if dl is None else FrameSystem(left.synthesis + dl / n)
            rn = right if dr is None else FrameSystem(right.synthesis + dr / n)
            yield op + noise / n, ln, rn

    table = stability.convergence_harness(sequence(), (op, left, right), pol)
    return table, _status_of(table.violations)


def _cmd_selftest(args, pol):
    from .selftest import run_selftest

    report = run_selftest(seed=args.seed, pol=pol, trials=args.trials)
    for name, row in report["theorems"].items():
        print(f"{name}: {row['passed']}/{row['trials']} passed", file=sys.stderr)
    return report, PASS if report["ok"] else VIOLATED


HANDLERS = {
    "classify": _cmd_classify,
    "gram": _cmd_gram,
    "adjoint": _cmd_adjoint,
    "compose": _cmd_compose,
    "reconstruct": _cmd_reconstruct,
    "dual": _cmd_dual,
    "special-dual": _cmd_special_dual,
    "pinv": _cmd_pinv,
    "pinv-tilde": _cmd_pinv_tilde,
    "pinv-transported": _cmd_pinv_transported,
    "schatten": _cmd_schatten,
    "approx-dual": _cmd_approx_dual,
    "corrected-dual": _cmd_corrected_dual,
    "stability": _cmd_stability,
    "neumann": _cmd_neumann,
    "converge": _cmd_converge,
    "selftest": _cmd_selftest,
}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        if {"rows", "cols", "data"} <= obj.keys():
            yield prefix, f"matrix {obj['rows']}x{obj['cols']}"
            return
        if {"dim", "vectors"} <= obj.keys():
            yield prefix, f"frame of {len(obj['vectors'])} in C^{obj['dim']}"
            return
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(payload, fmt):
    if fmt == "json":
        return formats.dumps(payload) + "\n"
    if isinstance(payload, np.ndarray) and payload.ndim == 2:
        return formats.matrix_to_csv(payload)
    lines = ["key,value"]
    for key, value in _flatten(formats.to_jsonable(payload)):
        lines.append(f"{key},{'' if value is None else value}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits for --help and usage errors; report the code instead
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.seed is None:
        env = os.environ.get("GRAMKIT_SEED")
        try:
            args.seed = _seed(env) if env else DEFAULT_SEED
        except argparse.ArgumentTypeError as exc:
            print(f"gramkit: error: GRAMKIT_SEED: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        pol = _policy(args)
        payload, status = HANDLERS[args.command](args, pol)
    except TheoremViolation as exc:
        print(f"gramkit: theorem violation: {exc}", file=sys.stderr)
        return EXIT_CODES[VIOLATED]
    except (GramkitError, ValueError, OSError) as exc:
        print(f"gramkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(payload, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_CODES[status]


if __name__ == "__main__":
    sys.exit(main())
