"""Command-line front end.

Exit codes: 0 success, 2 invalid input or flags, 3 analytical refusal,
1 unexpected numerical failure.  Diagnostics go to stderr; results go to
``--output`` (written atomically) or stdout.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile


from . import analysis
from .dynamics import Abelson, DeGroot, FriedkinJohnsen, Taylor, simulate
from .exceptions import DimensionError, DomainError, OpinionDynamicsError, RefusalError
from .formats import MODELS, DocumentError, load_network, save_report, save_trajectory

__all__ = ["build_parser", "run", "main"]

EXIT_OK, EXIT_FAILURE, EXIT_INPUT, EXIT_REFUSAL = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _common(p):
    p.add_argument("--input", required=True, help="network document (JSON)")
    p.add_argument("--output", help="result file; stdout when omitted")
    p.add_argument("--model", choices=MODELS, help="override the document's model tag")
    p.add_argument("--seed-note", help="free-form note copied into JSON outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opindyn", description="Opinion dynamics on influence networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="graph structure, verdicts, social power and fixed points")
    _common(p)
    p = sub.add_parser("predict", help="verdicts only (graph algorithms, no linear algebra)")
    _common(p)

    p = sub.add_parser("simulate", help="write a trajectory CSV")
    _common(p)
    p.add_argument("--steps", type=int, default=1000, help="step limit for discrete models (default 1000)")
    p.add_argument("--tol", type=float, default=1e-10, help="early-stop tolerance (default 1e-10)")
    p.add_argument("--horizon", type=float, help="final time T for continuous models")
    p.add_argument("--dt", type=float, default=0.01, help="sample spacing for continuous models")
    p.add_argument("--method", choices=("expm", "exact-expm-stepping", "rk4"),
                   help="integrator for linear continuous models")

    p = sub.add_parser("centrality", help="social power, influence centrality or PageRank")
    _common(p)
    p.add_argument("--method", choices=("social-power", "influence", "pagerank"), default="social-power")
    p.add_argument("--alpha", type=float, help="influence: use Lambda = alpha I")
    p.add_argument("--damping", type=float, help="pagerank: teleportation probability m (default 0.15)")

    p = sub.add_parser("containment", help="check final opinions against the leaders' convex hull")
    _common(p)
    return parser


def _validate(args, spec):
    cmd = args.command
    if cmd == "simulate":
        continuous = isinstance(spec, (Abelson, Taylor))
        if continuous and args.horizon is None:
            raise UsageError("continuous-time models need --horizon")
        if not continuous and (args.horizon is not None or args.method is not None):
            raise UsageError("--horizon/--method apply to continuous-time models only")
        if args.steps < 0 or not args.tol > 0 or not args.dt > 0:
            raise UsageError("--steps must be >= 0, --tol and --dt positive")
    if cmd == "centrality":
        if args.alpha is not None and args.method != "influence":
            raise UsageError("--alpha applies to --method influence only")
        if args.damping is not None and args.method != "pagerank":
            raise UsageError("--damping applies to --method pagerank only")
        if args.method in ("influence", "pagerank") and not isinstance(spec, (DeGroot, FriedkinJohnsen)):
            raise UsageError(f"--method {args.method} needs a stochastic matrix (degroot or fj model)")
    if cmd == "containment" and not isinstance(spec, Taylor):
        raise UsageError("containment needs a taylor model with 'sources'")


def _with_note(data, args):
    if args.seed_note is not None:
        data = dict(data, note=args.seed_note)
    return data


def _x0_for_limits(doc, spec):
    if doc.x0 is not None:
        return doc.x0
    if isinstance(spec, (Taylor, FriedkinJohnsen)):
        return doc.u
    return None


def _centrality(args, doc, spec):
    if args.method == "pagerank":
        m = 0.15 if args.damping is None else args.damping
        return analysis.pagerank(spec.W, m)
    if args.method == "influence":
        if args.alpha is not None:
            return analysis.influence_centrality(spec.W, args.alpha)
        if doc.lam is None:
            raise UsageError("--method influence needs 'lambda' in the document or --alpha")
        return analysis.influence_centrality(spec.W, doc.lam)
    if isinstance(spec, DeGroot):
        return analysis.french_social_power(spec.W)
    if isinstance(spec, Abelson):
        return analysis.abelson_social_power(spec.A)
    raise UsageError("social power is defined for the degroot and abelson models")


def _containment(doc, spec):
    if doc.B is None:
        raise UsageError("containment needs 'sources' (B, s) in the document")
    K = analysis.containment_certificate(spec.A, doc.B)
    final = analysis.taylor_final(spec.A, spec.gamma, spec.u)
    report = analysis.containment_check(final, doc.s, certificate=K)
    return dict(report.to_dict(), final_opinions=final.tolist(), weights=K.tolist())


def _execute(args) -> tuple[str, str | None]:
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    doc = load_network(text)
    spec = doc.to_model(args.model)
    _validate(args, spec)
    cmd = args.command
    if cmd in ("analyze", "predict"):
        report = analysis.analyze(spec, x0=_x0_for_limits(doc, spec), verdict_only=cmd == "predict")
        return save_report(_with_note(report.to_dict(), args)), None
    if cmd == "simulate":
        traj = simulate(spec, doc.initial_state(), k_max=args.steps, tol=args.tol,
                        T=args.horizon, dt=args.dt, method=args.method)
        return save_trajectory(traj), f"stop reason: {traj.stop_reason}"
    if cmd == "centrality":
        return save_report(_with_note(_centrality(args, doc, spec).to_dict(), args)), None
    return save_report(_with_note(_containment(doc, spec), args)), None


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".opindyn-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        text, note = _execute(args)
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except (UsageError, DocumentError, DomainError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OpinionDynamicsError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        if args.output:
            _write_atomic(args.output, text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    if note:
        print(note, file=sys.stderr)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
