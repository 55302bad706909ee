"""``homc`` command line front end.

Every run prints one JSON report on stdout holding the command, an input
digest, every parameter (defaults included), the result and convergence
metadata.  Diagnostics go to stderr.  Exit codes: 0 success, 1 invalid
input, 2 non-convergence or singular system, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, chain_model, montecarlo
from .errors import HomcError, NonConvergenceError, SingularSystemError
from .tensorfile import read_tensor, to_document, write_tensor

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _context(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated states, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="homc", description="Higher-order Markov chain toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("-i", "--input", required=True, help="transition tensor file")
        p.add_argument("--stochastic-tol", type=float, default=chain_model.DEFAULT_STOCHASTIC_TOL)
        return p

    def with_output(p):
        p.add_argument("-o", "--output", help="write the result tensor to this file")
        return p

    command("validate", "check that the tensor is stochastic")
    with_output(command("kstep", "k-step transition tensor")).add_argument(
        "-k", type=int, required=True
    )
    for name in ("regular", "ergodic"):
        command(name, f"check whether the chain is {name}").add_argument("--kmax", type=int)
    with_output(command("reduce", "transition matrix of the reduced first-order chain"))

    p = command("stationary", "limiting probability distribution")
    p.add_argument("--tol", type=float, default=chain_model.DEFAULT_STATIONARY_TOL)
    p.add_argument("--max-iter", type=int, default=chain_model.DEFAULT_STATIONARY_MAX_ITER)

    for name in ("erp", "classify"):
        p = command(name, "ever-reaching probabilities" if name == "erp" else "classify states")
        p.add_argument("--tol", type=float, default=analysis.DEFAULT_ERP_TOL)
        p.add_argument("--max-terms", type=int, default=analysis.DEFAULT_MAX_TERMS)
        if name == "erp":
            with_output(p)
        else:
            p.add_argument("--class-tol", type=float, default=analysis.DEFAULT_CLASS_TOL)

    p = with_output(command("mfpt", "mean first passage time tensor"))
    p.add_argument("--method", choices=("direct", "iterative"), default="direct")
    p.add_argument("--tol", type=float, default=analysis.DEFAULT_MFPT_TOL)
    p.add_argument("--max-iter", type=int, default=analysis.DEFAULT_MFPT_MAX_ITER)
    p.add_argument("--mu0", help="initial iterate file (iterative method)")

    p = command("simulate", "Monte Carlo estimates from simulated trajectories")
    p.add_argument("--start", type=_context, required=True,
                   help="context states, current first, e.g. 1,1")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--estimate", choices=("kstep", "erp", "mfpt"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trajectories", type=int, default=10**4)
    p.add_argument("--horizon", type=int, help="default 1000 * n")
    p.add_argument("-k", type=int, help="step count for --estimate kstep")
    return parser


def _verdict(v: chain_model.ReachabilityVerdict) -> dict:
    return {"status": v.status, "witness_k": v.witness_k, "horizon": v.horizon}


def _run(args, p: chain_model.TransitionTensor):
    """Return ``(parameters, result, convergence, output_array)``."""
    cmd = args.command
    if cmd == "validate":
        return {}, {"valid": True, "order": p.order, "dim": p.dim}, {}, None
    if cmd == "kstep":
        t = chain_model.k_step_tensor(p, args.k)
        return {"k": args.k}, {"tensor": to_document(t)}, {}, t
    if cmd in ("regular", "ergodic"):
        kmax = chain_model.default_kmax(p.shape) if args.kmax is None else args.kmax
        check = chain_model.check_regular if cmd == "regular" else chain_model.check_ergodic
        v = check(p, kmax)
        return {"kmax": kmax}, {cmd: v.confirmed}, _verdict(v), None
    if cmd == "reduce":
        q = chain_model.reduced_chain_matrix(p)
        return {}, {"matrix": to_document(q)}, {}, q
    if cmd == "stationary":
        r = chain_model.stationary_distribution(p, args.tol, args.max_iter)
        params = {"tol": args.tol, "max_iter": args.max_iter, "method": "lazy power iteration"}
        result = {"pi": r.pi.tolist(), "y": r.y.tolist()}
        return params, result, {"iterations": r.iterations, "residual": r.residual}, None
    if cmd in ("erp", "classify"):
        er = analysis.ever_reaching(p, args.tol, args.max_terms)
        params = {"tol": args.tol, "max_terms": args.max_terms}
        conv = {"terms_used": er.terms_used, "converged": er.converged,
                "last_term_max": er.last_term_max}
        if cmd == "erp":
            return params, {"tensor": to_document(er.f)}, conv, er.f
        rep = analysis.classify_states(er, args.class_tol)
        params["class_tol"] = args.class_tol
        result = {"labels": list(rep.labels), "diagonal_values": rep.diagonal_values.tolist()}
        return params, result, conv, None
    if cmd == "mfpt":
        params = {"method": args.method}
        if args.method == "direct":
            r = analysis.mfpt_direct(p)
        else:
            mu0 = read_tensor(args.mu0) if args.mu0 else None
            params.update(tol=args.tol, max_iter=args.max_iter, mu0=args.mu0 or "ones")
            r = analysis.mfpt_iterative(p, mu0, args.tol, args.max_iter)
        conv = {"iterations": r.iterations, "residual_max": r.residual_max}
        return params, {"tensor": to_document(r.mu)}, conv, r.mu
    if cmd == "simulate":
        cfg = montecarlo.SimConfig(args.seed, args.trajectories, args.horizon)
        params = {"estimate": args.estimate, "start": list(args.start), "target": args.target,
                  "seed": args.seed, "trajectories": args.trajectories,
                  "horizon": cfg.horizon_for(p.dim), "rng": montecarlo.RNG_NAME}
        if args.estimate == "kstep":
            if args.k is None:
                raise ValueError("--estimate kstep needs -k")
            params["k"] = args.k
            est = montecarlo.estimate_kstep(p, args.start, args.target, args.k, cfg)
        elif args.estimate == "erp":
            est = montecarlo.estimate_ever_reach(p, args.start, args.target, cfg)
        else:
            est = montecarlo.estimate_mfpt(p, args.start, args.target, cfg)
        result = {"value": est.value, "standard_error": est.standard_error,
                  "samples": est.samples, "censored": est.censored}
        return params, result, {}, None
    raise ValueError(f"unknown command {cmd!r}")


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    report = {"command": ["homc", *argv]}
    try:
        raw = Path(args.input).read_bytes()
        report["input"] = {"path": args.input, "sha256": hashlib.sha256(raw).hexdigest()}
        p = chain_model.validate_transition_tensor(read_tensor(args.input), args.stochastic_tol)
        params, result, conv, out = _run(args, p)
        if getattr(args, "output", None) and out is not None:
            write_tensor(args.output, out)
            params["output"] = args.output
    except OSError as exc:
        return _fail(report, exc, EXIT_IO)
    except (NonConvergenceError, SingularSystemError) as exc:
        return _fail(report, exc, EXIT_NUMERIC)
    except (HomcError, ValueError) as exc:
        return _fail(report, exc, EXIT_INPUT)
    report["parameters"] = {"stochastic_tol": args.stochastic_tol, **params}
    report["result"] = result
    report["convergence"] = conv
    report["wall_time_s"] = time.perf_counter() - start
    print(json.dumps(report, default=_jsonable))
    return EXIT_OK


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _fail(report: dict, exc: Exception, code: int) -> int:
    err = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("block", "residual", "iterations", "context"):
        if getattr(exc, attr, None) is not None:
            err[attr] = getattr(exc, attr)
    report["error"] = err
    print(f"homc: {err['type']}: {exc}", file=sys.stderr)
    print(json.dumps(report, default=_jsonable))
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
