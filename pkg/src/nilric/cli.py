"""Command-line interface: ``nilric {info,signatures,realize,sample,flow} ALGEBRA [options]``.

Exit codes: 0 ok, 1 usage or unknown algebra, 2 computation error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import central_series, center, derivations, derived_ideal, exact_derivation_dim
from .catalog import format_report, resolve, sample_metrics
from .curvature import ricci
from .errors import (
    MaxIterationsExceeded,
    NilricError,
    SignatureMismatch,
    TargetNotInTheoremSet,
    UnknownAlgebra,
)
from .invariants import SIGNATURE_TOL, SignatureTriple, conjecture_set, profile, signature, theorem_set
from .orbit_flow import FlowOptions, minimize, standard_decomposition, verify_kernel
from .realization import realize

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3

GLOBAL_DEFAULTS = {"tol": None, "seed": 0, "output": None, "json": False, "verbose": False}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _target(text: str) -> SignatureTriple:
    try:
        return SignatureTriple.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted both before and after the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, help=f"relative zero band for signatures (default {SIGNATURE_TOL:g}; "
                        "sample defaults to the rounding level)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--output", type=Path, help="also write the report to this file")
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="nilric", description="Ricci signatures of nilpotent Lie groups.", parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help):
        p = sub.add_parser(name, help=help, parents=[common])
        p.add_argument("algebra", help="builtin name, file path, or name in $NILRIC_CATALOG")
        return p

    add("info", "dimension, invariants, central series, derivations")
    p = add("signatures", "attainable Ricci signatures")
    p.add_argument("--conjecture", action="store_true", help="also list the conjectured set and the difference")
    p = add("realize", "construct a metric with a prescribed Ricci signature")
    p.add_argument("--target", type=_target, required=True, help="s-,s0,s+")
    p.add_argument("--delta-init", type=float, default=1e-2)
    p.add_argument("--newton-tol", type=float, default=1e-13)
    p.add_argument("--max-shrinks", type=int, default=6)
    p = add("sample", "signatures of random metrics")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p = add("flow", "orbit norm minimization over G_v")
    p.add_argument("--flow-tol", "--abs-tol", dest="flow_tol", type=float, default=None,
                   help="absolute residual tolerance (default 1e-9 * ||mu||^2)")
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--armijo-init", type=float, default=1e-1)
    p.add_argument("--restarts", type=int, default=5)
    return parser


# ------------------------------------------------------------------ commands


def _tol(args) -> float:
    return SIGNATURE_TOL if args.tol is None else args.tol


def cmd_info(name, mu, args):
    p = profile(mu)
    der = exact_derivation_dim(mu)
    if der is None:
        der = len(derivations(mu))
    rows = [
        ("algebra", name),
        ("dim", mu.dim),
        ("u", p.u),
        ("a", p.a),
        ("z", p.z),
        ("m", p.m),
        ("profile", list(p.as_tuple())),
        ("center_dim", center(mu).dim),
        ("derived_dim", derived_ideal(mu).dim),
        ("central_series", [S.dim for S in central_series(mu)]),
        ("der_dim", der),
    ]
    return rows, EXIT_OK


def cmd_signatures(name, mu, args):
    p = profile(mu)
    thm = sorted(theorem_set(p))
    rows = [("algebra", name), ("profile", list(p.as_tuple())), ("theorem_count", len(thm)), ("theorem_set", thm)]
    if args.conjecture:
        conj = sorted(conjecture_set(p))
        rows += [
            ("conjecture_count", len(conj)),
            ("conjecture_set", conj),
            ("difference", sorted(set(conj) - set(thm))),
        ]
    return rows, EXIT_OK


def cmd_realize(name, mu, args):
    res = realize(
        mu,
        args.target,
        tol=_tol(args),
        delta_init=args.delta_init,
        newton_tol=args.newton_tol,
        max_shrinks=args.max_shrinks,
        flow_opts=FlowOptions(seed=args.seed),
    )
    rows = [("algebra", name)] + res.fields()
    return rows, EXIT_OK if res.achieved == res.target else EXIT_VERIFY


def cmd_sample(name, mu, args):
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    rep = sample_metrics(mu, args.n, args.seed, name=name, tol=args.tol, workers=args.workers)
    return rep.fields(), EXIT_VERIFY if rep.violations else EXIT_OK


def cmd_flow(name, mu, args):
    spec = standard_decomposition(mu)
    opts = FlowOptions(
        tol=args.flow_tol, max_iter=args.max_iter, armijo_init=args.armijo_init, restarts=args.restarts, seed=args.seed
    )
    code = EXIT_OK
    try:
        rep = minimize(mu, spec, opts)
    except MaxIterationsExceeded as exc:
        rep, code = exc.report, EXIT_COMPUTE
        log.warning("%s", exc)
    ok = verify_kernel(rep, spec)
    if not ok and code == EXIT_OK:
        code = EXIT_VERIFY
    ric = ricci(rep.final_mu).matrix
    sig = signature(ric, _tol(args))
    rows = [
        ("algebra", name),
        ("subgroup_dims", list(spec.dims)),
        ("iterations", rep.iterations),
        ("restarts_used", rep.restarts_used),
        ("converged", rep.converged),
        ("residual", rep.residual),
        ("tolerance", rep.tol),
        ("initial_norm2", rep.norm_history[0]),
        ("final_norm2", rep.norm_history[-1]),
        ("kernel_verified", ok),
        ("kernel_dim", sig.s_zero),
        ("signature", sig),
        ("eigenvalues", np.linalg.eigvalsh(ric)),
        ("frame", rep.final_frame.h),
    ]
    return rows, code


COMMANDS = {
    "info": cmd_info,
    "signatures": cmd_signatures,
    "realize": cmd_realize,
    "sample": cmd_sample,
    "flow": cmd_flow,
}

log = logging.getLogger("nilric")


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.integer, np.floating, np.bool_)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(rows, as_json: bool) -> str:
    if as_json:
        return json.dumps({k: _jsonable(v) for k, v in rows}, indent=2) + "\n"
    return format_report(rows)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")

    try:
        name, mu = resolve(args.algebra)
    except UnknownAlgebra as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NilricError, ValueError) as exc:
        print(f"error: invalid algebra {args.algebra!r}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        rows, code = COMMANDS[args.command](name, mu, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TargetNotInTheoremSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except SignatureMismatch as exc:
        print(f"error: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (NilricError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    text = render(rows, args.json)
    sys.stdout.write(text)
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
