"""Command-line interface.

One executable, subcommand per operation, machine-readable JSON on stdout
(or ``--out FILE``). Exit codes: 0 success, 1 domain error (with a JSON
error object), 2 theorem violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import conjecture, decompose, metrics, serialize
from .conjecture import SearchConfig
from .errors import DomainError, PreconditionViolated, TheoremViolation
from .linalg import maximally_mixed
from .metrics import ClassicalDistribution


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}error: {message}")


def _parse_probs(text: str) -> ClassicalDistribution:
    try:
        values = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise PreconditionViolated(f"cannot parse probabilities {text!r}") from exc
    return ClassicalDistribution(np.array(values))


def _load_matrix(path: str):
    return serialize.matrix_from_obj(serialize.read_json(path))


def _load_pair(path: str):
    return serialize.pair_from_obj(serialize.read_json(path))


def _search_config(args, objective: str = "delta") -> SearchConfig:
    cfg = SearchConfig(seed=args.seed, objective=objective)
    if getattr(args, "gap_tol", None) is not None:
        cfg = replace(cfg, gap_tol=args.gap_tol)
    if getattr(args, "feas_tol", None) is not None:
        cfg = replace(cfg, feas_tol=args.feas_tol)
    if getattr(args, "extra_states", None):
        cfg = replace(cfg, extra_states=args.extra_states)
    if getattr(args, "restarts", None) is not None:
        cfg = replace(cfg, restarts=args.restarts)
    return cfg


# -- handlers -------------------------------------------------------------------


def _cmd_bounds(args):
    rep = metrics.bounds(_load_matrix(args.rho), _load_matrix(args.sigma))
    return 0, {"lower": rep.lower, "upper": rep.upper, "hs_product": rep.hs_product}


def _cmd_delta(args):
    pair = _load_pair(args.pair)
    rep = metrics.bounds(pair.left.target, pair.right.target)
    return 0, {
        "delta_avg": pair.delta_avg,
        "hs_product": pair.hs_product,
        "max_deviation": pair.max_deviation,
        "lower": rep.lower,
        "upper": rep.upper,
    }


def _cmd_pencil(args):
    p = _parse_probs(args.p)
    q = _parse_probs(args.q)
    return 0, {
        "delta_c": metrics.classical_variation_distance(p, q),
        "p_diff": metrics.collision_complement(p, q),
    }


def _cmd_game(args):
    pair = _load_pair(args.pair)
    rate = metrics.simulate_game(pair.left, pair.right, args.shots, args.seed)
    return 0, {
        "success_rate": rate,
        "shots": args.shots,
        "seed": args.seed,
        "delta_avg": pair.delta_avg,
        "expected_rate": (1.0 + pair.delta_avg) / 2.0,
    }


def _cmd_unbiased(args):
    rho = _load_matrix(args.rho)
    if args.variant == "maxmixed":
        if args.sigma is not None:
            sigma = _load_matrix(args.sigma)
            off = np.max(np.abs(sigma.matrix - maximally_mixed(rho.dim).matrix))
            if off > 1e-9:
                raise PreconditionViolated(
                    f"maxmixed requires sigma = I/d (entries off by {off:.3e})"
                )
        pair = decompose.max_mixed_pair(rho)
    else:
        if args.sigma is None:
            raise PreconditionViolated(f"{args.variant} requires --sigma")
        sigma = _load_matrix(args.sigma)
        if args.variant == "qubit":
            pair = decompose.qubit_pair(rho, sigma)
        elif args.variant == "pure-sigma":
            pair = decompose.pure_sigma_pair(rho, sigma, tol=args.tol, seed=args.seed)
        else:
            pair = decompose.rank2_sigma_pair(rho, sigma, tol=args.tol, seed=args.seed)
    return 0, serialize.pair_to_obj(pair)


def _cmd_verify(args):
    rep = decompose.verify_pair(_load_pair(args.pair), tol=args.tol)
    return 0, serialize.verification_to_obj(rep)


def _cmd_search(args):
    rho = _load_matrix(args.rho)
    sigma = _load_matrix(args.sigma)
    pair, report = conjecture.search_unbiased(rho, sigma, _search_config(args, args.objective))
    obj = serialize.pair_to_obj(pair)
    obj["report"] = serialize.trial_report_to_obj(report, include_timing=args.timing)
    sandwiched = (
        report.lower - conjecture.SANDWICH_SLACK
        <= report.best_delta
        <= report.upper + conjecture.SANDWICH_SLACK
    )
    return (0 if sandwiched else 2), obj


def _cmd_fixed_sigma(args):
    rho = _load_matrix(args.rho)
    sigma_decomp = serialize.decomposition_from_obj(serialize.read_json(args.sigma_decomp))
    report = conjecture.fixed_sigma_feasibility(rho, sigma_decomp, _search_config(args, "deviation"))
    return 0, serialize.trial_report_to_obj(report, include_timing=args.timing)


def _cmd_fuzz(args):
    dims = [int(x) for x in args.dims.split(",") if x.strip() != ""]
    result = conjecture.fuzz(
        dims, args.trials, args.seed, _search_config(args), jobs=args.jobs
    )
    code = 2 if result.summary["sandwich_violations"] else 0
    return code, serialize.fuzz_result_to_obj(result, include_timing=args.timing)


def _cmd_contextuality(args):
    return 0, serialize.contextuality_to_obj(conjecture.contextuality_gap(args.dim))


def _cmd_random_state(args):
    rank = args.rank if args.rank is not None else args.dim
    dm = conjecture.random_density(args.dim, rank, args.seed)
    return 0, serialize.matrix_to_obj(dm)


def build_parser() -> _Parser:
    parser = _Parser(prog="qdecomp", description="Discrimination distances and unbiased decompositions of density matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        p.add_argument("--out", help="write JSON to this file instead of stdout")
        return p

    p = add("bounds", _cmd_bounds, help="trace-distance lower and sqrt(1-tr(rho sigma)) upper bound")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)

    p = add("delta", _cmd_delta, help="average trace distance of a decomposition pair file")
    p.add_argument("--pair", required=True)

    p = add("pencil", _cmd_pencil, help="classical distribution distances")
    p.add_argument("--p", required=True, help="comma-separated probabilities")
    p.add_argument("--q", required=True, help="comma-separated probabilities")

    p = add("game", _cmd_game, help="Monte Carlo of the discrimination game for a pair file")
    p.add_argument("--pair", required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("unbiased", _cmd_unbiased, help="constructive unbiased decomposition pairs")
    p.add_argument("variant", choices=["qubit", "maxmixed", "pure-sigma", "rank2"])
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)

    p = add("verify", _cmd_verify, help="recheck a pair file's certificate")
    p.add_argument("--pair", required=True)
    p.add_argument("--tol", type=float, default=1e-7)

    p = add("search", _cmd_search, help="numerical search for an unbiased pair")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap-tol", type=float, dest="gap_tol")
    p.add_argument("--extra-states", type=int, dest="extra_states", default=0)
    p.add_argument("--restarts", type=int)
    p.add_argument("--objective", choices=["delta", "deviation"], default="delta")
    p.add_argument("--timing", action="store_true", help="include wall times in the report")

    p = add("fixed-sigma", _cmd_fixed_sigma, help="feasibility hunt against a fixed sigma decomposition")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma-decomp", dest="sigma_decomp", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--feas-tol", type=float, dest="feas_tol")
    p.add_argument("--extra-states", type=int, dest="extra_states", default=0)
    p.add_argument("--restarts", type=int)
    p.add_argument("--timing", action="store_true")

    p = add("fuzz", _cmd_fuzz, help="batch random searches with sandwich verification")
    p.add_argument("--dims", required=True, help="comma-separated dimensions")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap-tol", type=float, dest="gap_tol")
    p.add_argument("--extra-states", type=int, dest="extra_states", default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true")

    p = add("contextuality", _cmd_contextuality, help="unbiased vs identical-decomposition averages for I/d")
    p.add_argument("--dim", type=int, required=True)

    p = add("random-state", _cmd_random_state, help="sample a random density matrix")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rank", type=int)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _write(args, payload) -> None:
    text = serialize.dumps(payload)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 64
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        code, payload = args.handler(args)
    except DomainError as exc:
        _write(args, {"error": exc.code, "detail": str(exc)})
        return 1
    except TheoremViolation as exc:
        _write(args, {"error": exc.code, "detail": str(exc)})
        return 2
    _write(args, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
