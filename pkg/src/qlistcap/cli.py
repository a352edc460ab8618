"""Command-line front end.

Every command emits a JSON report (stdout, or the ``--report`` path)::

    {"command": ..., "config": {...}, "seed": ..., "versions": {...},
     "timings": {"seconds": ...}, "result": {...}}

Re-running with the echoed config reproduces the report exactly, apart from
``timings``.  Exit codes: 0 success / is a code / list found, 1 negative
answer (not a code, not found, unknown), 2 invalid parameter values,
3 infeasible attack parameters, 64 usage error, 65 malformed input data.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .adversary import AttackConfig, attack, greedy_baseline
from .bounds import known_bounds, theorem1_threshold, theorem2_lower_n
from .construct import construction_plan, find_min_code, random_code
from .core import (
    MatrixFormatError,
    Phase,
    PhasedDistribution,
    as_rows,
    format_matrix,
    load_matrix,
    parse_ensemble,
)
from .coupon import (
    HypothesisViolation,
    Lemma4Params,
    NonpositivePhaseSize,
    PhaseEnsembleSpec,
    ell_sequence,
    exact_phased_expectation,
    lemma4_bound,
    mc_phased_expectation,
    parse_pmf,
    phase_sizes_g,
)
from .sampler import SamplerParams, check_sampler_exact, check_sampler_sampled
from .verifier import confusable_by_output, is_list_decoding, rate

EXIT_NEGATIVE = 1
EXIT_DOMAIN = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _matrix(path):
    try:
        return load_matrix(path)
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    except MatrixFormatError as exc:
        raise DataError(f"{path}: {exc}") from exc


def _rows1(rows) -> list[int]:
    return [int(r) + 1 for r in sorted(rows)]


# -- commands -----------------------------------------------------------------


def cmd_verify(args):
    C = _matrix(args.matrix)
    if args.oracle:
        verdict = confusable_by_output(C, args.list_size)
    else:
        verdict = is_list_decoding(C, args.list_size, workers=args.workers)
    result = {
        "m": C.m,
        "n": C.n,
        "q": C.q,
        "list_size": args.list_size,
        "decider": "output-enumeration" if args.oracle else "subset-search",
        "is_code": verdict.is_code,
        "witness": None if verdict.is_code else _rows1(verdict.witness),
        "output_word": list(verdict.output_word) if verdict.output_word else None,
    }
    if verdict.is_code and C.m > args.list_size:
        result["rate"] = rate(C.m, C.n, args.list_size)
    return result, 0 if verdict.is_code else EXIT_NEGATIVE


def cmd_construct(args):
    n = args.n
    plan = None
    if n is None:
        if args.list_size is None:
            raise UsageError("construct needs --n, or --list-size (with --target-failure)")
        plan = construction_plan(args.m, args.q, args.list_size, args.target_failure)
        n = plan.n_required
    C = random_code(args.m, n, args.q, args.seed)
    text = format_matrix(C)
    if args.out:
        Path(args.out).write_text(text)
    result = {"m": args.m, "n": n, "q": args.q, "out": args.out}
    if plan is not None:
        result["plan"] = {
            "list_size": plan.ell,
            "target_failure": plan.target_failure,
            "failure_bound": float(plan.failure_bound),
        }
    if not args.out:
        result["matrix"] = text
    return result, 0


def cmd_min_n(args):
    res = find_min_code(args.m, args.q, args.list_size, args.budget)
    result = {
        "m": args.m,
        "q": args.q,
        "list_size": args.list_size,
        "n": res.n if res.known else "unknown",
        "nodes": res.nodes,
        "refuted_lengths": res.refuted,
        "matrix": format_matrix(res.matrix) if res.matrix is not None else None,
    }
    return result, 0 if res.known else EXIT_NEGATIVE


def _pmf(text, q):
    if text.startswith("@"):
        w = np.loadtxt(text[1:], dtype=float).ravel()
        if w.shape != (q,) or np.any(w < 0) or w.sum() <= 0:
            raise DataError(f"{text[1:]}: expected {q} nonnegative weights")
        return w / w.sum()
    try:
        return parse_pmf(text, q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _phase_spec(args) -> PhaseEnsembleSpec:
    if not args.phase:
        raise UsageError("give at least one --phase DRAWS:DIST")
    draws, pmfs = [], []
    for item in args.phase:
        a, _, dist = item.partition(":")
        try:
            draws.append(int(a))
        except ValueError:
            raise UsageError(f"bad --phase {item!r}") from None
        pmfs.append(_pmf(dist or "uniform", args.q))
    return PhaseEnsembleSpec(args.q, draws, pmfs)


def cmd_cc(args):
    what = args.what
    if what == "exact":
        spec = _phase_spec(args)
        return {"q": spec.q, "draws": spec.draws, "expectation": exact_phased_expectation(spec)}, 0
    if what == "mc":
        spec = _phase_spec(args)
        mean, se = mc_phased_expectation(spec, args.trials, args.seed, workers=args.workers)
        return {
            "q": spec.q,
            "draws": spec.draws,
            "trials": args.trials,
            "mean": mean,
            "std_error": se,
            "exact": exact_phased_expectation(spec),
        }, 0
    if what == "bound":
        spec = _phase_spec(args)
        r = lemma4_bound(spec, Lemma4Params(args.epsilon, args.lam))
        return {"bound": r.bound, "exact": r.exact, "holds": r.holds, "slack": r.slack, "heavy_set_size": r.heavy_set_size}, 0
    if what == "ell-seq":
        s = ell_sequence(args.q, args.k)
        return {"ell": s.ell.tolist(), "prefix": s.prefix.tolist(), "closed_form": s.closed_form.tolist()}, 0
    if what == "phase-g":
        g, pref = phase_sizes_g(args.q, args.gamma, args.k, args.variant)
        return {"g": g.tolist(), "prefix": pref.tolist(), "variant": args.variant}, 0
    raise UsageError(f"unknown cc mode {what}")


def cmd_sampler_check(args):
    C = _matrix(args.matrix)
    try:
        ens = parse_ensemble(Path(args.ensemble).read_text(), C.m)
    except OSError as exc:
        raise DataError(f"{args.ensemble}: {exc.strerror}") from exc
    except MatrixFormatError as exc:
        raise DataError(f"{args.ensemble}: {exc}") from exc
    h = args.column - 1
    if not 0 <= h < C.n:
        raise DataError(f"column {args.column} outside 1..{C.n}")
    universe = as_rows(range(C.m))
    if args.phase_sizes:
        sizes = [int(v) for v in args.phase_sizes.split(",")]
    else:
        sizes = [len(ens[0])]
    D = PhasedDistribution([Phase.uniform(universe, g) for g in sizes])
    params = SamplerParams(args.gamma, args.delta)
    if args.exact:
        rep = check_sampler_exact(ens, h, D, C, params, workers=args.workers)
    else:
        rep = check_sampler_sampled(ens, h, D, C, params, args.samples, args.seed)
    result = {
        "is_sampler": rep.is_sampler,
        "max_failure_fraction": rep.max_failure_fraction,
        "threshold": rep.threshold,
        "worst_wt": list(rep.worst_wt.bits),
        "weights_checked": rep.num_weights,
        "note": rep.note,
        "reference_phase_sizes": sizes,
    }
    return result, 0 if rep.is_sampler else EXIT_NEGATIVE


def cmd_attack(args):
    C = _matrix(args.matrix)
    cfg = AttackConfig(
        epsilon=args.epsilon,
        k=args.iterations,
        ensemble_size=args.ensemble_size,
        seed=args.seed,
        gamma=args.gamma,
        gamma_prime=args.gamma_prime,
        delta=args.delta,
        delta_prime=args.delta_prime,
        g_variant=args.g_variant,
        num_wt=args.num_wt,
        target=args.target,
        phase_sizes=tuple(int(v) for v in args.phase_sizes.split(",")) if args.phase_sizes else None,
    )
    run = greedy_baseline if args.baseline else attack
    out = run(C, cfg)
    result = out.to_dict()
    result["procedure"] = "greedy-baseline" if args.baseline else "ensemble"
    result["resolved"] = cfg.resolve(C.q)
    if out.list is not None:
        result["list"] = _rows1(out.list)
    code = {"found": 0, "not-found": EXIT_NEGATIVE, "parameter-infeasible": EXIT_INFEASIBLE}[out.status]
    return result, code


def cmd_bounds(args):
    iv = known_bounds(args.q, args.list_size)
    result = {"q": args.q, "list_size": args.list_size, "interval": None}
    if iv is not None:
        result["interval"] = {"lower": iv.lower, "upper": iv.upper, "source": iv.source}
    if args.epsilon is not None:
        result["single_set_threshold"] = theorem1_threshold(args.q, args.epsilon)
        if 0 < args.epsilon < 1 / 6 and args.m:
            result["length_bound_shape"] = theorem2_lower_n(args.m, args.q, args.epsilon)
    return result, 0 if iv is not None else EXIT_NEGATIVE


def cmd_rate(args):
    return {"m": args.m, "n": args.n, "list_size": args.list_size, "rate": rate(args.m, args.n, args.list_size)}, 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qlistcap", description=__doc__.split("\n")[0])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("verify", help="decide the list-decoding property")
    s.add_argument("--matrix", required=True)
    s.add_argument("--list-size", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="use brute force over output words")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("construct", help="random code (optionally sized by the union bound)")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--list-size", type=int)
    s.add_argument("--target-failure", type=float, default=0.1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("min-n", help="exact minimum length by exhaustive search")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--list-size", type=int, required=True)
    s.add_argument("--budget", type=int, default=10**6)
    s.set_defaults(func=cmd_min_n)

    s = sub.add_parser("cc", help="coupon-collector calculations")
    s.add_argument("what", choices=["exact", "mc", "bound", "ell-seq", "phase-g"])
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--phase", action="append", help="DRAWS:DIST, DIST = uniform | zipf:s | point:x | @file")
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--epsilon", type=float, default=0.3)
    s.add_argument("--lam", type=float, default=0.05)
    s.add_argument("--k", type=int, default=10)
    s.add_argument("--gamma", type=float, default=0.0)
    s.add_argument("--variant", choices=["cumulative", "as-written"], default="cumulative")
    s.set_defaults(func=cmd_cc)

    s = sub.add_parser("sampler-check", help="check the sampler condition for one column")
    s.add_argument("--matrix", required=True)
    s.add_argument("--column", type=int, required=True, help="1-based column index")
    s.add_argument("--ensemble", required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--phase-sizes", help="comma-separated reference draw counts (uniform over all rows)")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--samples", type=int, default=256)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_sampler_check)

    s = sub.add_parser("attack", help="search for a confusable list")
    s.add_argument("--matrix", required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--iterations", type=int, required=True)
    s.add_argument("--ensemble-size", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--baseline", action="store_true")
    s.add_argument("--g-variant", choices=["cumulative", "as-written"], default="cumulative")
    s.add_argument("--gamma", type=float)
    s.add_argument("--gamma-prime", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--delta-prime", type=float)
    s.add_argument("--num-wt", type=int, default=256)
    s.add_argument("--target", type=int)
    s.add_argument("--phase-sizes", help="comma-separated explicit phase sizes")
    s.set_defaults(func=cmd_attack)

    s = sub.add_parser("bounds", help="known capacity bounds")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--list-size", type=int, required=True)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--m", type=int)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("rate", help="zero-error list rate log2(m / l) / n")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--list-size", type=int, required=True)
    s.set_defaults(func=cmd_rate)
    return p


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "report")}


def dispatch(argv=None) -> tuple[int, dict | None]:
    """Run one command; returns ``(exit_code, report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    t0 = time.perf_counter()
    try:
        result, code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA, None
    except (NonpositivePhaseSize, HypothesisViolation) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE, None
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN, None
    report = {
        "command": args.command,
        "config": _config(args),
        "seed": getattr(args, "seed", None),
        "versions": {"qlistcap": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "timings": {"seconds": time.perf_counter() - t0},
        "result": result,
    }
    text = json.dumps(report, indent=2, default=_json_default) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return code, report


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def main(argv=None) -> int:
    code, _ = dispatch(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
