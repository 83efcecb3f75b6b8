"""Command-line front end: ``qdb {run,bounds,ingest,validate,instances}``."""
from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from typing import List, Optional, Sequence

from .analysis import CHECKS, BoundsConfig, concentration_check, regret_constants
from .core import InvalidArgumentError
from .instances import BUILTINS, LetorParseError, build_letor_instance, instance_to_dict, parse_letor, resolve_instance
from .sampling import RngState
from .simulator import RegretAggregate, RunConfig, run_many

CSV_HEADER = "t,policy,regret_condorcet_mean,regret_condorcet_std,regret_borda_mean,regret_borda_std,runs"
LEMMA_ALIASES = {"1": "lemma1", "2": "lemma2", "3": "lemma3", "4": "lemma4", "c1": "corollary1"}


def _num(x: float) -> str:
    return format(float(x), ".15g")


def emit_csv(agg: RegretAggregate) -> str:
    lines = [CSV_HEADER]
    for k, t in enumerate(agg.checkpoints):
        if agg.condorcet_mean is None:
            cm = cs = ""
        else:
            cm, cs = _num(agg.condorcet_mean[k]), _num(agg.condorcet_std[k])
        lines.append(
            f"{int(t)},{agg.policy},{cm},{cs},{_num(agg.borda_mean[k])},{_num(agg.borda_std[k])},{agg.runs}"
        )
    return "\n".join(lines) + "\n"


def _write_output(text: str, path: Optional[str]) -> None:
    """Write atomically so that a failure never leaves a partial file."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qdb-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_run(args) -> int:
    instance = resolve_instance(args.instance)
    options = {}
    if args.policy in ("tcs", "tbs"):
        options["t0"] = args.t0
        if args.policy == "tcs":
            options["resample_cap"] = args.resample_cap
    elif args.policy == "bucb":
        options.update(alpha=args.alpha, tau=args.tau, epsilon_prime=args.epsilon_prime)
    elif args.policy == "duel-reduction":
        options["duel_alpha"] = args.duel_alpha
    cfg = RunConfig(
        instance=instance,
        policy=args.policy,
        policy_options=options,
        horizon=args.horizon,
        base_seed=args.seed,
        replications=args.runs,
        checkpoints=args.checkpoints,
    )
    _write_output(emit_csv(run_many(cfg)), args.out)
    return 0


def cmd_bounds(args) -> int:
    instance = resolve_instance(args.instance)
    cfg = BoundsConfig(epsilon=args.epsilon, epsilon_prime=args.epsilon_prime, delta=args.delta)
    report = regret_constants(instance, cfg)
    _write_output(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_ingest(args) -> int:
    with open(args.letor) as f:
        ds = parse_letor(f, levels=args.levels)
    instance = build_letor_instance(ds, args.features, levels=args.levels)
    _write_output(json.dumps(instance_to_dict(instance), indent=2) + "\n", args.out)
    return 0


def cmd_validate(args) -> int:
    kind = LEMMA_ALIASES.get(args.lemma, args.lemma)
    if kind not in CHECKS:
        raise InvalidArgumentError(f"unknown lemma {args.lemma!r}")
    P = args.dist or [1 / 3] * 3
    rng = RngState(args.seed)
    out = io.StringIO()
    out.write(f"{'check':<11} {'n':>6} {'eps':>8} {'empirical':>12} {'bound':>12}  result\n")
    ok = True
    for n in args.n:
        for eps in args.eps:
            r = concentration_check(kind, P, n, eps, args.trials, rng)
            if not r.informative:
                status = "pass (vacuous)"
            else:
                status = "pass" if r.passed else "FAIL"
                ok &= r.passed
            out.write(f"{kind:<11} {n:>6} {eps:>8.4g} {r.empirical_tail:>12.6g} {r.bound:>12.6g}  {status}\n")
    _write_output(out.getvalue(), args.out)
    return 0 if ok else 1


def cmd_instances(args) -> int:
    lines = []
    for name in sorted(BUILTINS):
        inst = BUILTINS[name]()
        lines.append(f"{name:<14} K={inst.K:<3} L={inst.L}")
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdb", description="Qualitative dueling bandit experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a policy and write a regret CSV")
    run.add_argument("--instance", required=True, help="built-in name or instance JSON path")
    run.add_argument("--policy", required=True, choices=["tcs", "tbs", "bucb", "duel-reduction"])
    run.add_argument("--horizon", type=int, required=True)
    run.add_argument("--runs", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--checkpoints", type=_int_list, default=None)
    run.add_argument("--t0", type=int, default=10)
    run.add_argument("--resample-cap", type=int, default=1000)
    run.add_argument("--tau", type=int, default=1)
    run.add_argument("--alpha", type=float, default=None)
    run.add_argument("--epsilon-prime", type=float, default=0.1)
    run.add_argument("--duel-alpha", type=float, default=0.51)
    run.add_argument("--out", default=None)
    run.set_defaults(func=cmd_run)

    bounds = sub.add_parser("bounds", help="regret-bound constants as JSON")
    bounds.add_argument("--instance", required=True)
    bounds.add_argument("--delta", type=float, default=0.15)
    bounds.add_argument("--epsilon", type=float, default=0.1)
    bounds.add_argument("--epsilon-prime", type=float, default=0.1)
    bounds.add_argument("--out", default=None)
    bounds.set_defaults(func=cmd_bounds)

    ingest = sub.add_parser("ingest", help="LETOR file to instance JSON")
    ingest.add_argument("--letor", required=True)
    ingest.add_argument("--features", type=_int_list, required=True)
    ingest.add_argument("--levels", type=int, default=None)
    ingest.add_argument("--out", default=None)
    ingest.set_defaults(func=cmd_ingest)

    validate = sub.add_parser("validate", help="Monte-Carlo check of a concentration inequality")
    validate.add_argument("--lemma", required=True, choices=sorted(LEMMA_ALIASES) + list(CHECKS))
    validate.add_argument("--n", type=_int_list, default=[100])
    validate.add_argument("--eps", type=_float_list, default=[0.2])
    validate.add_argument("--trials", type=int, default=100_000)
    validate.add_argument("--dist", type=_float_list, default=None, help="comma-separated distribution")
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument("--out", default=None)
    validate.set_defaults(func=cmd_validate)

    inst = sub.add_parser("instances", help="list built-in instances")
    inst.add_argument("--out", default=None)
    inst.set_defaults(func=cmd_instances)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="qdb: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidArgumentError, LetorParseError, ValueError, OSError) as exc:
        print(f"qdb {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
