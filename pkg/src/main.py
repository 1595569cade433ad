"""
src/main.py  -- command-line front end.

Subcommands:
  eval    run one mechanism on an instance file
  opt     optimal solution and full welfare table
  audit   strategyproofness audits (preferences, positions, joint)
  sweep   ratio / audit sweep over a random or exhaustive family
  gen     write instance files for a family
  bounds  θ-mechanism ratio bound

Reports are JSON on stdout; logs go to stderr.
Exit status: 0 ok, 1 finding (deviation or violated bound), 2 usage/input error.
"""

import argparse
import dataclasses
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from src.audit import audit_joint, audit_positions, audit_preferences, empirical_ratio
from src.config import settings
from src.generators import (
    ApprovalModel,
    RandomSpec,
    gen_deterministic_gap,
    gen_flip_sequence,
    gen_grid_family,
    gen_random,
    gen_randomized_gap,
)
from src.mechanisms import (
    MECHANISM_NAMES,
    GeneralMechanism,
    ThetaMechanism,
    balanced_theta,
    classify_general,
    classify_theta,
    get_mechanism,
    theta_ratio_bound,
)
from src.model import expected_social_welfare, parse_rational
from src.services.instance_io import (
    load_instance,
    load_random_spec,
    serialize_instance,
    write_instance,
)
from src.services.reporting import dump_report, rational
from src.services.sweep import run_sweep
from src.solver import optimal_solution

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FINDING = 1
EXIT_USAGE = 2

SINGLE_FAMILIES = ("deterministic-gap", "randomized-gap", "flip-sequence")
STREAM_FAMILIES = ("random", "grid")
# short names of the lower-bound families, accepted wherever the long ones are
FAMILY_ALIASES = {"thm1": "deterministic-gap", "thm2": "randomized-gap", "thm6": "flip-sequence"}


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _theta(args: argparse.Namespace) -> Fraction:
    return args.theta if args.theta is not None else settings.DEFAULT_THETA


def _emit(payload: Any) -> None:
    sys.stdout.write(dump_report(payload))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_eval(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    mechanism = get_mechanism(args.mech, _theta(args))
    lottery = mechanism.outcome(inst)
    payload: dict[str, Any] = {"mechanism": mechanism.name}
    if isinstance(mechanism, GeneralMechanism):
        payload["case"] = classify_general(inst)
    elif isinstance(mechanism, ThetaMechanism):
        payload["theta"] = mechanism.theta
        payload["case"] = classify_theta(inst, mechanism.theta)
    payload["lottery"] = lottery
    payload["expected_welfare"] = expected_social_welfare(inst, lottery)
    payload["ratio"] = empirical_ratio(mechanism, inst, str(args.instance)).ratio
    _emit(payload)
    return EXIT_OK


def cmd_opt(args: argparse.Namespace) -> int:
    result = optimal_solution(load_instance(args.instance))
    _emit(
        {
            "best": result.best,
            "opt_welfare": result.opt_welfare,
            "full_table": [
                {"facility": sol.facility, "location": rational(sol.location), "welfare": rational(w)}
                for sol, w in result.full_table
            ],
        }
    )
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    mechanism = get_mechanism(args.mech, _theta(args))
    instance_id = str(args.instance)
    reports = {"preferences": audit_preferences(mechanism, inst, instance_id)}
    if args.positions:
        reports["positions"] = audit_positions(mechanism, inst, args.denom, instance_id)
    if args.joint:
        reports["joint"] = audit_joint(mechanism, inst, args.denom, args.budget, instance_id)
    _emit(reports)
    return EXIT_FINDING if any(r.found for r in reports.values()) else EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    theta = _theta(args)
    mechanisms = [get_mechanism(name, theta) for name in args.mechs]

    if args.family == "random":
        spec_file = load_random_spec(args.spec) if args.spec else None
        spec = spec_file.to_spec(args.seed) if spec_file else RandomSpec(seed=args.seed)
        instances = gen_random(spec, args.count)
        echo: dict[str, Any] = {"family": "random", "count": args.count, **dataclasses.asdict(spec)}
    else:
        instances = gen_grid_family(args.n_max, args.k, args.denom, args.c_max)
        echo = {
            "family": "grid",
            "n_max": args.n_max,
            "k": args.k,
            "denominator": args.denom,
            "c_max": args.c_max,
        }
    echo.update(
        mechanisms=[m.name for m in mechanisms],
        theta=theta,
        audit=not args.skip_audit,
        position_denominator=args.positions,
    )

    report = run_sweep(
        instances,
        mechanisms,
        spec=echo,
        theta=theta,
        audit=not args.skip_audit,
        position_denominator=args.positions,
        workers=args.workers,
    )
    _emit(report)
    return EXIT_OK if report.ok else EXIT_FINDING


def cmd_gen(args: argparse.Namespace) -> int:
    family = FAMILY_ALIASES.get(args.family, args.family)
    if family in SINGLE_FAMILIES:
        if family == "deterministic-gap":
            inst = gen_deterministic_gap(args.k, args.eps, args.step)
        elif family == "randomized-gap":
            inst = gen_randomized_gap(args.k, args.eps, args.variant)
        else:
            inst = gen_flip_sequence(args.k, args.eps, args.step)
        if args.out:
            write_instance(inst, args.out)
        else:
            sys.stdout.write(serialize_instance(inst))
        return EXIT_OK

    if not args.out:
        raise ValueError(f"--out DIR is required for the {family} family")
    if family == "random":
        spec = RandomSpec(seed=args.seed, approval_model=args.approvals)
        if args.spec:
            spec = load_random_spec(args.spec).to_spec(args.seed)
        instances = gen_random(spec, args.count)
    else:
        instances = gen_grid_family(args.n_max, args.k, args.denom, args.c_max)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = 0
    for index, inst in enumerate(instances):
        write_instance(inst, out / f"instance-{index:06d}.json")
        written += 1
    logger.info("Wrote %d %s instances to %s", written, family, out)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    theta = _theta(args)
    _emit(
        {
            "theta": theta,
            "ratio_bound": theta_ratio_bound(theta),
            "inverse_theta": 1 / theta,
            "balanced_theta": f"{balanced_theta():.6f}",
        }
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facloc",
        description="Truthful single-facility location mechanisms with approval preferences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_mech(p: argparse.ArgumentParser, default: str | None = None) -> None:
        p.add_argument("--mech", choices=MECHANISM_NAMES, default=default, required=default is None)
        p.add_argument("--theta", type=_rational_arg, default=None,
                       help="θ for the theta mechanism (default FACLOC_DEFAULT_THETA)")

    p = sub.add_parser("eval", help="Run a mechanism on an instance file")
    add_mech(p)
    p.add_argument("--instance", required=True, type=Path)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("opt", help="Optimal solution and welfare table")
    p.add_argument("--instance", required=True, type=Path)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("audit", help="Search for profitable misreports")
    add_mech(p)
    p.add_argument("--instance", required=True, type=Path)
    p.add_argument("--positions", action="store_true", help="Also audit position misreports")
    p.add_argument("--joint", action="store_true", help="Also audit position x preference misreports")
    p.add_argument("--denom", type=int, default=settings.AUDIT_DENOMINATOR,
                   help="Grid denominator for position misreports")
    p.add_argument("--budget", type=int, default=settings.JOINT_BUDGET,
                   help="Joint misreports tried per agent")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", help="Ratio and audit sweep over a family")
    p.add_argument("--family", choices=STREAM_FAMILIES, default="random")
    p.add_argument("--spec", type=Path, default=None, help="Random spec JSON file")
    p.add_argument("--seed", type=int, default=settings.SWEEP_SEED)
    p.add_argument("--count", type=int, default=settings.SWEEP_COUNT)
    p.add_argument("--mechs", nargs="+", choices=MECHANISM_NAMES,
                   default=["general", "theta", "minisum"])
    p.add_argument("--theta", type=_rational_arg, default=None)
    p.add_argument("--skip-audit", action="store_true")
    p.add_argument("--positions", type=int, default=None, metavar="D",
                   help="Audit position misreports of position-independent mechanisms on the 1/D grid")
    p.add_argument("--workers", type=int, default=settings.THREADS)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--denom", type=int, default=4)
    p.add_argument("--c-max", type=int, default=2)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="Write instance files")
    p.add_argument("--family", required=True, choices=(*SINGLE_FAMILIES, *FAMILY_ALIASES, *STREAM_FAMILIES))
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--eps", type=_rational_arg, default=Fraction(1, 100))
    p.add_argument("--step", type=int, default=0)
    p.add_argument("--variant", choices=("I", "J"), default="I")
    p.add_argument("--seed", type=int, default=settings.SWEEP_SEED)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--spec", type=Path, default=None)
    p.add_argument("--approvals", choices=[m.value for m in ApprovalModel], default="nonempty")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--denom", type=int, default=4)
    p.add_argument("--c-max", type=int, default=2)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bounds", help="θ-mechanism approximation bound")
    p.add_argument("--theta", type=_rational_arg, default=None)
    p.set_defaults(func=cmd_bounds)

    return parser


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        logger.error("%s: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    sys.exit(run_command())


if __name__ == "__main__":
    main()
