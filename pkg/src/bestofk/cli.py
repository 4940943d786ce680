"""Command-line surface tying the modules together.

Exit codes: 0 success, 1 invalid parameters, 2 runtime/resource failure,
3 a verification check failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import sys

import numpy as np

from . import recursion as rec
from .dual_dag import build_voting_dag, random_leaf_colours, root_colour_probability
from .dynamics import TieRule
from .errors import (
    EdgeListFormatError,
    GenerationError,
    InvalidInputError,
    InvalidParameterError,
    ResourceLimitError,
    VerificationError,
)
from .harness import (
    ExperimentSpec,
    GraphSpec,
    run_duality_experiment,
    run_forward_experiment,
    summary_to_csv,
    summary_to_json,
)
from .opinions import BLUE, RED
from .reduction import (
    TernaryTree,
    check_blue_threshold,
    reduce_to_ternary,
    tree_root_colour,
)
from .rng import make_rng, subseed
from .sprinkling import check_majorisation, coupled_colouring, independence_certificate, sprinkle


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, choices=["complete", "regular", "gnp", "file"])
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int, help="degree for regular graphs; min degree for gnp")
    p.add_argument("--p", type=float, help="edge probability for gnp graphs")
    p.add_argument("--path", help="edge-list file for --graph file")


def _graph_spec(args) -> GraphSpec:
    return GraphSpec(kind=args.graph, n=args.n, d=args.d, p=args.p, path=args.path)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def build_parser() -> _Parser:
    parser = _Parser(prog="bestofk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="forward voting experiment")
    _add_graph_args(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--k", type=int, choices=[1, 2, 3], required=True)
    p.add_argument("--tie", choices=["keep", "random"], default="keep")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--max-steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("dual", help="Monte Carlo root-colour estimate on the voting DAG")
    _add_graph_args(p)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("duality-check", help="compare forward and DAG estimates")
    _add_graph_args(p)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--confidence", type=float, default=0.99)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sprinkle-demo", help="sprinkle one DAG and verify the coupling")
    _add_graph_args(p)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--cut", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--colourings", type=int, default=100)

    p = sub.add_parser("reduce-check", help="ternary-reduction certificate checks")
    _add_graph_args(p)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("recursion", help="evaluate the analytic recursions")
    p.add_argument("mode", choices=["ideal", "sprinkled", "delta", "plan"])
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="property verification")
    verify_sub = p.add_subparsers(dest="check", required=True)
    p2 = verify_sub.add_parser("lemma2", help="blue-leaf threshold check on ternary trees")
    p2.add_argument("--height", type=int, required=True, choices=[1, 2, 3])
    p2.add_argument("--trials", type=int, default=100_000)
    p2.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_simulate(args) -> int:
    spec = ExperimentSpec(graph=_graph_spec(args), delta=args.delta, trials=args.trials,
                          max_steps=args.max_steps, seed=args.seed, k=args.k,
                          tie_rule=TieRule(args.tie), workers=args.workers)
    summary = run_forward_experiment(spec)
    text = summary_to_csv(summary) if args.format == "csv" else summary_to_json(summary)
    _write(args.out, text)
    print(f"wrote {args.out}: {len(summary.trials)} trials, "
          f"red_win_fraction={summary.red_win_fraction!r}")
    return 0


def _cmd_dual(args) -> int:
    graph = _graph_spec(args).build(subseed(args.seed, 0))
    est = root_colour_probability(graph, args.root, args.height, 0.5 - args.delta,
                                  args.trials, subseed(args.seed, 2))
    if args.format == "csv":
        text = ("trials,blue,estimate,ci_low,ci_high,confidence\n"
                f"{est.trials},{est.successes},{est.estimate!r},"
                f"{est.ci_low!r},{est.ci_high!r},{est.confidence!r}\n")
    else:
        text = json.dumps(dataclasses.asdict(est), indent=2) + "\n"
    _write(args.out, text)
    print(f"wrote {args.out}: estimate={est.estimate!r}")
    return 0


def _cmd_duality_check(args) -> int:
    report = run_duality_experiment(_graph_spec(args), args.root, args.height, args.delta,
                                    args.trials, args.seed, confidence=args.confidence,
                                    workers=args.workers)
    print(f"forward estimate {report.forward.estimate!r} "
          f"ci [{report.forward.ci_low!r}, {report.forward.ci_high!r}]")
    print(f"dual    estimate {report.dual.estimate!r} "
          f"ci [{report.dual.ci_low!r}, {report.dual.ci_high!r}]")
    print(f"overlap {str(report.overlap).lower()}")
    if not report.overlap:
        raise VerificationError("forward and dual confidence intervals do not overlap")
    return 0


def _cmd_sprinkle_demo(args) -> int:
    graph = _graph_spec(args).build(subseed(args.seed, 0))
    dag = build_voting_dag(graph, args.root, args.height, make_rng(subseed(args.seed, 1)))
    sprinkled = sprinkle(dag, args.cut)
    print(f"levels {dag.level_sizes} -> {sprinkled.dag.level_sizes}")
    print(f"redirected edges: {len(sprinkled.redirected_edges)}")
    failures = 0
    for i in range(args.colourings):
        rng = make_rng(subseed(args.seed, 2), i)
        leaf_colours = random_leaf_colours(dag, 0.5, rng)
        base_colours, out_colours = coupled_colouring(sprinkled, leaf_colours)
        if not check_majorisation(sprinkled, base_colours, out_colours):
            failures += 1
    cert = independence_certificate(sprinkled, args.cut)
    print(f"majorisation holds in {args.colourings - failures}/{args.colourings} colourings")
    print(f"leaf supports at cut disjoint: {str(cert.pairwise_disjoint).lower()}")
    if failures or not cert.pairwise_disjoint:
        raise VerificationError("sprinkling coupling check failed")
    return 0


def _cmd_reduce_check(args) -> int:
    graph = _graph_spec(args).build(subseed(args.seed, 0))
    base = subseed(args.seed, 1)
    root_mismatches = 0
    bound_violations = 0
    for trial in range(args.trials):
        rng = make_rng(base, trial)
        dag = build_voting_dag(graph, args.root, args.height, rng)
        leaf_colours = random_leaf_colours(dag, 0.5, rng)
        _, report = reduce_to_ternary(dag, leaf_colours)
        if report.root_colour_out != report.root_colour_in:
            root_mismatches += 1
        if report.blue_leaves_out > report.bound:
            bound_violations += 1
    print(f"trials {args.trials}: root mismatches {root_mismatches}, "
          f"budget violations {bound_violations}")
    if root_mismatches or bound_violations:
        raise VerificationError("ternary-reduction certificate check failed")
    return 0


def _cmd_recursion(args) -> int:
    if args.mode in ("sprinkled", "delta", "plan") and args.d is None:
        raise InvalidParameterError(f"recursion {args.mode} needs --d")
    if args.mode == "ideal":
        traj = rec.ideal_trajectory(0.5 - args.delta, args.steps)
        lines = ["t,b_t"] + [f"{t},{b!r}" for t, b in enumerate(traj.values)]
        _write(args.out, "\n".join(lines) + "\n")
    elif args.mode == "sprinkled":
        traj = rec.sprinkled_trajectory(0.5 - args.delta, args.steps, args.d)
        lines = ["t,p_t,eps_t,valid"]
        for t, (p, eps) in enumerate(zip(traj.values, traj.eps)):
            lines.append(f"{t},{p!r},{eps!r},{str(rec.valid_window(p, eps)).lower()}")
        _write(args.out, "\n".join(lines) + "\n")
    elif args.mode == "delta":
        traj = rec.delta_trajectory(args.delta, args.steps, args.d)
        lines = ["t,delta_t,eps_t,growth_ok"]
        for t, (dv, eps) in enumerate(zip(traj.values, traj.eps)):
            ok = 0.0 <= dv <= 0.5 and rec.growth_window(dv, eps)
            lines.append(f"{t},{dv!r},{eps!r},{str(ok).lower()}")
        _write(args.out, "\n".join(lines) + "\n")
    else:
        plan = rec.phase_plan(None, args.d, args.delta, args.a)
        _write(args.out, json.dumps(dataclasses.asdict(plan), indent=2) + "\n")
    print(f"wrote {args.out}")
    return 0


def _cmd_verify_lemma2(args) -> int:
    h = args.height
    leaves = 3 ** h
    threshold = 2 ** h
    violations = 0
    checked = 0
    if h <= 2:
        for blue in range(threshold):
            for positions in itertools.combinations(range(leaves), blue):
                colouring = np.zeros(leaves, dtype=np.uint8)
                colouring[list(positions)] = BLUE
                tree = TernaryTree(height=h, leaf_colours=colouring)
                checked += 1
                if tree_root_colour(tree) != RED:
                    violations += 1
        print(f"height {h}: exhaustive over {checked} colourings with < {threshold} "
              f"blue leaves, violations {violations}")
    else:
        rng = make_rng(args.seed)
        for _ in range(args.trials):
            colouring = (rng.random(leaves) < 0.5).astype(np.uint8)
            tree = TernaryTree(height=h, leaf_colours=colouring)
            checked += 1
            if not check_blue_threshold(tree):
                violations += 1
        print(f"height {h}: sampled {checked} colourings, violations {violations}")
    if violations:
        raise VerificationError("blue-leaf threshold check failed")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "dual": _cmd_dual,
    "duality-check": _cmd_duality_check,
    "sprinkle-demo": _cmd_sprinkle_demo,
    "reduce-check": _cmd_reduce_check,
    "recursion": _cmd_recursion,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify_lemma2(args)
        return _COMMANDS[args.command](args)
    except (InvalidParameterError, InvalidInputError, EdgeListFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GenerationError, ResourceLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
