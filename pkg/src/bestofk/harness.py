"""Seeded experiment orchestration and summary statistics.

Every experiment is a pure function of its spec: the graph, each trial, and
each Monte Carlo side derive their own namespaced streams from the one seed,
so reruns are byte-identical and trial-level parallelism cannot change any
number, only wall-clock time.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dual_dag import build_voting_dag, colour_dag, random_leaf_colours
from .dynamics import Outcome, TieRule, init_random, run_until_consensus, step_best_of_k
from .errors import InvalidParameterError
from .graph import Graph, gen_complete, gen_gnp_min_degree, gen_random_regular, load_edge_list
from .opinions import BLUE
from .recursion import ideal_steps_to_threshold
from .rng import make_rng, subseed
from .stats import MonteCarloEstimate, wilson_interval

__all__ = [
    "GraphSpec",
    "ExperimentSpec",
    "TrialRecord",
    "ExperimentSummary",
    "run_forward_experiment",
    "ScalingRow",
    "run_scaling_experiment",
    "DualityReport",
    "run_duality_experiment",
    "summary_to_csv",
    "summary_to_json",
    "scaling_to_csv",
]

# Stream namespaces under one experiment seed.
_NS_GRAPH = 0
_NS_TRIALS = 1
_NS_DUAL = 2


@dataclass(frozen=True)
class GraphSpec:
    """Declarative graph choice: complete, regular, gnp, or an edge-list file."""

    kind: str
    n: int | None = None
    d: int | None = None
    p: float | None = None
    path: str | None = None

    def build(self, seed: int) -> Graph:
        if self.kind == "complete":
            return gen_complete(self._need("n"))
        if self.kind == "regular":
            return gen_random_regular(self._need("n"), self._need("d"), seed)
        if self.kind == "gnp":
            graph, _ = gen_gnp_min_degree(self._need("n"), self._need("p"),
                                          self.d if self.d is not None else 1, seed)
            return graph
        if self.kind == "file":
            if not self.path:
                raise InvalidParameterError("graph kind 'file' needs a path")
            return load_edge_list(self.path)
        raise InvalidParameterError(f"unknown graph kind {self.kind!r}")

    def _need(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise InvalidParameterError(f"graph kind {self.kind!r} needs --{name}")
        return value

    def describe(self) -> str:
        parts = [self.kind]
        for name in ("n", "d", "p", "path"):
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value}")
        return " ".join(parts)


@dataclass(frozen=True)
class ExperimentSpec:
    graph: GraphSpec
    delta: float
    trials: int
    max_steps: int
    seed: int
    k: int = 3
    tie_rule: TieRule = TieRule.KEEP_OWN
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise InvalidParameterError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class TrialRecord:
    index: int
    outcome: Outcome
    steps_taken: int
    blue_counts: tuple[int, ...]


@dataclass(frozen=True)
class ExperimentSummary:
    spec: ExperimentSpec
    n: int
    trials: list[TrialRecord]
    red_wins: int
    red_win_fraction: float
    red_ci: tuple[float, float]
    time_min: int
    time_median: float
    time_p95: float
    time_max: int
    mean_trajectory: list[float]


def _forward_trial(payload) -> TrialRecord:
    graph, k, tie_rule, delta, max_steps, seed_base, index = payload
    rng = make_rng(seed_base, index)
    cfg = init_random(graph.n, delta, rng)
    result = run_until_consensus(graph, cfg, k, tie_rule, max_steps, rng)
    return TrialRecord(index=index, outcome=result.outcome,
                       steps_taken=result.steps_taken, blue_counts=result.blue_counts)


def _map_trials(fn, payloads, workers: int):
    if workers <= 1:
        return [fn(p) for p in payloads]
    chunk = max(1, len(payloads) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads, chunksize=chunk))


def run_forward_experiment(spec: ExperimentSpec) -> ExperimentSummary:
    """Run `trials` independent seeded runs and summarise them.

    Per-trial streams come from (seed, trial namespace, trial index); the
    summary is identical for any worker count.
    """
    graph = spec.graph.build(subseed(spec.seed, _NS_GRAPH))
    seed_base = subseed(spec.seed, _NS_TRIALS)
    payloads = [(graph, spec.k, spec.tie_rule, spec.delta, spec.max_steps, seed_base, i)
                for i in range(spec.trials)]
    records = _map_trials(_forward_trial, payloads, spec.workers)
    records.sort(key=lambda r: r.index)
    return _summarise(spec, graph.n, records)


def _summarise(spec: ExperimentSpec, n: int, records: list[TrialRecord]) -> ExperimentSummary:
    times = np.array([r.steps_taken for r in records], dtype=np.int64)
    red = sum(1 for r in records if r.outcome is Outcome.CONSENSUS_RED)
    ci = wilson_interval(red, len(records), 0.95)
    horizon = max(len(r.blue_counts) for r in records)
    acc = np.zeros(horizon, dtype=np.float64)
    for r in records:
        counts = np.array(r.blue_counts, dtype=np.float64)
        extended = np.concatenate([counts, np.full(horizon - counts.size, counts[-1])])
        acc += extended / n
    mean_traj = (acc / len(records)).tolist()
    return ExperimentSummary(
        spec=spec,
        n=n,
        trials=records,
        red_wins=red,
        red_win_fraction=red / len(records),
        red_ci=ci,
        time_min=int(times.min()),
        time_median=float(np.percentile(times, 50)),
        time_p95=float(np.percentile(times, 95)),
        time_max=int(times.max()),
        mean_trajectory=mean_traj,
    )


@dataclass(frozen=True)
class ScalingRow:
    n: int
    time_median: float
    ideal_prediction: int | None


def run_scaling_experiment(n_list, delta: float, k: int, trials: int, seed: int,
                           max_steps: int = 200, workers: int = 1) -> list[ScalingRow]:
    """Median consensus time on K_n for each n, next to the ideal-recursion prediction."""
    rows = []
    for i, n in enumerate(n_list):
        spec = ExperimentSpec(graph=GraphSpec(kind="complete", n=n), delta=delta,
                              trials=trials, max_steps=max_steps,
                              seed=subseed(seed, i), k=k, workers=workers)
        summary = run_forward_experiment(spec)
        rows.append(ScalingRow(n=n, time_median=summary.time_median,
                               ideal_prediction=ideal_steps_to_threshold(0.5 - delta, 1.0 / n)))
    return rows


def forward_opinion_at(g: Graph, v0: int, T: int, delta: float,
                       rng: np.random.Generator, k: int = 3,
                       tie_rule: TieRule = TieRule.KEEP_OWN) -> int:
    """Colour of v0 after T forward steps from a fresh random initialisation."""
    cfg = init_random(g.n, delta, rng)
    for _ in range(T):
        cfg = step_best_of_k(g, cfg, k, tie_rule, rng)
    return int(cfg.colours[v0])


def _duality_forward_trial(payload) -> int:
    graph, v0, T, delta, seed_base, index = payload
    return forward_opinion_at(graph, v0, T, delta, make_rng(seed_base, index))


def _dual_trial(payload) -> int:
    graph, v0, T, blue_prob, seed_base, index = payload
    rng = make_rng(seed_base, index)
    dag = build_voting_dag(graph, v0, T, rng)
    leaf_colours = random_leaf_colours(dag, blue_prob, rng)
    return int(colour_dag(dag, leaf_colours)[dag.root])


@dataclass(frozen=True)
class DualityReport:
    graph: str
    v0: int
    T: int
    delta: float
    trials: int
    confidence: float
    forward: MonteCarloEstimate
    dual: MonteCarloEstimate
    overlap: bool


def run_duality_experiment(graph_spec: GraphSpec, v0: int, T: int, delta: float,
                           trials: int, seed: int, confidence: float = 0.99,
                           workers: int = 1) -> DualityReport:
    """Estimate P(opinion of v0 at T is blue) forward and through the DAG.

    Returns both estimates with confidence intervals and whether they overlap.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    graph = graph_spec.build(subseed(seed, _NS_GRAPH))
    fwd_base = subseed(seed, _NS_TRIALS)
    dual_base = subseed(seed, _NS_DUAL)
    fwd_payloads = [(graph, v0, T, delta, fwd_base, i) for i in range(trials)]
    dual_payloads = [(graph, v0, T, 0.5 - delta, dual_base, i) for i in range(trials)]
    fwd_blue = sum(_map_trials(_duality_forward_trial, fwd_payloads, workers))
    dual_blue = sum(_map_trials(_dual_trial, dual_payloads, workers))

    def estimate(successes: int) -> MonteCarloEstimate:
        low, high = wilson_interval(successes, trials, confidence)
        return MonteCarloEstimate(successes=successes, trials=trials,
                                  estimate=successes / trials, ci_low=low,
                                  ci_high=high, confidence=confidence)

    forward, dual = estimate(fwd_blue), estimate(dual_blue)
    return DualityReport(graph=graph_spec.describe(), v0=v0, T=T, delta=delta,
                         trials=trials, confidence=confidence,
                         forward=forward, dual=dual, overlap=forward.overlaps(dual))


def summary_to_csv(summary: ExperimentSummary) -> str:
    """One row per trial, then a '#'-prefixed summary block."""
    lines = ["trial,outcome,steps_taken,final_blue_fraction"]
    for r in summary.trials:
        lines.append(f"{r.index},{r.outcome.value},{r.steps_taken},"
                     f"{r.blue_counts[-1] / summary.n!r}")
    lines.append(f"# n,{summary.n}")
    lines.append(f"# trials,{len(summary.trials)}")
    lines.append(f"# red_win_fraction,{summary.red_win_fraction!r}")
    lines.append(f"# red_ci_low,{summary.red_ci[0]!r}")
    lines.append(f"# red_ci_high,{summary.red_ci[1]!r}")
    lines.append(f"# time_min,{summary.time_min}")
    lines.append(f"# time_median,{summary.time_median!r}")
    lines.append(f"# time_p95,{summary.time_p95!r}")
    lines.append(f"# time_max,{summary.time_max}")
    lines.append("# mean_trajectory," + "|".join(repr(x) for x in summary.mean_trajectory))
    return "\n".join(lines) + "\n"


def summary_to_json(summary: ExperimentSummary) -> str:
    payload = {
        "graph": summary.spec.graph.describe(),
        "n": summary.n,
        "k": summary.spec.k,
        "tie_rule": summary.spec.tie_rule.value,
        "delta": summary.spec.delta,
        "seed": summary.spec.seed,
        "trials": [
            {"trial": r.index, "outcome": r.outcome.value, "steps_taken": r.steps_taken,
             "final_blue_fraction": r.blue_counts[-1] / summary.n}
            for r in summary.trials
        ],
        "red_win_fraction": summary.red_win_fraction,
        "red_ci": list(summary.red_ci),
        "time_quantiles": {"min": summary.time_min, "median": summary.time_median,
                           "p95": summary.time_p95, "max": summary.time_max},
        "mean_trajectory": summary.mean_trajectory,
    }
    return json.dumps(payload, indent=2) + "\n"


def scaling_to_csv(rows: list[ScalingRow]) -> str:
    lines = ["n,time_median,ideal_prediction"]
    for row in rows:
        pred = "" if row.ideal_prediction is None else row.ideal_prediction
        lines.append(f"{row.n},{row.time_median!r},{pred}")
    return "\n".join(lines) + "\n"
