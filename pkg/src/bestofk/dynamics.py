"""The forward synchronous best-of-k process.

Every vertex simultaneously samples k neighbours (uniformly, with
replacement) and adopts the majority colour of the sample; k=2 ties are
broken by the configured rule. Updates are double-buffered: the next
configuration is computed entirely from the current one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError
from .graph import Graph
from .opinions import BLUE, OPINION_DTYPE, RED

__all__ = [
    "TieRule",
    "Outcome",
    "OpinionConfig",
    "RunResult",
    "init_random",
    "config_with_blue_count",
    "step_best_of_k",
    "run_until_consensus",
    "trajectory_csv",
]

_EMPTY_TIE = np.empty(0, dtype=np.float64)


class TieRule(enum.Enum):
    """k=2 tie handling: keep own opinion, or pick one of the two samples."""

    KEEP_OWN = "keep"
    RANDOM_PICK = "random"


class Outcome(enum.Enum):
    CONSENSUS_RED = "red"
    CONSENSUS_BLUE = "blue"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class OpinionConfig:
    """One colour per vertex (blue=1, red=0) at time index `step`."""

    colours: np.ndarray
    step: int = 0

    def __post_init__(self):
        if self.colours.dtype != OPINION_DTYPE:
            raise InvalidParameterError(f"colours must be {OPINION_DTYPE}, got {self.colours.dtype}")
        if self.colours.ndim != 1:
            raise InvalidParameterError("colours must be a 1-d vector")
        if self.colours.size and self.colours.max() > 1:
            raise InvalidParameterError("colours must be 0 (red) or 1 (blue)")
        self.colours.setflags(write=False)

    @property
    def n(self) -> int:
        return self.colours.size

    @property
    def blue_count(self) -> int:
        return int(self.colours.sum())

    @property
    def blue_fraction(self) -> float:
        return self.blue_count / self.n

    @property
    def is_monochromatic(self) -> bool:
        c = self.blue_count
        return c == 0 or c == self.n


@dataclass(frozen=True)
class RunResult:
    """Outcome of a run plus the exact blue-count trajectory (t=0 included)."""

    outcome: Outcome
    steps_taken: int
    n: int
    blue_counts: tuple[int, ...]

    @property
    def blue_fraction_trajectory(self) -> tuple[float, ...]:
        return tuple(c / self.n for c in self.blue_counts)


def init_random(n: int, delta: float, rng: np.random.Generator) -> OpinionConfig:
    """Each vertex independently blue with probability 1/2 - delta."""
    if not (0.0 <= delta <= 0.5):
        raise InvalidParameterError(f"delta must be in [0, 1/2], got {delta}")
    colours = (rng.random(n) < 0.5 - delta).astype(OPINION_DTYPE)
    return OpinionConfig(colours=colours, step=0)


def config_with_blue_count(n: int, blue_count: int) -> OpinionConfig:
    """Deterministic configuration with exactly `blue_count` blue vertices."""
    if not (0 <= blue_count <= n):
        raise InvalidParameterError(f"blue_count {blue_count} out of range for n={n}")
    colours = np.zeros(n, dtype=OPINION_DTYPE)
    colours[:blue_count] = BLUE
    return OpinionConfig(colours=colours, step=0)


def step_best_of_k(g: Graph, cfg: OpinionConfig, k: int, tie_rule: TieRule,
                   rng: np.random.Generator) -> OpinionConfig:
    """One synchronous step; consumes k uniforms per vertex in vertex order.

    For k=2 with RANDOM_PICK one extra tie uniform per vertex is consumed
    (unconditionally, so that draws never depend on the configuration and
    coupled runs share sample indices and tie coins).
    """
    if cfg.n != g.n:
        raise InvalidParameterError(f"configuration length {cfg.n} != graph size {g.n}")
    if k not in (1, 2, 3):
        raise InvalidParameterError(f"k must be 1, 2 or 3, got {k}")
    u = rng.random((g.n, k))
    keep_own = tie_rule is TieRule.KEEP_OWN
    tie_u = rng.random(g.n) if (k == 2 and not keep_own) else _EMPTY_TIE
    if g.complete:
        nxt = kernels.step_complete(g.n, cfg.colours, u, k, keep_own, tie_u)
    else:
        nxt = kernels.step_csr(g.indptr, g.indices, cfg.colours, u, k, keep_own, tie_u)
    return OpinionConfig(colours=nxt, step=cfg.step + 1)


def run_until_consensus(g: Graph, cfg: OpinionConfig, k: int, tie_rule: TieRule,
                        max_steps: int, rng: np.random.Generator) -> RunResult:
    """Step until monochromatic or max_steps, recording blue counts per step."""
    if max_steps < 0:
        raise InvalidParameterError(f"max_steps must be >= 0, got {max_steps}")
    cur = cfg
    counts = [cur.blue_count]
    taken = 0
    while not cur.is_monochromatic and taken < max_steps:
        cur = step_best_of_k(g, cur, k, tie_rule, rng)
        counts.append(cur.blue_count)
        taken += 1
    if cur.is_monochromatic:
        outcome = Outcome.CONSENSUS_BLUE if cur.blue_count == cur.n else Outcome.CONSENSUS_RED
    else:
        outcome = Outcome.TIMEOUT
    return RunResult(outcome=outcome, steps_taken=taken, n=g.n, blue_counts=tuple(counts))


def trajectory_csv(result: RunResult) -> str:
    """Trajectory export: `step,blue_count,blue_fraction` rows."""
    lines = ["step,blue_count,blue_fraction"]
    for t, c in enumerate(result.blue_counts):
        lines.append(f"{t},{c},{c / result.n!r}")
    return "\n".join(lines) + "\n"
