"""Scalar probability recursions for the blue-opinion dynamics.

Three coupled sequences are exposed:

* the ideal mean-field recursion  b -> 3b^2 - 2b^3,
* the sprinkled upper bound       p -> (3p^2 - 2p^3) + 6pe + 3e^2 + e^3,
  with per-step error term e = 3^(T-t+1)/d for the step entering level t,
* the imbalance lower bound       delta -> delta + (delta/2 - 2delta^3 - 4e),

plus the doubly-quadratic envelope 4p^2 and the three-phase schedule that
predicts how many levels each regime needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidParameterError, ResourceLimitError

__all__ = [
    "DELTA_STAR",
    "ideal_step",
    "epsilon",
    "sprinkled_step",
    "squared_decay_step",
    "valid_window",
    "delta_step",
    "growth_window",
    "ideal_trajectory",
    "ideal_steps_to_threshold",
    "sprinkled_trajectory",
    "delta_trajectory",
    "PhasePlan",
    "phase_plan",
]

# Imbalance at which delta/2 - 2*delta^3 peaks; target of the growth phase.
DELTA_STAR = 1.0 / (2.0 * math.sqrt(3.0))

# Below this, doubly-exponential decay is clamped to exact zero.
UNDERFLOW_FLOOR = 1e-300

# Cap multiplier for the growth phase: smallest integer constant > 10/log(5/4), plus one.
T3_CAP_CONSTANT = math.ceil(10.0 / math.log(1.25)) + 1


def _check_prob(x: float, name: str) -> None:
    if not (0.0 <= x <= 1.0):
        raise InvalidParameterError(f"{name} must be in [0, 1], got {x}")


def ideal_step(b: float) -> float:
    """Blue probability after one step when the three samples are independent."""
    _check_prob(b, "b")
    return 3.0 * b * b - 2.0 * b * b * b


def _pow3(exponent: int) -> float:
    try:
        return float(3 ** exponent)
    except OverflowError:
        raise ResourceLimitError(f"3^{exponent} overflows a double") from None


def epsilon(t: int, T: int, d: int) -> float:
    """Collision error term for the step entering level t of a height-T DAG."""
    if d < 1:
        raise InvalidParameterError(f"d must be >= 1, got {d}")
    if not (1 <= t <= T):
        raise InvalidParameterError(f"need 1 <= t <= T, got t={t}, T={T}")
    return _pow3(T - t + 1) / d


def _eps_at(t: int, T: int, d: int) -> float:
    # Error term indexed by the level it leaves: eps_t = 3^(T-t)/d, t in 0..T.
    return _pow3(T - t) / d


def sprinkled_step(p: float, eps: float) -> float:
    """Upper bound on the blue probability one level up, given error term eps."""
    _check_prob(p, "p")
    if eps < 0.0:
        raise InvalidParameterError(f"eps must be >= 0, got {eps}")
    value = (3.0 * p * p - 2.0 * p ** 3) + 6.0 * p * eps + 3.0 * eps * eps + eps ** 3
    return min(value, 1.0)


def squared_decay_step(p: float) -> float:
    """The 4p^2 envelope of the sprinkled recursion; see valid_window."""
    if not (0.0 <= p <= 0.5):
        raise InvalidParameterError(f"p must be in [0, 1/2], got {p}")
    return 4.0 * p * p


def valid_window(p: float, eps: float) -> bool:
    """True when the 4p^2 envelope dominates the sprinkled step (p > 12*eps)."""
    return p > 12.0 * eps


def delta_step(delta: float, eps: float) -> float:
    """Lower bound on the imbalance one level up."""
    if not (0.0 <= delta <= 0.5):
        raise InvalidParameterError(f"delta must be in [0, 1/2], got {delta}")
    if eps < 0.0:
        raise InvalidParameterError(f"eps must be >= 0, got {eps}")
    return _delta_poly(delta, eps)


def _delta_poly(delta: float, eps: float) -> float:
    return delta + (0.5 * delta - 2.0 * delta ** 3 - 4.0 * eps)


def growth_window(delta: float, eps: float) -> bool:
    """Window on which delta_step is guaranteed to grow by at least 5/4.

    Requires delta >= 48*eps (so the 4*eps loss stays below delta/12) and
    delta < DELTA_STAR (so 2*delta^2 < 1/6). On the weaker window
    delta >= 12*eps the step is merely non-decreasing.
    """
    return delta >= 48.0 * eps and delta < DELTA_STAR


@dataclass
class Trajectory:
    """A recursion trace; `values[t]` is the sequence value at level t."""

    values: list[float]
    eps: list[float] = field(default_factory=list)
    underflow_clamped: bool = False


def _clamp(value: float) -> tuple[float, bool]:
    if 0.0 < value < UNDERFLOW_FLOOR:
        return 0.0, True
    return value, False


def ideal_trajectory(b0: float, steps: int) -> Trajectory:
    """Iterate the ideal recursion for `steps` steps from b0."""
    _check_prob(b0, "b0")
    values = [b0]
    clamped = False
    b = b0
    for _ in range(steps):
        b = ideal_step(b)
        b, hit = _clamp(b)
        clamped = clamped or hit
        values.append(b)
    return Trajectory(values=values, underflow_clamped=clamped)


def ideal_steps_to_threshold(b0: float, threshold: float, max_steps: int = 10_000) -> int | None:
    """Number of ideal steps until the value drops below `threshold` (None if never)."""
    _check_prob(b0, "b0")
    b = b0
    for t in range(max_steps + 1):
        if b < threshold:
            return t
        b, _ = _clamp(ideal_step(b))
    return None


def sprinkled_trajectory(p0: float, T: int, d: int, steps: int | None = None) -> Trajectory:
    """Iterate the sprinkled bound up a height-T DAG with min degree d."""
    _check_prob(p0, "p0")
    if steps is None:
        steps = T
    if steps > T:
        raise InvalidParameterError(f"steps ({steps}) cannot exceed height T ({T})")
    values = [p0]
    eps_list = [_eps_at(0, T, d)]
    clamped = False
    p = p0
    for t in range(1, steps + 1):
        p = sprinkled_step(p, epsilon(t, T, d))
        p, hit = _clamp(p)
        clamped = clamped or hit
        values.append(p)
        eps_list.append(_eps_at(t, T, d))
    return Trajectory(values=values, eps=eps_list, underflow_clamped=clamped)


def delta_trajectory(delta0: float, T: int, d: int, steps: int | None = None) -> Trajectory:
    """Iterate the imbalance lower bound up a height-T DAG with min degree d.

    Values are clamped into [-1/2, 1/2]; once negative the sequence is sunk
    (large error terms dominate) and is reported as such.
    """
    if not (0.0 <= delta0 <= 0.5):
        raise InvalidParameterError(f"delta0 must be in [0, 1/2], got {delta0}")
    if steps is None:
        steps = T
    if steps > T:
        raise InvalidParameterError(f"steps ({steps}) cannot exceed height T ({T})")
    values = [delta0]
    eps_list = [_eps_at(0, T, d)]
    delta = delta0
    for t in range(1, steps + 1):
        delta = max(_delta_poly(delta, epsilon(t, T, d)), -0.5)
        values.append(delta)
        eps_list.append(_eps_at(t, T, d))
    return Trajectory(values=values, eps=eps_list, underflow_clamped=False)


@dataclass
class PhasePlan:
    """Predicted three-phase level schedule for one root query.

    Reading the DAG bottom-up: t3 levels grow the imbalance to DELTA_STAR,
    t2 levels collapse the blue probability quadratically until it falls
    under 12*eps, and one final sprinkled step drives it to o(1/d). h1 is
    the tree height reserved above those phases.
    """

    n: int | None
    d: int
    delta0: float
    a: float
    h1: int
    t2: int
    t3: int
    total_height: int
    t2_capped: bool
    t3_capped: bool
    delta_values: list[float]
    delta_eps: list[float]
    p_values: list[float]
    p_eps: list[float]
    p_envelope: list[float]
    final_p_start: float
    final_eps: float
    final_p: float
    final_below_inv_d: bool


def _t2_schedule(h2: int, d: int, cap: int) -> tuple[int, bool, list[float], list[float]]:
    p = 0.5 - DELTA_STAR
    values, eps_list = [p], [_eps_at(0, h2, d)]
    if p <= 12.0 * _eps_at(0, h2, d):
        return 0, False, values, eps_list
    for t in range(1, cap + 1):
        p = min(sprinkled_step(p, epsilon(t, h2, d)), 1.0)
        p, _ = _clamp(p)
        values.append(p)
        eps_list.append(_eps_at(t, h2, d))
        if p <= 12.0 * _eps_at(t, h2, d):
            return t, False, values, eps_list
    return cap, True, values, eps_list


def _t3_schedule(h3: int, d: int, delta0: float, cap: int) -> tuple[int, bool, list[float], list[float]]:
    delta = delta0
    values, eps_list = [delta], [_eps_at(0, h3, d)]
    if delta >= DELTA_STAR:
        return 0, False, values, eps_list
    for t in range(1, cap + 1):
        delta = max(_delta_poly(delta, epsilon(t, h3, d)), -0.5)
        values.append(delta)
        eps_list.append(_eps_at(t, h3, d))
        if delta >= DELTA_STAR:
            return t, False, values, eps_list
        if delta <= 0.0:
            break
    return cap, True, values, eps_list


def _fixed_point(schedule, start: int, max_rounds: int = 64) -> tuple:
    """Iterate guess -> schedule(guess)[0] until stable; worst case keep the max."""
    guess = start
    seen: dict[int, tuple] = {}
    for _ in range(max_rounds):
        result = schedule(guess)
        seen[guess] = result
        if result[0] == guess:
            return result
        guess = result[0]
    return seen[max(seen)]


def phase_plan(n: int | None, d: int, delta: float, a: float = 1.0) -> PhasePlan:
    """Compute the three-phase schedule for min degree d and initial imbalance delta.

    Each phase's error schedule uses its own sub-DAG height (the phase's
    steps plus everything above it), resolved by fixed-point iteration since
    the height depends on the phase length itself.
    """
    if d < 2:
        raise InvalidParameterError(f"d must be >= 2, got {d}")
    if not (0.0 < delta <= 0.5):
        raise InvalidParameterError(f"delta must be in (0, 1/2], got {delta}")
    if a <= 0.0:
        raise InvalidParameterError(f"a must be positive, got {a}")

    h1 = max(math.floor(a * math.log(math.log2(d))), 0) + 1
    cap2 = max(int(2.0 * math.log2(math.log2(d))) if math.log2(d) > 1.0 else 0, 0)
    cap3 = max(int(T3_CAP_CONSTANT * math.log(1.0 / delta)), 1)

    t2, t2_capped, p_values, p_eps = _fixed_point(
        lambda g: _t2_schedule(h1 + g, d, cap2), start=0)
    h2 = h1 + t2
    t3, t3_capped, d_values, d_eps = _fixed_point(
        lambda g: _t3_schedule(h2 + g, d, delta, cap3), start=0)

    # One more sprinkled step from the boundary value 12 * 3^h1 / d.
    final_eps = _pow3(h1) / d
    final_p_start = min(12.0 * final_eps, 1.0)
    final_p = sprinkled_step(final_p_start, final_eps)

    envelope = [p_values[0]]
    for _ in range(len(p_values) - 1):
        envelope.append(min(squared_decay_step(min(envelope[-1], 0.5)), 1.0))

    return PhasePlan(
        n=n,
        d=d,
        delta0=delta,
        a=a,
        h1=h1,
        t2=t2,
        t3=t3,
        total_height=h1 + t2 + t3,
        t2_capped=t2_capped,
        t3_capped=t3_capped,
        delta_values=d_values,
        delta_eps=d_eps,
        p_values=p_values,
        p_eps=p_eps,
        p_envelope=envelope,
        final_p_start=final_p_start,
        final_eps=final_eps,
        final_p=final_p,
        final_below_inv_d=final_p < 1.0 / d,
    )
