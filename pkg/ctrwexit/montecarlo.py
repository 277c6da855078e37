"""Event-driven Monte Carlo estimates of mean exit times.

Between jumps a path moves linearly, so the drift exit through b is found
exactly as (b - X)/v and no time step is involved. Paths are simulated in
fixed-size blocks; block i draws from a Philox stream keyed by
(seed, i), and block results are reduced in block order, so an estimate
does not depend on the number of workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np

from ctrwexit.distributions import JumpModel, ProcessSpec, WaitingTimeModel, require_mean
from ctrwexit.exceptions import DomainError, SimulationError
from ctrwexit.renewal import excess_life
from ctrwexit.sentinels import ObservationTime, check_observation_time, is_steady_state

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 8192
DEFAULT_MAX_EVENTS = 1_000_000
# Truncation barrier for b = ∞, in units of the mean jump size
DEFAULT_TRUNCATION_FACTOR = 200.0


@dataclass(frozen=True)
class ExitTimeEstimate:
    """Sample mean of exit times with its standard error and exit tallies.

    ``truncated`` counts paths stopped at the truncation barrier of a
    b = ∞ run; ``truncation_horizon`` is that barrier level.
    """

    mean: float
    stderr: float
    paths: int
    upper_exits: int
    lower_exits: int
    drift_only_exits: int
    seed: int
    truncation_horizon: float | None = None
    truncated: int = 0
    max_events: int = DEFAULT_MAX_EVENTS

    @property
    def lower_fraction(self) -> float:
        return self.lower_exits / self.paths

    @property
    def lower_fraction_stderr(self) -> float:
        p = self.lower_fraction
        return math.sqrt(p * (1.0 - p) / self.paths)

    def agrees_with(self, value: float, sigmas: float = 4.0, allowance: float = 0.0) -> bool:
        """True when value lies within ``sigmas`` standard errors (plus allowance)."""
        return abs(self.mean - value) <= sigmas * self.stderr + allowance


@dataclass
class _BlockResult:
    count: int
    mean: float
    m2: float
    upper: int
    lower: int
    drift_only: int
    truncated: int
    samples: np.ndarray | None = None


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one block of paths."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def sample_jumps(jumps: JumpModel, rng: np.random.Generator, size: int) -> np.ndarray:
    return np.asarray(jumps.sample(rng, size), dtype=float)


def _renewal_excess(
    waiting: WaitingTimeModel, r: float, rng: np.random.Generator, size: int
) -> np.ndarray:
    """E_r = t_{N_r+1} - r from simulated renewal epochs."""
    epochs = np.zeros(size)
    pending = np.arange(size)
    while pending.size:
        epochs[pending] += waiting.sample(rng, pending.size)
        pending = pending[epochs[pending] <= r]
    return epochs - r


def _draw_excess(
    waiting: WaitingTimeModel, r: ObservationTime, rng: np.random.Generator, size: int
) -> np.ndarray:
    if is_steady_state(r):
        return np.asarray(excess_life(waiting, None, r).sample(rng, size), dtype=float)
    if float(r) == 0.0:  # type: ignore[arg-type]
        return np.asarray(waiting.sample(rng, size), dtype=float)
    return _renewal_excess(waiting, float(r), rng, size)  # type: ignore[arg-type]


def sample_excess_life(
    waiting: WaitingTimeModel, r: ObservationTime, n: int, seed: int
) -> np.ndarray:
    """n draws of the excess life at r by renewal-sequence simulation.

    At r = STEADY_STATE the draws come from the limiting law, which needs
    an Erlang waiting-time model.
    """
    check_observation_time(r)
    if n < 1:
        raise DomainError(f"Sample size must be at least 1, got {n}", value=n)
    return _draw_excess(waiting, r, block_generator(seed, 0), n)


def _simulate_block(
    spec: ProcessSpec,
    x: float,
    r: ObservationTime | None,
    size: int,
    rng: np.random.Generator,
    barrier: float,
    max_events: int,
    keep_samples: bool,
) -> _BlockResult:
    v = spec.drift
    if r is None:
        first = np.asarray(spec.waiting.sample(rng, size), dtype=float)
    else:
        first = _draw_excess(spec.waiting, r, rng, size)

    position = np.full(size, float(x))
    elapsed = np.zeros(size)
    jumped = np.zeros(size, dtype=bool)
    upper = np.zeros(size, dtype=bool)
    lower = np.zeros(size, dtype=bool)
    active = np.arange(size)
    sojourn = first
    events = 0
    while active.size:
        if events >= max_events:
            raise SimulationError(
                f"{active.size} paths still inside after {max_events} jumps",
                events=max_events,
                details={"active": int(active.size)},
            )
        pos = position[active]
        if v > 0:
            remaining = (barrier - pos) / v
        else:
            remaining = np.full(active.size, np.inf)
        drift_exit = sojourn >= remaining

        done = active[drift_exit]
        elapsed[done] += remaining[drift_exit]
        upper[done] = True

        moving = ~drift_exit
        moved = active[moving]
        elapsed[moved] += sojourn[moving]
        landed = pos[moving] + v * sojourn[moving] + sample_jumps(spec.jumps, rng, moved.size)
        position[moved] = landed
        jumped[moved] = True
        up = landed >= barrier
        down = landed <= 0.0
        upper[moved[up]] = True
        lower[moved[down]] = True

        active = moved[~(up | down)]
        sojourn = np.asarray(spec.waiting.sample(rng, active.size), dtype=float)
        events += 1

    truncated = int(np.count_nonzero(upper)) if math.isinf(spec.boundary) else 0
    mean = float(np.mean(elapsed))
    return _BlockResult(
        count=size,
        mean=mean,
        m2=float(np.sum((elapsed - mean) ** 2)),
        upper=int(np.count_nonzero(upper)),
        lower=int(np.count_nonzero(lower)),
        drift_only=int(np.count_nonzero(upper & ~jumped)),
        truncated=truncated,
        samples=elapsed if keep_samples else None,
    )


def _reduce(blocks: list[_BlockResult]) -> tuple[int, float, float]:
    """Pooled (count, mean, M2) in block order."""
    count, mean, m2 = 0, 0.0, 0.0
    for block in blocks:
        total = count + block.count
        delta = block.mean - mean
        mean += delta * block.count / total
        m2 += block.m2 + delta**2 * count * block.count / total
        count = total
    return count, mean, m2


def _run(
    spec: ProcessSpec,
    x: float,
    r: ObservationTime | None,
    paths: int,
    seed: int,
    workers: int,
    block_size: int,
    max_events: int,
    truncation: float | None,
    keep_samples: bool = False,
) -> tuple[ExitTimeEstimate, list[_BlockResult]]:
    if paths < 1:
        raise DomainError(f"Number of paths must be at least 1, got {paths}", value=paths)
    if workers < 1:
        raise DomainError(f"Number of workers must be at least 1, got {workers}", value=workers)
    barrier = spec.boundary
    if math.isinf(spec.boundary):
        if truncation is None:
            truncation = DEFAULT_TRUNCATION_FACTOR * abs(require_mean(spec.jumps))
        barrier = truncation
    if not (0.0 <= x < barrier):
        raise DomainError(f"Start x={x} must lie in [0, {barrier})", value=x)

    sizes = [block_size] * (paths // block_size)
    if paths % block_size:
        sizes.append(paths % block_size)

    def simulate(index: int) -> _BlockResult:
        rng = block_generator(seed, index)
        return _simulate_block(spec, x, r, sizes[index], rng, barrier, max_events, keep_samples)

    if workers == 1:
        blocks = [simulate(i) for i in range(len(sizes))]
    else:
        results: list[_BlockResult | None] = [None] * len(sizes)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(simulate, i): i for i in range(len(sizes))}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        blocks = [block for block in results if block is not None]

    count, mean, m2 = _reduce(blocks)
    stderr = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    truncated = sum(block.truncated for block in blocks)
    if truncated:
        logger.warning(
            "%d of %d paths reached the truncation barrier at %.6g", truncated, count, barrier
        )
    estimate = ExitTimeEstimate(
        mean=mean,
        stderr=stderr,
        paths=count,
        upper_exits=sum(block.upper for block in blocks),
        lower_exits=sum(block.lower for block in blocks),
        drift_only_exits=sum(block.drift_only for block in blocks),
        seed=seed,
        truncation_horizon=barrier if math.isinf(spec.boundary) else None,
        truncated=truncated,
        max_events=max_events,
    )
    logger.debug(
        "Monte Carlo: %d paths in %d blocks, mean %.8g ± %.2g", count, len(blocks), mean, stderr
    )
    return estimate, blocks


def estimate_exit_after_jump(
    spec: ProcessSpec,
    x: float,
    paths: int,
    seed: int,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    max_events: int = DEFAULT_MAX_EVENTS,
    truncation: float | None = None,
) -> ExitTimeEstimate:
    """Estimate T̃_b(x) with the clock started at a jump.

    Args:
        spec: Process to simulate; b = ∞ uses a truncation barrier
        x: Start position in [0, b)
        paths: Number of simulated paths
        seed: Root seed of the block streams
        workers: Threads simulating blocks (result does not depend on it)
        block_size: Paths per block
        max_events: Jump budget per path
        truncation: Barrier level for b = ∞ (default 200 mean jump sizes)

    Raises:
        DomainError: If x is outside [0, b)
        SimulationError: If a path exceeds the jump budget
    """
    estimate, _ = _run(spec, x, None, paths, seed, workers, block_size, max_events, truncation)
    return estimate


def estimate_exit_at(
    spec: ProcessSpec,
    x: float,
    r: ObservationTime,
    paths: int,
    seed: int,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    max_events: int = DEFAULT_MAX_EVENTS,
    truncation: float | None = None,
) -> ExitTimeEstimate:
    """Estimate T_b(x, r) when only X_r = x is known.

    Each path draws the excess life E_r from a simulated renewal sequence
    and uses it as the first sojourn from x. Jump sizes are independent of
    jump times, so knowing X_r = x constrains neither E_r nor later jumps.
    """
    check_observation_time(r)
    estimate, _ = _run(spec, x, r, paths, seed, workers, block_size, max_events, truncation)
    return estimate


def simulate_exit_times(
    spec: ProcessSpec,
    x: float,
    paths: int,
    seed: int,
    r: ObservationTime | None = None,
    max_events: int = DEFAULT_MAX_EVENTS,
) -> np.ndarray:
    """Individual exit times, in path order."""
    if r is not None:
        check_observation_time(r)
    _, blocks = _run(
        spec, x, r, paths, seed, 1, DEFAULT_BLOCK_SIZE, max_events, None, keep_samples=True
    )
    return np.concatenate([block.samples for block in blocks if block.samples is not None])


def compare_estimates(first: ExitTimeEstimate, second: ExitTimeEstimate) -> float:
    """Two-sample z-score of the difference of means."""
    joint = math.hypot(first.stderr, second.stderr)
    if joint == 0:
        return 0.0 if first.mean == second.mean else math.inf
    return (first.mean - second.mean) / joint

