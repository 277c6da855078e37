"""Run orchestration: method selection, result rows, comparisons and CSV artifacts."""

from __future__ import annotations

import csv
import io
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np

from ctrwexit.adverse import AdverseSolution, ruin_mean_time
from ctrwexit.config import RunConfig, parse_value
from ctrwexit.continuum import (
    ContinuumSpec,
    mean_exit_by_survival,
    mean_exit_continuum,
    mean_exit_continuum_via_inversion,
)
from ctrwexit.distributions import ExponentialJumps, ProcessSpec, is_plain_exponential_jumps
from ctrwexit.exceptions import ConfigError, RegimeError
from ctrwexit.favorable import FavorableSolution
from ctrwexit.montecarlo import ExitTimeEstimate, estimate_exit_after_jump, estimate_exit_at
from ctrwexit.sentinels import STEADY_STATE, ObservationTime, is_steady_state
from ctrwexit.twosided import TwoSidedSolution

logger = logging.getLogger(__name__)

CSV_HEADER = ("x", "r", "method", "value", "stderr", "paths", "seed")
PROPERTIES = ("interior-maximum", "crossover", "monotone", "argmax-nondecreasing")
MONTE_CARLO = "monte-carlo"
# Analytic rows compared against Monte Carlo at this many standard errors
MC_SIGMAS = 3.0

Solver = FavorableSolution | AdverseSolution | TwoSidedSolution
Curve = tuple[np.ndarray, np.ndarray]


def format_number(value: float | None) -> str:
    """12 significant digits; empty for a missing value."""
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.12g}"


def format_time(r: ObservationTime) -> str:
    return "inf" if is_steady_state(r) else format_number(float(r))  # type: ignore[arg-type]


@dataclass(frozen=True)
class ResultRow:
    """One (x, r, method) evaluation; stderr, paths and seed only for Monte Carlo rows."""

    x: float
    r: ObservationTime
    method: str
    value: float
    stderr: float | None = None
    paths: int | None = None
    seed: int | None = None

    @property
    def is_simulated(self) -> bool:
        return self.stderr is not None

    def to_csv_fields(self) -> list[str]:
        return [
            format_number(self.x),
            format_time(self.r),
            self.method,
            format_number(self.value),
            format_number(self.stderr),
            "" if self.paths is None else str(self.paths),
            "" if self.seed is None else str(self.seed),
        ]


def _time_key(r: ObservationTime) -> float:
    return math.inf if is_steady_state(r) else float(r)  # type: ignore[arg-type]


def write_rows(rows: Iterable[ResultRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.to_csv_fields())


def rows_to_csv(rows: Iterable[ResultRow]) -> str:
    buffer = io.StringIO()
    write_rows(rows, buffer)
    return buffer.getvalue()


def save_rows(rows: Iterable[ResultRow], path: str | Path) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as f:
        write_rows(rows, f)
    logger.info(f"💾 Saved results: {out}")


def _parse_optional(text: str, kind: type) -> float | int | None:
    return kind(text) if text.strip() else None


def parse_rows(text: str) -> list[ResultRow]:
    """Rows of a result CSV.

    Raises:
        ConfigError: If the header or a row is malformed
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise ConfigError(f"Result CSV must start with the header {','.join(CSV_HEADER)}")
    rows = []
    for number, fields in enumerate(reader, 2):
        if not fields:
            continue
        if len(fields) != len(CSV_HEADER):
            raise ConfigError(
                f"Line {number} has {len(fields)} fields, expected {len(CSV_HEADER)}",
                line_number=number,
            )
        x, r, method, value, stderr, paths, seed = fields
        try:
            time: ObservationTime = STEADY_STATE if r.strip() == "inf" else float(r)
            rows.append(
                ResultRow(
                    x=float(x),
                    r=time,
                    method=method.strip(),
                    value=float(value),
                    stderr=_parse_optional(stderr, float),  # type: ignore[arg-type]
                    paths=_parse_optional(paths, int),  # type: ignore[arg-type]
                    seed=_parse_optional(seed, int),  # type: ignore[arg-type]
                )
            )
        except ValueError as e:
            raise ConfigError(f"Line {number} does not parse: {e}", line_number=number) from e
    return rows


def load_rows(path: str | Path) -> list[ResultRow]:
    csv_path = Path(path)
    if not csv_path.exists():
        raise ConfigError(f"Result CSV not found: {csv_path}")
    return parse_rows(csv_path.read_text())


class ExitTimeRunner:
    """Evaluate a RunConfig on its (x, r) grid with one or more methods."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.spec = config.build_spec()
        self._solver: Solver | None = None

    @property
    def is_continuum(self) -> bool:
        return isinstance(self.spec, ContinuumSpec)

    @property
    def is_ruin(self) -> bool:
        return isinstance(self.spec, ProcessSpec) and self.spec.is_ruin_problem

    @property
    def solver(self) -> Solver:
        if self._solver is None:
            spec = self.spec
            assert isinstance(spec, ProcessSpec)
            points = self.config.grid_points
            if self.config.regime == "favorable":
                self._solver = FavorableSolution(spec, points)
            elif self.config.regime == "adverse":
                self._solver = AdverseSolution(spec, points)
            else:
                self._solver = TwoSidedSolution(spec, points)
            logger.debug(f"Solver: {type(self._solver).__name__} on {points} points")
        return self._solver

    def applicable_methods(self) -> list[str]:
        """Concrete methods that apply to this regime/model pair."""
        if self.is_continuum:
            return ["closed-form", "transform-inversion", "quadrature"]
        spec = self.spec
        assert isinstance(spec, ProcessSpec)
        if self.is_ruin:
            if self.config.regime != "adverse" or not is_plain_exponential_jumps(spec.jumps, -1):
                raise RegimeError(
                    "With b = ∞ only the adverse regime with exponential jumps is solved",
                    regime=self.config.regime,
                    required="adverse/exponential",
                )
            return ["closed-form", MONTE_CARLO]
        methods: list[str] = []
        solver = self.solver
        if isinstance(solver, FavorableSolution):
            if spec.drift == 0:
                exact = isinstance(spec.jumps, ExponentialJumps)
                methods.append("closed-form" if exact else "quadrature")
            else:
                if solver.closed_form_available:
                    methods.append("closed-form")
                methods += ["transform-inversion", "quadrature", "integral-equation"]
        elif isinstance(solver, AdverseSolution):
            if solver.closed_form_available:
                methods.append("closed-form")
            methods.append("integral-equation")
        else:
            if solver.closed_form_available:
                methods.append("closed-form")
            if solver.transform is not None:
                methods.append("transform-inversion")
            methods.append("integral-equation")
        methods.append(MONTE_CARLO)
        return methods

    def resolve_methods(self, method: str | None = None) -> list[str]:
        """Expand 'auto' and 'all' into concrete methods.

        Raises:
            ConfigError: If the method does not apply, or 'all' finds fewer than two
        """
        requested = method or self.config.method
        applicable = self.applicable_methods()
        if requested == "all":
            if len(applicable) < 2:
                raise ConfigError(
                    f"method=all needs two applicable methods, found {applicable}", key="method"
                )
            return applicable
        if requested == "auto":
            return [applicable[0]]
        if requested not in applicable:
            raise ConfigError(
                f"Method '{requested}' does not apply here. Applicable: {', '.join(applicable)}",
                key="method",
            )
        return [requested]

    def _check_grid(self) -> None:
        if self.is_ruin and any(not (_time_key(r) == 0.0) for r in self.config.r_list):
            raise ConfigError("With b = ∞ only r = 0 is solved", key="r_list")

    def analytic_value(self, x: float, r: ObservationTime, method: str) -> float:
        """Mean exit time at (x, r) by one analytic method."""
        if isinstance(self.spec, ContinuumSpec):
            spec = ContinuumSpec(self.spec.drift, self.spec.boundary, self.spec.k_limit, x)
            if method == "closed-form":
                return mean_exit_continuum(spec)
            if method == "transform-inversion":
                return mean_exit_continuum_via_inversion(spec)
            return mean_exit_by_survival(spec)
        if self.is_ruin:
            assert isinstance(self.spec, ProcessSpec)
            ruin = ruin_mean_time(self.spec, x)
            return ruin.value if ruin.is_finite else math.inf  # type: ignore[return-value]
        solver = self.solver
        if _time_key(r) == 0.0:
            return solver.mean_exit_after_jump(x, method)
        return solver.mean_exit_at(x, r, method)

    def simulate_value(self, x: float, r: ObservationTime) -> ExitTimeEstimate:
        spec = self.spec
        assert isinstance(spec, ProcessSpec)
        config = self.config
        options = {
            "paths": config.paths,
            "seed": config.seed,
            "workers": config.workers,
            "truncation": config.truncation,
        }
        if _time_key(r) == 0.0:
            return estimate_exit_after_jump(spec, x, **options)  # type: ignore[arg-type]
        return estimate_exit_at(spec, x, r, **options)  # type: ignore[arg-type]

    def evaluate(self, x: float, r: ObservationTime, method: str) -> ResultRow:
        if method == MONTE_CARLO:
            if x >= self.spec.boundary:
                return ResultRow(x, r, method, 0.0, 0.0, self.config.paths, self.config.seed)
            estimate = self.simulate_value(x, r)
            return ResultRow(
                x, r, method, estimate.mean, estimate.stderr, estimate.paths, self.config.seed
            )
        return ResultRow(x, r, method, self.analytic_value(x, r, method))

    def run(self, methods: Sequence[str]) -> list[ResultRow]:
        """Rows over the x grid for every r and method, ordered by method, r, x."""
        self._check_grid()
        rows = []
        for method in methods:
            logger.info(
                f"🔄 {method}: {len(self.config.x_grid)} positions × "
                f"{len(self.config.r_list)} observation times"
            )
            for r in self.config.r_list:
                for x in self.config.x_grid:
                    rows.append(self.evaluate(x, r, method))
        return rows

    def compute(self, method: str | None = None) -> list[ResultRow]:
        """Analytic rows; Monte Carlo is left to simulate and compare."""
        methods = [m for m in self.resolve_methods(method) if m != MONTE_CARLO]
        if not methods:
            raise ConfigError("compute needs an analytic method; use simulate", key="method")
        return self.run(methods)

    def simulate(self) -> list[ResultRow]:
        if MONTE_CARLO not in self.applicable_methods():
            raise ConfigError("Monte Carlo does not apply to the continuum limit", key="method")
        return self.run([MONTE_CARLO])

    def compare(self) -> ComparisonReport:
        """All applicable methods pairwise at every grid point."""
        rows = self.run(self.resolve_methods("all"))
        return compare_rows(rows, self.config.tolerance)


@dataclass(frozen=True)
class Discrepancy:
    x: float
    r: ObservationTime
    first: str
    second: str
    difference: float
    allowed: float

    @property
    def passed(self) -> bool:
        return abs(self.difference) <= self.allowed


@dataclass
class ComparisonReport:
    entries: list[Discrepancy] = field(default_factory=list)

    @property
    def failures(self) -> list[Discrepancy]:
        return [entry for entry in self.entries if not entry.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        lines = ["x,r,first,second,difference,allowed,status"]
        for e in self.entries:
            status = "pass" if e.passed else "FAIL"
            lines.append(
                f"{format_number(e.x)},{format_time(e.r)},{e.first},{e.second},"
                f"{format_number(e.difference)},{format_number(e.allowed)},{status}"
            )
        return "\n".join(lines) + "\n"


def compare_rows(rows: Sequence[ResultRow], tolerance: float) -> ComparisonReport:
    """Pairwise deviations at each (x, r).

    Analytic pairs pass within ``tolerance``; pairs with a Monte Carlo row
    pass within MC_SIGMAS standard errors.
    """
    grouped: dict[tuple[float, float], list[ResultRow]] = {}
    for row in rows:
        if math.isnan(row.value):
            continue
        grouped.setdefault((row.x, _time_key(row.r)), []).append(row)
    report = ComparisonReport()
    for group in grouped.values():
        for i, first in enumerate(group):
            for second in group[i + 1 :]:
                if first.is_simulated and second.is_simulated:
                    continue
                simulated = first if first.is_simulated else second
                if simulated.is_simulated:
                    assert simulated.stderr is not None
                    allowed = MC_SIGMAS * simulated.stderr
                else:
                    allowed = tolerance
                difference = (
                    0.0
                    if math.isinf(first.value) and first.value == second.value
                    else first.value - second.value
                )
                report.entries.append(
                    Discrepancy(first.x, first.r, first.method, second.method, difference, allowed)
                )
    return report


def _curves(rows: Sequence[ResultRow]) -> dict[str, dict[float, Curve]]:
    """method -> r -> (x, value) sorted in x."""
    collected: dict[str, dict[float, list[tuple[float, float]]]] = {}
    for row in rows:
        collected.setdefault(row.method, {}).setdefault(_time_key(row.r), []).append(
            (row.x, row.value)
        )
    curves: dict[str, dict[float, Curve]] = {}
    for method, by_r in collected.items():
        curves[method] = {}
        for r, points in by_r.items():
            points.sort()
            data = np.array(points, dtype=float)
            curves[method][r] = (data[:, 0], data[:, 1])
    return curves


def _slack(values: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.max(np.abs(values))))


def _is_monotone(x: np.ndarray, values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) <= _slack(values)))


def _has_interior_maximum(x: np.ndarray, values: np.ndarray) -> bool:
    peak = float(np.max(values))
    return bool(peak > values[0] + _slack(values) and peak > values[-1] + _slack(values))


def _argmax(x: np.ndarray, values: np.ndarray) -> float:
    return float(x[int(np.argmax(values))])


def _crossover(after_jump: Curve, late: Curve) -> bool:
    x0, v0 = after_jump
    x1, v1 = late
    if x0.shape != x1.shape or not np.allclose(x0, x1):
        raise ConfigError("Crossover needs curves on a common x grid")
    difference = v1 - v0
    # Both curves vanish at x = b
    inside = np.abs(v0) + np.abs(v1) > _slack(v0)
    if np.count_nonzero(inside) < 2:
        return False
    difference = difference[inside]
    return bool(difference[0] < 0 < difference[-1])


@dataclass(frozen=True)
class PropertyCheck:
    prop: str
    method: str
    holds: bool
    detail: str


def verify_property(rows: Sequence[ResultRow], prop: str) -> list[PropertyCheck]:
    """Evaluate a qualitative property per method on the discrete grid.

    monotone: every curve nonincreasing in x.
    interior-maximum: every curve with r > 0 peaks strictly inside the grid.
    crossover: the latest-r curve lies below the r = 0 curve at the left end
        and above it at the right end.
    argmax-nondecreasing: the position of the maximum does not decrease with r.

    Raises:
        ConfigError: If the property is unknown or the rows cannot decide it
    """
    if prop not in PROPERTIES:
        raise ConfigError(f"Unknown property '{prop}'. Must be one of: {', '.join(PROPERTIES)}")
    if not rows:
        raise ConfigError("No rows to verify")
    checks = []
    for method, by_r in _curves(rows).items():
        times = sorted(by_r)
        if prop == "monotone":
            bad = [r for r in times if not _is_monotone(*by_r[r])]
            checks.append(PropertyCheck(prop, method, not bad, f"increasing at r={bad}"))
        elif prop == "interior-maximum":
            observed = [r for r in times if r > 0] or times
            bad = [r for r in observed if not _has_interior_maximum(*by_r[r])]
            checks.append(PropertyCheck(prop, method, not bad, f"boundary maximum at r={bad}"))
        elif prop == "crossover":
            if 0.0 not in by_r or len(times) < 2:
                raise ConfigError(f"Crossover needs an r = 0 curve and a later one ({method})")
            holds = _crossover(by_r[0.0], by_r[times[-1]])
            checks.append(PropertyCheck(prop, method, holds, f"r=0 against r={times[-1]}"))
        else:
            peaks = [_argmax(*by_r[r]) for r in times]
            holds = all(b >= a - 1e-12 for a, b in zip(peaks, peaks[1:], strict=False))
            checks.append(PropertyCheck(prop, method, holds, f"argmax {peaks} at r={times}"))
    for check in checks:
        if check.holds:
            logger.info(f"✅ {check.prop} holds [{check.method}]")
        else:
            logger.info(f"❌ {check.prop} fails [{check.method}]: {check.detail}")
    return checks


# Figure parameter sets (b = 1, v = 0.1, Erlang-2 waiting with λ = 1, exponential jumps)
FIGURE_PRESETS: dict[str, dict[str, object]] = {
    "favorable": {"regime": "favorable", "jump_rate": 0.1},
    "adverse-large-jumps": {"regime": "adverse", "jump_rate": 0.1},
    "adverse-small-jumps": {"regime": "adverse", "jump_rate": 4.0},
}
FIGURE_TIMES: tuple[ObservationTime, ...] = (0.0, 0.4, 10.0)


def figure_configs(base: RunConfig) -> dict[str, RunConfig]:
    """Configurations behind the published curves, keeping the base run settings."""
    configs = {}
    for name, values in FIGURE_PRESETS.items():
        configs[name] = base.replace(
            waiting="erlang",
            waiting_rate=1.0,
            waiting_shape=2,
            jumps="exponential",
            drift=0.1,
            boundary=1.0,
            r_list=FIGURE_TIMES,
            **values,
        )
    return configs


def sweep_configs(base: RunConfig, param: str, values: Sequence[str]) -> dict[str, RunConfig]:
    """One configuration per value of ``param``, labelled ``param=value``."""
    configs = {}
    for text in values:
        configs[f"{param}={text}"] = base.replace(**{param: parse_value(param, text)})
    return configs


def sweep_file_name(label: str) -> str:
    return label.replace("=", "_").replace("/", "_") + ".csv"

