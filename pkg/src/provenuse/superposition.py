"""Superposition of many rare renewal processes, and rare-event triggering.

Superposing n independent renewal components whose individual event rates
all shrink as the component count grows drives the merged process toward a
homogeneous Poisson process with intensity sum(1/a_i), a_i the component
mean inter-arrival times.  The third classical condition for that limit is
implemented as uniform negligibility: max_i P(component i has an event in a
bounded set) -> 0, which the convergence study enforces by scaling the
per-component means linearly with n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .distributions import DistributionSpec
from .generators import simulate_renewal
from .streams import RngStream
from .timeline import EventTimeline


@dataclass(frozen=True)
class ComponentSpec:
    """One latent fault's activation process: a renewal inter-arrival law."""

    dist: DistributionSpec
    label: str | None = None


@dataclass(frozen=True)
class SuperpositionSpec:
    components: tuple[ComponentSpec, ...]
    horizon: float

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if not comps:
            raise ValueError("superposition needs at least one component")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        object.__setattr__(self, "components", comps)


def grigelionis_intensity(component_means: Sequence[float]) -> float:
    """Limit intensity sum(1/a_i) of a superposition, in 1/hours."""
    means = list(component_means)
    if not means:
        raise ValueError("need at least one component mean")
    if any(m <= 0 for m in means):
        raise ValueError("component means must be > 0")
    return float(sum(1.0 / m for m in means))


def superpose(timelines: Iterable[EventTimeline]) -> EventTimeline:
    """Merge timelines sharing one window into their sorted union.

    The merge is stable: exact ties keep component order.  Total event count
    is conserved.
    """
    ts = list(timelines)
    if not ts:
        raise ValueError("need at least one timeline to superpose")
    window = ts[0].window_end
    for t in ts[1:]:
        if t.window_end != window:
            raise ValueError(
                f"mismatched observation windows: {t.window_end} != {window}"
            )
    merged = np.concatenate([t.events for t in ts])
    merged = np.sort(merged, kind="stable")
    return EventTimeline(window, merged)


def simulate_superposition(
    spec: SuperpositionSpec, rng: RngStream
) -> tuple[EventTimeline, float]:
    """Simulate every component independently and merge.

    Component i draws from ``rng.split(i)``, so components are independent
    and may be simulated concurrently.  Returns the merged timeline together
    with the theoretical limit intensity of the superposition.
    """
    rate = grigelionis_intensity([c.dist.mean for c in spec.components])
    parts = [
        simulate_renewal(c.dist, spec.horizon, rng.split(i))
        for i, c in enumerate(spec.components)
    ]
    return superpose(parts), rate


def rare_event_hitting(
    p_fault: float,
    n_steps: int,
    step_duration: float,
    rng: RngStream,
    unit_id: str | None = None,
) -> EventTimeline:
    """Hit a rare fault set with probability ``p_fault`` per process step.

    Each of ``n_steps`` steps independently lands in the fault set; step k
    hitting yields an event at k * step_duration.  Sampling draws the
    geometric step gaps between hits directly, which is the arrival-time
    form of the same Bernoulli-per-step process.  An empty timeline is a
    valid outcome.
    """
    if not 0.0 < p_fault < 1.0:
        raise ValueError(f"p_fault must lie strictly between 0 and 1, got {p_fault}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if step_duration <= 0:
        raise ValueError(f"step_duration must be > 0, got {step_duration}")
    gen = rng.generator()
    hits: list[np.ndarray] = []
    position = 0
    while True:
        remaining = n_steps - position
        block = max(16, int(1.25 * remaining * p_fault) + 16)
        steps = position + np.cumsum(gen.geometric(p_fault, block))
        hits.append(steps[steps <= n_steps])
        if steps[-1] > n_steps:
            break
        position = int(steps[-1])
    step_index = np.concatenate(hits)
    return EventTimeline(n_steps * step_duration, step_index * step_duration, unit_id)


# --- convergence study -----------------------------------------------------

_SHAPE_PARAMS: dict[str, tuple[str, ...]] = {
    "exponential": (),
    "weibull": ("shape",),
    "gamma": ("shape",),
    "lognormal": ("log_sd",),
}


def scaled_to_mean(family: str, shape_params: Mapping[str, float], mean: float) -> DistributionSpec:
    """Distribution of the given family and shape with the requested mean.

    Degenerate laws are rejected: a superposition of deterministic lattice
    processes need not approach a Poisson process at any finite count.
    """
    if family == "degenerate":
        raise ValueError("degenerate components are not admissible in convergence studies")
    if family not in _SHAPE_PARAMS:
        raise ValueError(f"unknown family {family!r}")
    if mean <= 0:
        raise ValueError(f"mean must be > 0, got {mean}")
    expected = _SHAPE_PARAMS[family]
    given = {k: float(v) for k, v in dict(shape_params).items()}
    if set(given) != set(expected):
        raise ValueError(f"{family} takes shape parameters {sorted(expected)}, got {sorted(given)}")
    if family == "exponential":
        return DistributionSpec("exponential", {"rate": 1.0 / mean})
    if family == "weibull":
        shape = given["shape"]
        return DistributionSpec(
            "weibull", {"shape": shape, "scale": mean / math.gamma(1.0 + 1.0 / shape)}
        )
    if family == "gamma":
        shape = given["shape"]
        return DistributionSpec("gamma", {"shape": shape, "scale": mean / shape})
    log_sd = given["log_sd"]
    return DistributionSpec(
        "lognormal", {"log_mean": math.log(mean) - 0.5 * log_sd**2, "log_sd": log_sd}
    )


@dataclass(frozen=True)
class ConvergenceTemplate:
    """Component family held fixed while the component count n varies.

    For each n the per-component mean is n / total_rate, keeping the summed
    intensity of the superposition constant at ``total_rate``.
    """

    family: str
    shape_params: Mapping[str, float] = field(default_factory=dict)
    total_rate: float = 1.0
    horizon: float = 1000.0

    def __post_init__(self) -> None:
        if self.total_rate <= 0:
            raise ValueError(f"total_rate must be > 0, got {self.total_rate}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        # fail fast on a bad family/shape combination
        scaled_to_mean(self.family, self.shape_params, 1.0)
        object.__setattr__(self, "shape_params", dict(self.shape_params))

    def spec_for(self, n: int) -> SuperpositionSpec:
        if n < 1:
            raise ValueError(f"component count must be >= 1, got {n}")
        dist = scaled_to_mean(self.family, self.shape_params, n / self.total_rate)
        return SuperpositionSpec((ComponentSpec(dist),) * n, self.horizon)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    replications: int
    pass_fraction: float
    empirical_rate_mean: float
    theoretical_rate: float


def convergence_study(
    template: ConvergenceTemplate,
    n_values: Sequence[int],
    replications: int,
    rng: RngStream,
    config=None,
) -> list[ConvergenceRow]:
    """Fraction of replications whose merged timeline passes the full
    Poisson-assumption suite, per component count n.

    With total intensity fixed, that fraction should rise toward the suite's
    calibrated null level as n grows.  Replication r of the k-th n value
    consumes streams split(k, r, 0) (simulation) and split(k, r, 1)
    (validation bootstrap).  ``replications=0`` yields an empty table.
    """
    from .validation import ValidationConfig, assess_poisson

    if replications < 0:
        raise ValueError(f"replications must be >= 0, got {replications}")
    if config is None:
        config = ValidationConfig()
    rows: list[ConvergenceRow] = []
    if replications == 0:
        return rows
    for k, n in enumerate(n_values):
        spec = template.spec_for(int(n))
        passes = 0
        rate_sum = 0.0
        for r in range(replications):
            merged, theoretical = simulate_superposition(spec, rng.split(k, r, 0))
            report = assess_poisson(merged, config, rng.split(k, r, 1))
            passes += 1 if report.overall else 0
            rate_sum += len(merged) / spec.horizon
        rows.append(
            ConvergenceRow(
                n=int(n),
                replications=replications,
                pass_fraction=passes / replications,
                empirical_rate_mean=rate_sum / replications,
                theoretical_rate=template.total_rate,
            )
        )
    return rows


CONVERGENCE_CSV_HEADER = "n,replications,pass_fraction,empirical_rate_mean,theoretical_rate"


def write_convergence_csv(rows: Sequence[ConvergenceRow], path: str | Path) -> None:
    lines = [CONVERGENCE_CSV_HEADER]
    lines.extend(
        f"{row.n},{row.replications},{row.pass_fraction!r},"
        f"{row.empirical_rate_mean!r},{row.theoretical_rate!r}"
        for row in rows
    )
    Path(path).write_text("\n".join(lines) + "\n")
