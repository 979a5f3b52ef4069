"""Renewal-process and (non-)homogeneous Poisson-process generators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .distributions import DistributionSpec
from .streams import RngStream
from .timeline import EventTimeline

PROFILE_KINDS = ("constant", "loglinear", "powerlaw")

_PROFILE_PARAMS: dict[str, tuple[str, ...]] = {
    "constant": ("lambda0",),
    "loglinear": ("lambda0", "beta"),
    "powerlaw": ("lambda0", "shape"),
}


@dataclass(frozen=True)
class IntensityProfile:
    """Intensity law lambda(t) of a non-homogeneous Poisson process.

    constant    lambda(t) = lambda0
    loglinear   lambda(t) = lambda0 * exp(beta * t)   (beta may be negative)
    powerlaw    lambda(t) = lambda0 * shape * t**(shape - 1)
    """

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in _PROFILE_PARAMS:
            raise ValueError(
                f"unknown intensity kind {self.kind!r}; expected one of {PROFILE_KINDS}"
            )
        required = _PROFILE_PARAMS[self.kind]
        given = {k: float(v) for k, v in dict(self.params).items()}
        if set(given) != set(required):
            raise ValueError(f"{self.kind} takes parameters {sorted(required)}, got {sorted(given)}")
        if any(not math.isfinite(v) for v in given.values()):
            raise ValueError(f"{self.kind} parameters must be finite, got {given}")
        if given["lambda0"] <= 0:
            raise ValueError(f"lambda0 must be > 0, got {given['lambda0']}")
        if self.kind == "powerlaw" and given["shape"] <= 0:
            raise ValueError(f"powerlaw shape must be > 0, got {given['shape']}")
        object.__setattr__(self, "params", given)

    def value(self, t):
        """lambda(t); accepts scalars or arrays."""
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "constant":
            return np.broadcast_to(p["lambda0"], t.shape).copy()
        if self.kind == "loglinear":
            return p["lambda0"] * np.exp(p["beta"] * t)
        shape = p["shape"]
        with np.errstate(divide="ignore"):
            return p["lambda0"] * shape * np.power(t, shape - 1.0)

    def cumulative(self, t: float) -> float:
        """Integral of lambda over [0, t]."""
        p = self.params
        if self.kind == "constant":
            return p["lambda0"] * t
        if self.kind == "loglinear":
            beta = p["beta"]
            if beta == 0.0:
                return p["lambda0"] * t
            return p["lambda0"] * math.expm1(beta * t) / beta
        return p["lambda0"] * t ** p["shape"]

    def inverse_cumulative(self, x: np.ndarray) -> np.ndarray:
        """Inverse of the cumulative intensity, for the time-transform method."""
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "constant":
            return x / p["lambda0"]
        if self.kind == "loglinear":
            beta = p["beta"]
            if beta == 0.0:
                return x / p["lambda0"]
            return np.log1p(beta * x / p["lambda0"]) / beta
        return np.power(x / p["lambda0"], 1.0 / p["shape"])

    def bound_on(self, horizon: float) -> float | None:
        """Supremum of lambda over (0, horizon]; ``None`` when unbounded."""
        p = self.params
        if self.kind == "constant":
            return p["lambda0"]
        if self.kind == "loglinear":
            return float(max(self.value(0.0), self.value(horizon)))
        if p["shape"] < 1.0:
            return None  # lambda blows up at t -> 0+
        return float(self.value(horizon)) if p["shape"] > 1.0 else p["lambda0"]

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, data: Mapping) -> "IntensityProfile":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind is None:
            raise ValueError("intensity object needs a 'kind' field")
        return cls(kind, data)


def constant(lambda0: float) -> IntensityProfile:
    return IntensityProfile("constant", {"lambda0": lambda0})


def loglinear(lambda0: float, beta: float) -> IntensityProfile:
    return IntensityProfile("loglinear", {"lambda0": lambda0, "beta": beta})


def powerlaw(lambda0: float, shape: float) -> IntensityProfile:
    return IntensityProfile("powerlaw", {"lambda0": lambda0, "shape": shape})


def _cumulative_draws(draw: Callable[[int], np.ndarray], limit: float, mean_gap: float) -> np.ndarray:
    """Cumulative sums of positive draws up to (and one past) ``limit``.

    Draws in blocks sized from the expected gap; the block schedule depends
    only on the drawn values, so output is bit-reproducible per stream.
    """
    parts: list[np.ndarray] = []
    offset = 0.0
    while True:
        remaining = max(limit - offset, 0.0)
        block = max(16, int(1.25 * remaining / mean_gap) + 16)
        times = offset + np.cumsum(draw(block))
        parts.append(times[times <= limit])
        if times[-1] > limit:
            break
        offset = float(times[-1])
    return np.concatenate(parts)


def simulate_renewal(
    dist: DistributionSpec,
    horizon: float,
    rng: RngStream,
    unit_id: str | None = None,
) -> EventTimeline:
    """Simulate a renewal process: cumulative sums of iid draws from ``dist``.

    Events falling exactly on ``horizon`` are kept (open-closed window).
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    gen = rng.generator()
    events = _cumulative_draws(lambda n: dist.draw(gen, n), horizon, dist.mean)
    return EventTimeline(horizon, events, unit_id)


def simulate_nhpp(
    profile: IntensityProfile,
    horizon: float,
    rng: RngStream,
    unit_id: str | None = None,
    method: str = "inverse",
) -> EventTimeline:
    """Simulate a Poisson process with the given intensity profile.

    ``method="inverse"`` (default) generates a unit-rate process on
    [0, Lambda(horizon)] and maps it through the inverse cumulative
    intensity; it is exact for every supported profile.  ``method="thinning"``
    generates at the peak rate and keeps each event with probability
    lambda(t)/lambda_max; it rejects profiles whose intensity is unbounded on
    the window (power law with shape < 1).
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    gen = rng.generator()
    if method == "inverse":
        total = profile.cumulative(horizon)
        if total <= 0:
            return EventTimeline(horizon, np.empty(0), unit_id)
        unit_times = _cumulative_draws(lambda n: gen.exponential(1.0, n), total, 1.0)
        events = profile.inverse_cumulative(unit_times)
        # guard against float drift from the inverse mapping at the edges
        events = events[(events > 0) & (events <= horizon)]
        return EventTimeline(horizon, events, unit_id)
    if method == "thinning":
        lam_max = profile.bound_on(horizon)
        if lam_max is None:
            raise ValueError(
                f"{profile.kind}{dict(profile.params)} has unbounded intensity on the window; "
                "thinning is not applicable, use method='inverse'"
            )
        if lam_max <= 0:
            return EventTimeline(horizon, np.empty(0), unit_id)
        candidates = _cumulative_draws(
            lambda n: gen.exponential(1.0 / lam_max, n), horizon, 1.0 / lam_max
        )
        accept = gen.random(candidates.size) < profile.value(candidates) / lam_max
        return EventTimeline(horizon, candidates[accept], unit_id)
    raise ValueError(f"unknown method {method!r}; expected 'inverse' or 'thinning'")
