"""Parametric positive laws used as inter-arrival distributions.

All parameters and draws are in hours.  The supported families cover light
tails (exponential, gamma), heavy tails (lognormal), aging/wear shapes
(Weibull) and a deterministic extreme (degenerate) that makes exactness
tests possible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .streams import RngStream

KINDS = ("exponential", "weibull", "gamma", "lognormal", "degenerate")

_PARAMS: dict[str, tuple[str, ...]] = {
    "exponential": ("rate",),
    "weibull": ("shape", "scale"),
    "gamma": ("shape", "scale"),
    "lognormal": ("log_mean", "log_sd"),
    "degenerate": ("value",),
}

# log_mean is a location in log space; any finite real is admissible there,
# every other parameter must be strictly positive.
_SIGNED = frozenset({"log_mean"})


@dataclass(frozen=True)
class DistributionSpec:
    """A strictly positive inter-arrival law with a finite mean."""

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in _PARAMS:
            raise ValueError(f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        required = _PARAMS[self.kind]
        given = dict(self.params)
        if set(given) != set(required):
            raise ValueError(
                f"{self.kind} takes parameters {sorted(required)}, got {sorted(given)}"
            )
        for name, value in given.items():
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{self.kind} parameter {name} must be finite, got {value}")
            if name not in _SIGNED and value <= 0:
                raise ValueError(f"{self.kind} parameter {name} must be > 0, got {value}")
            given[name] = value
        object.__setattr__(self, "params", given)
        m = self.mean
        if not math.isfinite(m) or m <= 0:
            raise ValueError(f"{self.kind}{given} has non-finite or non-positive mean {m}")

    @property
    def mean(self) -> float:
        """Analytic mean of the law, in hours."""
        p = self.params
        if self.kind == "exponential":
            return 1.0 / p["rate"]
        if self.kind == "weibull":
            return p["scale"] * math.gamma(1.0 + 1.0 / p["shape"])
        if self.kind == "gamma":
            return p["shape"] * p["scale"]
        if self.kind == "lognormal":
            return math.exp(p["log_mean"] + 0.5 * p["log_sd"] ** 2)
        return p["value"]

    def draw(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` samples using a live generator (advances its state)."""
        p = self.params
        if self.kind == "exponential":
            return gen.exponential(1.0 / p["rate"], size)
        if self.kind == "weibull":
            return p["scale"] * gen.weibull(p["shape"], size)
        if self.kind == "gamma":
            return gen.gamma(p["shape"], p["scale"], size)
        if self.kind == "lognormal":
            return gen.lognormal(p["log_mean"], p["log_sd"], size)
        return np.full(size, p["value"])

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, data: Mapping) -> "DistributionSpec":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind is None:
            raise ValueError("distribution object needs a 'kind' field")
        return cls(kind, data)


def exponential(rate: float) -> DistributionSpec:
    return DistributionSpec("exponential", {"rate": rate})


def weibull(shape: float, scale: float) -> DistributionSpec:
    return DistributionSpec("weibull", {"shape": shape, "scale": scale})


def gamma(shape: float, scale: float) -> DistributionSpec:
    return DistributionSpec("gamma", {"shape": shape, "scale": scale})


def lognormal(log_mean: float, log_sd: float) -> DistributionSpec:
    return DistributionSpec("lognormal", {"log_mean": log_mean, "log_sd": log_sd})


def degenerate(value: float) -> DistributionSpec:
    return DistributionSpec("degenerate", {"value": value})


def mean_of(dist: DistributionSpec) -> float:
    """Analytic mean inter-arrival time of ``dist``, in hours."""
    return dist.mean


def sample(dist: DistributionSpec, rng: RngStream, size: int | None = None):
    """Draw from ``dist``.

    Pure in ``(dist, rng)``: the same stream handle always returns the same
    draw(s).  Use distinct stream splits, or ``size > 1``, for fresh values.
    """
    n = 1 if size is None else int(size)
    if n < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    out = dist.draw(rng.generator(), n)
    return float(out[0]) if size is None else out
