"""Statistical checks of the four Poisson assumptions on an event timeline.

The assumption-to-test mapping is this library's choice and is recorded in
every emitted report:

  homogeneity      Laplace trend test (centroid of event times vs window)
  independence     index-of-dispersion test on equal-width bin counts
  proportionality  exponential goodness of fit on inter-arrival gaps
                   (rare-event proportionality shows up as exponential gaps)
  singularity      minimum consecutive gap against a coincidence width

The exponential GOF handles the estimated rate by parametric bootstrap,
which is exact at any sample size at some CPU cost.  All verdicts are
tri-state: pass, fail, or insufficient_data; a report's overall verdict is
the conjunction of four passes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import stats

from .streams import RngStream
from .timeline import EventTimeline

PASS = "pass"
FAIL = "fail"
INSUFFICIENT = "insufficient_data"


def _check_significance(significance: float) -> None:
    if not 0.0 < significance < 1.0:
        raise ValueError(f"significance must lie strictly between 0 and 1, got {significance}")


@dataclass(frozen=True)
class TestResult:
    name: str
    statistic: float | None
    p_value: float | None
    verdict: str
    method: str
    parameters: Mapping[str, float] = field(default_factory=dict)
    details: str = ""

    def __post_init__(self) -> None:
        if self.verdict not in (PASS, FAIL, INSUFFICIENT):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value must lie in [0, 1], got {self.p_value}")
        object.__setattr__(self, "parameters", dict(self.parameters))

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "verdict": self.verdict,
            "method": self.method,
            "parameters": dict(self.parameters),
            "details": self.details,
        }


def _verdict(p_value: float, significance: float) -> str:
    return PASS if p_value >= significance else FAIL


def laplace_trend_test(timeline: EventTimeline, significance: float = 0.05) -> TestResult:
    """Trend (homogeneity) test: U = (sum t_i - n T/2) / (T sqrt(n/12)).

    Under a homogeneous process U is asymptotically standard normal; the
    p-value is two-sided, so both growth and decay trends fail.
    """
    _check_significance(significance)
    n = len(timeline)
    T = timeline.window_end
    params = {"significance": significance, "n": float(n)}
    if n < 3:
        return TestResult(
            "homogeneity", None, None, INSUFFICIENT, "laplace_trend", params,
            f"need at least 3 events for a trend verdict, got {n}",
        )
    u = (float(timeline.events.sum()) - n * T / 2.0) / (T * math.sqrt(n / 12.0))
    p = float(2.0 * stats.norm.sf(abs(u)))
    return TestResult(
        "homogeneity", u, p, _verdict(p, significance), "laplace_trend", params,
    )


def _ks_exponential_distance(x_sorted: np.ndarray, rate) -> np.ndarray:
    """KS distance between sorted samples (last axis) and Exponential(rate)."""
    n = x_sorted.shape[-1]
    cdf = -np.expm1(-np.asarray(rate)[..., None] * x_sorted)
    steps = np.arange(1, n + 1, dtype=float)
    d_plus = (steps / n - cdf).max(axis=-1)
    d_minus = (cdf - (steps - 1.0) / n).max(axis=-1)
    return np.maximum(d_plus, d_minus)


def exp_gof_test(
    timeline: EventTimeline,
    significance: float = 0.05,
    mc_resamples: int = 1000,
    rng: RngStream = RngStream(0),
) -> TestResult:
    """Exponential goodness of fit on the inter-arrival gaps.

    The rate is estimated from the data (n / sum of gaps), so the null
    distribution of the KS statistic is obtained by parametric bootstrap
    with the rate re-estimated on every resample; that null is scale-free,
    making the verdict invariant under time rescaling.  The p-value is the
    usual Monte Carlo estimate (1 + exceedances) / (resamples + 1).
    """
    _check_significance(significance)
    if mc_resamples < 1:
        raise ValueError(f"mc_resamples must be >= 1, got {mc_resamples}")
    gaps = timeline.gaps()
    n = gaps.size
    params = {"significance": significance, "n": float(n), "mc_resamples": float(mc_resamples)}
    if n < 5:
        return TestResult(
            "proportionality", None, None, INSUFFICIENT, "exp_gof_bootstrap_ks", params,
            f"need at least 5 inter-arrival gaps, got {n}",
        )
    rate_hat = n / float(gaps.sum())
    d_obs = float(_ks_exponential_distance(np.sort(gaps), rate_hat))
    sims = rng.generator().exponential(1.0, size=(mc_resamples, n))
    sims.sort(axis=1)
    rates = n / sims.sum(axis=1)
    d_null = _ks_exponential_distance(sims, rates)
    p = float((1 + int((d_null >= d_obs).sum())) / (mc_resamples + 1))
    params["rate_estimate"] = rate_hat
    return TestResult(
        "proportionality", d_obs, p, _verdict(p, significance), "exp_gof_bootstrap_ks", params,
    )


def dispersion_test(
    timeline: EventTimeline, k_bins: int = 20, significance: float = 0.05
) -> TestResult:
    """Index-of-dispersion (independence) test on k equal-width bin counts.

    D = sum (c_j - cbar)^2 / cbar is chi-square with k-1 degrees of freedom
    under the Poisson null.  Two-sided: clustering (over-dispersion) and
    regularity (under-dispersion) both fail.
    """
    _check_significance(significance)
    if k_bins < 2:
        raise ValueError(f"k_bins must be >= 2, got {k_bins}")
    n = len(timeline)
    params = {"significance": significance, "k_bins": float(k_bins), "n": float(n)}
    if n == 0:
        return TestResult(
            "independence", None, None, INSUFFICIENT, "dispersion_chi2", params,
            "empty timeline",
        )
    counts, _ = np.histogram(timeline.events, bins=k_bins, range=(0.0, timeline.window_end))
    cbar = n / k_bins
    d = float(((counts - cbar) ** 2).sum() / cbar)
    cdf = float(stats.chi2.cdf(d, k_bins - 1))
    p = min(1.0, 2.0 * min(cdf, 1.0 - cdf))
    details = "" if cbar >= 5 else (
        f"expected count per bin {cbar:.2f} < 5; chi-square approximation is weak"
    )
    return TestResult(
        "independence", d, p, _verdict(p, significance), "dispersion_chi2", params, details,
    )


def singularity_check(timeline: EventTimeline, epsilon: float = 0.0) -> TestResult:
    """Coincidence check: the smallest consecutive gap must exceed epsilon.

    Deterministic (no p-value).  Fewer than two events pass trivially.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    params = {"epsilon": epsilon, "n": float(len(timeline))}
    if len(timeline) < 2:
        return TestResult(
            "singularity", math.inf, None, PASS, "min_gap", params,
            "fewer than two events, nothing can coincide",
        )
    min_gap = float(np.diff(timeline.events).min())
    verdict = PASS if min_gap > epsilon else FAIL
    return TestResult("singularity", min_gap, None, verdict, "min_gap", params)


@dataclass(frozen=True)
class ValidationConfig:
    """Knobs for the assumption suite.

    ``familywise_correction`` divides the per-test significance by the
    number of p-value tests (3); off by default, since running four checks
    inflates the family-wise error rate and reports say so.
    """

    significance: float = 0.05
    bins: int = 20
    epsilon: float = 0.0
    resamples: int = 1000
    familywise_correction: bool = False

    def __post_init__(self) -> None:
        _check_significance(self.significance)
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.resamples < 1:
            raise ValueError(f"resamples must be >= 1, got {self.resamples}")

    @property
    def per_test_significance(self) -> float:
        return self.significance / 3.0 if self.familywise_correction else self.significance


@dataclass(frozen=True)
class AssumptionReport:
    proportionality: TestResult
    singularity: TestResult
    homogeneity: TestResult
    independence: TestResult
    overall: bool

    def results(self) -> tuple[TestResult, TestResult, TestResult, TestResult]:
        return (self.proportionality, self.singularity, self.homogeneity, self.independence)

    def to_dict(self) -> dict:
        return {
            "proportionality": self.proportionality.to_dict(),
            "singularity": self.singularity.to_dict(),
            "homogeneity": self.homogeneity.to_dict(),
            "independence": self.independence.to_dict(),
            "overall": self.overall,
        }


def assess_poisson(
    timeline: EventTimeline,
    config: ValidationConfig = ValidationConfig(),
    rng: RngStream = RngStream(0),
) -> AssumptionReport:
    """Run all four assumption tests and conjoin their verdicts.

    Insufficient data on any test counts as a non-pass with the reason in
    the result.  The bootstrap consumes ``rng.split(0)``, so reports are
    bit-reproducible for a fixed stream.
    """
    alpha = config.per_test_significance
    homogeneity = laplace_trend_test(timeline, alpha)
    independence = dispersion_test(timeline, config.bins, alpha)
    proportionality = exp_gof_test(timeline, alpha, config.resamples, rng.split(0))
    singularity = singularity_check(timeline, config.epsilon)
    overall = all(
        r.verdict == PASS for r in (proportionality, singularity, homogeneity, independence)
    )
    return AssumptionReport(proportionality, singularity, homogeneity, independence, overall)


def summarize_report(report: AssumptionReport) -> str:
    """Stable-ordered plain-text rendering of an assumption report."""
    lines = ["Poisson assumption report", "-" * 25]
    for label, result in (
        ("proportionality", report.proportionality),
        ("singularity", report.singularity),
        ("homogeneity", report.homogeneity),
        ("independence", report.independence),
    ):
        stat = "n/a" if result.statistic is None else f"{result.statistic:.6g}"
        pval = "n/a" if result.p_value is None else f"{result.p_value:.4g}"
        line = f"{label:<16} {result.verdict:<17} statistic={stat:<12} p={pval:<8} [{result.method}]"
        if result.details:
            line += f" ({result.details})"
        lines.append(line)
    lines.append(f"overall          {'pass' if report.overall else 'fail'}")
    lines.append(
        "note: four tests at the per-test significance inflate family-wise error;"
        " enable familywise_correction to split the level across tests"
    )
    return "\n".join(lines)
