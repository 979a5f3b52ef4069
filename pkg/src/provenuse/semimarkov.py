"""Semi-Markov model of a modular program and its failure process.

Program modules are states; control transfers between them follow an
embedded Markov chain with arbitrary positive sojourn laws per module.
Failures arise two ways: a constant-rate Poisson clock while control sits
inside a module, and a Bernoulli coin on every transfer of control.  In the
rare-failure regime the pooled failure process is asymptotically Poisson;
:func:`asymptotic_failure_rate` evaluates its long-run rate by
renewal-reward over the stationary embedded chain, and
:func:`simulate_modular` produces sample paths to check it against.
"""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .distributions import DistributionSpec
from .streams import RngStream
from .timeline import EventTimeline

_ROW_SUM_TOL = 1e-9
_RESIDUAL_TOL = 1e-10


def _check_transition_matrix(P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise ValueError(f"transition matrix must be square and non-empty, got shape {P.shape}")
    if np.any(P < 0) or np.any(P > 1):
        raise ValueError("transition probabilities must lie in [0, 1]")
    sums = P.sum(axis=1)
    bad = np.where(np.abs(sums - 1.0) > _ROW_SUM_TOL)[0]
    if bad.size:
        raise ValueError(f"rows {bad.tolist()} of the transition matrix do not sum to 1: {sums[bad]}")
    n_comp, _ = connected_components(csr_matrix(P > 0), directed=True, connection="strong")
    if n_comp != 1:
        raise ValueError("embedded chain is reducible; a single communicating class is required")
    return P


def stationary_embedded(P: Sequence[Sequence[float]]) -> np.ndarray:
    """Stationary distribution pi of an irreducible row-stochastic matrix.

    Solved directly from pi P = pi with the normalization sum(pi) = 1; the
    fixed-point residual is checked to 1e-10 before returning.
    """
    P = _check_transition_matrix(np.asarray(P, dtype=float))
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.max(np.abs(pi @ P - pi)))
    if residual >= _RESIDUAL_TOL:
        raise ArithmeticError(f"stationary solve residual {residual} exceeds {_RESIDUAL_TOL}")
    return pi


@dataclass(frozen=True, eq=False)
class SemiMarkovModel:
    """Modules-as-states program structure with failure mechanisms.

    ``transition`` is the embedded row-stochastic matrix, ``sojourn`` one
    positive law per state (hours), ``module_rate`` the in-module Poisson
    failure rate per state (1/h), and ``transfer_fail`` the probability that
    transferring control from i to j fails.  The embedded chain must be
    irreducible; this is validated at construction, along with the
    stationary distribution used for rate evaluation and block sizing.
    """

    states: tuple[str, ...]
    transition: np.ndarray
    sojourn: tuple[DistributionSpec, ...]
    module_rate: np.ndarray
    transfer_fail: np.ndarray
    stationary: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        states = tuple(str(s) for s in self.states)
        if not states:
            raise ValueError("model needs at least one state")
        if len(set(states)) != len(states):
            raise ValueError("state labels must be unique")
        n = len(states)
        P = _check_transition_matrix(np.asarray(self.transition, dtype=float))
        if P.shape[0] != n:
            raise ValueError(f"transition matrix is {P.shape[0]}x{P.shape[0]} but there are {n} states")
        sojourn = tuple(self.sojourn)
        if len(sojourn) != n:
            raise ValueError(f"need one sojourn law per state ({n}), got {len(sojourn)}")
        rates = np.asarray(self.module_rate, dtype=float).reshape(-1)
        if rates.size != n:
            raise ValueError(f"need one module failure rate per state ({n}), got {rates.size}")
        if np.any(rates < 0) or not np.all(np.isfinite(rates)):
            raise ValueError("module failure rates must be finite and >= 0")
        q = np.asarray(self.transfer_fail, dtype=float)
        if q.shape != (n, n):
            raise ValueError(f"transfer_fail must be {n}x{n}, got {q.shape}")
        if np.any(q < 0) or np.any(q > 1):
            raise ValueError("transfer failure probabilities must lie in [0, 1]")
        for arr in (P, rates, q):
            arr.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "sojourn", sojourn)
        object.__setattr__(self, "module_rate", rates)
        object.__setattr__(self, "transfer_fail", q)
        pi = stationary_embedded(P)
        pi.setflags(write=False)
        object.__setattr__(self, "stationary", pi)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def sojourn_means(self) -> np.ndarray:
        return np.array([d.mean for d in self.sojourn])

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "P": self.transition.tolist(),
            "sojourn": [d.to_dict() for d in self.sojourn],
            "module_rate": self.module_rate.tolist(),
            "transfer_fail": self.transfer_fail.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SemiMarkovModel":
        missing = {"states", "P", "sojourn", "module_rate", "transfer_fail"} - set(data)
        if missing:
            raise ValueError(f"model definition is missing fields: {sorted(missing)}")
        return cls(
            states=tuple(data["states"]),
            transition=np.asarray(data["P"], dtype=float),
            sojourn=tuple(DistributionSpec.from_dict(d) for d in data["sojourn"]),
            module_rate=np.asarray(data["module_rate"], dtype=float),
            transfer_fail=np.asarray(data["transfer_fail"], dtype=float),
        )


def load_model(path: str | Path) -> SemiMarkovModel:
    """Load a model definition file (JSON; see README for the schema)."""
    with open(path) as fh:
        return SemiMarkovModel.from_dict(json.load(fh))


def dump_model(model: SemiMarkovModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


def asymptotic_failure_rate(model: SemiMarkovModel) -> float:
    """Long-run failures per hour in the stationary regime.

    Renewal-reward over the embedded chain: expected failures per jump
    (in-module Poisson during the sojourn, plus the transfer coin) divided
    by the expected time per jump,

        rate = (sum_i pi_i m_i lambda_i + sum_i pi_i sum_j P_ij q_ij)
               / sum_i pi_i m_i.
    """
    pi = model.stationary
    m = model.sojourn_means()
    per_jump_failures = float(pi @ (m * model.module_rate)) + float(
        pi @ (model.transition * model.transfer_fail).sum(axis=1)
    )
    return per_jump_failures / float(pi @ m)


def rarity_warning(
    model: SemiMarkovModel,
    sojourn_threshold: float = 0.01,
    transfer_threshold: float = 0.01,
) -> list[str]:
    """Diagnostics for states or transfers too failure-prone for the
    Poisson-limit regime; an empty list means the regime is plausible.

    Flags states with expected in-module failures per sojourn
    (rate * mean sojourn) above ``sojourn_threshold`` and transfers with
    failure probability above ``transfer_threshold``.
    """
    warnings: list[str] = []
    means = model.sojourn_means()
    for i, label in enumerate(model.states):
        load = float(model.module_rate[i] * means[i])
        if load > sojourn_threshold:
            warnings.append(
                f"state {label!r}: expected in-module failures per sojourn "
                f"{load:.3g} exceeds {sojourn_threshold:.3g}"
            )
    for i, src in enumerate(model.states):
        for j, dst in enumerate(model.states):
            q = float(model.transfer_fail[i, j])
            if q > transfer_threshold:
                warnings.append(
                    f"transfer {src!r} -> {dst!r}: failure probability {q:.3g} "
                    f"exceeds {transfer_threshold:.3g}"
                )
    return warnings


def simulate_modular(
    model: SemiMarkovModel,
    horizon: float,
    rng: RngStream,
    unit_id: str | None = None,
) -> EventTimeline:
    """Simulate the modular failure process over ``(0, horizon]``.

    Control starts in the first state, alternates sojourns (drawn from the
    state's law) with embedded-chain transfers, accrues in-module failures
    as a Poisson stream at the state's rate, and flips the transfer coin at
    every switch inside the window.  Failures never reset the state
    (restart-in-place), so the path continues after each failure.

    Randomness is consumed from four child streams (chain walk, sojourns,
    in-module failures, transfer coins), which keeps output bit-reproducible
    under the internal block-vectorized drawing order.
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    gen_chain = rng.split(0).generator()
    gen_sojourn = rng.split(1).generator()
    gen_module = rng.split(2).generator()
    gen_transfer = rng.split(3).generator()

    n = model.n_states
    cum_rows = [tuple(np.cumsum(model.transition[i])) for i in range(n)]
    mean_dwell = float(model.stationary @ model.sojourn_means())

    state_parts: list[np.ndarray] = []
    dwell_parts: list[np.ndarray] = []
    elapsed = 0.0
    current = 0
    while elapsed <= horizon:
        block = max(256, int(1.25 * (horizon - elapsed) / mean_dwell) + 64)
        u = gen_chain.random(block)
        seq = np.empty(block + 1, dtype=np.int64)
        seq[0] = current
        s = current
        for j in range(block):
            k = bisect_right(cum_rows[s], u[j])
            s = k if k < n else n - 1
            seq[j + 1] = s
        dwell_states = seq[:block]
        dwells = np.empty(block)
        for state in range(n):  # canonical order keeps draws deterministic
            idx = np.nonzero(dwell_states == state)[0]
            if idx.size:
                dwells[idx] = model.sojourn[state].draw(gen_sojourn, idx.size)
        state_parts.append(dwell_states)
        dwell_parts.append(dwells)
        elapsed += float(dwells.sum())
        current = int(seq[block])

    visited = np.concatenate(state_parts)
    dwells = np.concatenate(dwell_parts)
    # landing state after the last recorded dwell, for the final transfer
    visited = np.append(visited, current)
    ends = np.cumsum(dwells)
    starts = ends - dwells
    k_active = int(np.searchsorted(starts, horizon, side="left"))
    active_states = visited[:k_active]
    eff_end = np.minimum(ends[:k_active], horizon)
    eff_len = eff_end - starts[:k_active]

    lam = model.module_rate[active_states] * eff_len
    counts = gen_module.poisson(lam)
    total = int(counts.sum())
    if total:
        u = gen_module.random(total)
        module_times = np.repeat(starts[:k_active], counts) + u * np.repeat(eff_len, counts)
    else:
        module_times = np.empty(0)

    # switches that happen inside the window; the last active sojourn only
    # switches in-window when it ends exactly on the horizon
    n_switches = k_active - 1 + (1 if ends[k_active - 1] <= horizon else 0)
    if n_switches > 0:
        src = visited[:n_switches]
        dst = visited[1 : n_switches + 1]
        coin = gen_transfer.random(n_switches)
        transfer_times = ends[:n_switches][coin < model.transfer_fail[src, dst]]
    else:
        transfer_times = np.empty(0)

    events = np.sort(np.concatenate([module_times, transfer_times]), kind="stable")
    events = events[events > 0]
    return EventTimeline(horizon, events, unit_id)
