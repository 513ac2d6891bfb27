"""Observables and statistics over walk states.

Position distributions and their spread, the exact binomial baseline of the
classical unbiased walk, the spread ratio used to quantify localization,
power-law exponents of variance growth, and deterministic ensemble
averaging over disorder realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from coinwalk.core import (
    InitialStateParams,
    WalkState,
    build_coin_matrix,
    build_initial_state,
    step,
)
from coinwalk.disorder import DisorderSpec, sample_schedule
from coinwalk.errors import InvalidParameterError, NormDriftError

__all__ = [
    "PositionDistribution",
    "RunMetrics",
    "EnsembleStats",
    "distribution_from_state",
    "variance",
    "classical_rw_distribution",
    "localization_length",
    "spreading_exponent",
    "symmetry_deviation",
    "metrics_from_distribution",
    "run_ensemble",
]

#: Largest tolerated deviation of a distribution's total probability from 1.
NORM_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class PositionDistribution:
    """Probability of finding the walker at each lattice site.

    ``p[i]`` is the probability at x = i - h where h = (len(p) - 1) // 2;
    ``t`` records after how many steps the distribution was taken.
    """

    t: int
    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or p.size % 2 == 0:
            raise InvalidParameterError(
                f"p must be a 1-D array of odd length, got shape {p.shape}"
            )
        if np.any(p < 0):
            raise InvalidParameterError("probabilities must be non-negative")
        object.__setattr__(self, "p", p)

    @property
    def positions(self) -> np.ndarray:
        half = (self.p.size - 1) // 2
        return np.arange(-half, half + 1)


@dataclass(frozen=True)
class RunMetrics:
    """Summary statistics of one position distribution."""

    variance: float
    std_dev: float
    mean: float
    symmetry_deviation: float
    loc_length_ratio: float | None = None


@dataclass(frozen=True)
class EnsembleStats:
    """Aggregates over independent disorder realizations.

    ``mean_variance`` averages the per-realization variances (and is not
    the variance of ``mean_distribution``); ``variance_of_variance`` is the
    population variance of the same per-realization values.  When per-step
    tracking was requested, ``per_step_variance[t]`` holds the ensemble
    mean variance after t steps, for t = 0 .. steps.
    """

    realizations: int
    mean_distribution: PositionDistribution
    mean_variance: float
    variance_of_variance: float
    per_step_variance: np.ndarray | None = None


def _moments(p: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    mean = float(np.dot(p, x))
    second = float(np.dot(p, x * x))
    return mean, max(second - mean * mean, 0.0)


def distribution_from_state(state: WalkState) -> PositionDistribution:
    """Collapse a walk state to its position distribution.

    p(x) is the squared magnitude of the two coin components summed; no
    renormalization is applied, so accumulated numerical drift shows up in
    the total and is rejected rather than hidden.

    Raises
    ------
    NormDriftError
        If total probability deviates from 1 by more than ``NORM_DRIFT_LIMIT``.
    """
    a = state.amplitudes
    p = (a.real * a.real + a.imag * a.imag).sum(axis=0)
    total = float(p.sum())
    if abs(total - 1.0) > NORM_DRIFT_LIMIT:
        raise NormDriftError(
            f"total probability {total!r} deviates from 1 by more than {NORM_DRIFT_LIMIT}"
        )
    return PositionDistribution(t=state.steps_taken, p=p)


def variance(dist: PositionDistribution) -> float:
    """Central second moment of the distribution, in lattice sites squared.

    Clipped at zero to absorb rounding when all mass sits on one site.
    """
    return _moments(dist.p, dist.positions.astype(np.float64))[1]


def classical_rw_distribution(steps: int) -> PositionDistribution:
    """Exact binomial distribution of the unbiased classical walk.

    p(x) = C(t, (t+x)/2) / 2**t on sites of the correct parity and exactly
    zero elsewhere.  Coefficients are computed in exact integer arithmetic
    and rounded once on division, so the variance equals t to machine
    precision.
    """
    if steps < 0:
        raise InvalidParameterError(f"steps must be >= 0, got {steps}")
    steps = int(steps)
    p = np.zeros(2 * steps + 1, dtype=np.float64)
    denom = 1 << steps
    for k in range(steps + 1):
        # x = 2k - steps sits at array index x + steps = 2k
        p[2 * k] = math.comb(steps, k) / denom
    return PositionDistribution(t=steps, p=p)


def localization_length(sigma_disordered: float, sigma_ordered: float) -> float:
    """Ratio of the disordered walk's spread to the ordered walk's spread.

    Both arguments are standard deviations in lattice sites.  Values well
    below 1 mean the disordered walk stays confined relative to the ordered
    reference.

    Raises
    ------
    InvalidParameterError
        If the ordered spread is not positive or the disordered one is
        negative.
    """
    if sigma_ordered <= 0:
        raise InvalidParameterError(
            f"ordered spread must be > 0, got {sigma_ordered!r}"
        )
    if sigma_disordered < 0:
        raise InvalidParameterError(
            f"disordered spread must be >= 0, got {sigma_disordered!r}"
        )
    return sigma_disordered / sigma_ordered


def spreading_exponent(series: list[tuple[float, float]]) -> float:
    """Least-squares slope of log(variance) against log(t).

    2 is ballistic spreading, 1 diffusive, and values near 0 indicate a
    saturating, localized walk.

    Parameters
    ----------
    series : list of (t, variance)
        At least 3 points with t >= 1 and variance > 0.
    """
    if len(series) < 3:
        raise InvalidParameterError(f"need at least 3 points, got {len(series)}")
    t = np.array([point[0] for point in series], dtype=np.float64)
    v = np.array([point[1] for point in series], dtype=np.float64)
    if np.any(t < 1):
        raise InvalidParameterError("every t must be >= 1")
    if np.any(v <= 0):
        raise InvalidParameterError("every variance must be > 0")
    slope, _ = np.polyfit(np.log(t), np.log(v), 1)
    return float(slope)


def symmetry_deviation(dist: PositionDistribution) -> float:
    """Largest deviation from mirror symmetry, max over x of |p(x) - p(-x)|."""
    return float(np.max(np.abs(dist.p - dist.p[::-1])))


def metrics_from_distribution(
    dist: PositionDistribution,
    loc_length_ratio: float | None = None,
) -> RunMetrics:
    """Bundle the standard summary statistics of one distribution."""
    mean, var = _moments(dist.p, dist.positions.astype(np.float64))
    return RunMetrics(
        variance=var,
        std_dev=math.sqrt(var),
        mean=mean,
        symmetry_deviation=symmetry_deviation(dist),
        loc_length_ratio=loc_length_ratio,
    )


def run_ensemble(
    spec: DisorderSpec,
    initial: InitialStateParams,
    steps: int,
    realizations: int,
    master_seed: int,
    track_per_step: bool = False,
) -> EnsembleStats:
    """Evolve independent disorder realizations and aggregate the results.

    Realization r runs the schedule sampled with realization_index = r; the
    mean distribution and variance statistics accumulate in index order, so
    the output is a pure function of the arguments.  With
    ``track_per_step`` the ensemble-mean variance is recorded after every
    step, which costs one O(lattice) reduction per step.

    Raises
    ------
    InvalidParameterError
        If ``realizations`` < 1 or ``steps`` < 0.
    """
    if realizations < 1:
        raise InvalidParameterError(f"realizations must be >= 1, got {realizations}")
    if steps < 0:
        raise InvalidParameterError(f"steps must be >= 0, got {steps}")
    steps = int(steps)
    positions = np.arange(-steps, steps + 1, dtype=np.float64)
    mean_p = np.zeros(2 * steps + 1, dtype=np.float64)
    final_variances = np.empty(realizations, dtype=np.float64)
    per_step = np.zeros(steps + 1, dtype=np.float64) if track_per_step else None

    for r in range(realizations):
        schedule = sample_schedule(spec, steps, master_seed, r)
        state = build_initial_state(initial, t_max=steps)
        if track_per_step:
            for i, entry in enumerate(schedule.entries, start=1):
                state = step(state, build_coin_matrix(entry))
                a = state.amplitudes
                p = (a.real * a.real + a.imag * a.imag).sum(axis=0)
                per_step[i] += _moments(p, positions)[1]
        else:
            for entry in schedule.entries:
                state = step(state, build_coin_matrix(entry))
        dist = distribution_from_state(state)
        mean_p += dist.p
        final_variances[r] = variance(dist)

    mean_p /= realizations
    if per_step is not None:
        per_step /= realizations
    return EnsembleStats(
        realizations=realizations,
        mean_distribution=PositionDistribution(t=steps, p=mean_p),
        mean_variance=float(final_variances.mean()),
        variance_of_variance=float(final_variances.var()),
        per_step_variance=per_step,
    )
