"""Estimators and quantitative learning bounds for aggregated signals.

Everything here is a pure function of a signal model and an agent count: the
normalized mean-log-likelihood estimator of the state, the variance and
action bounds it implies, the low-belief fraction statistic with its tail
bound, and a conditional version of Chebyshev's inequality.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import (
    BoundedBeliefsError,
    NonInformativeModelError,
    NullConditioningError,
)
from .signals import SignalModel, llr_conditional_moments, log_likelihood_ratio


@dataclass(frozen=True)
class BoundReport:
    """Variance and action bounds for n agents at noise-to-signal ratio d.

    ``action_bound`` may be non-positive for small n; it is reported raw and
    callers mark such rows vacuous instead of clamping.
    """

    n: int
    d: float
    var_bound: float
    action_bound: float


def learning_bounds(n: int, d: float) -> BoundReport:
    """var_bound = d/(n+d) and action_bound = 1 - 4d/(n+d)."""
    if n < 1:
        raise ValueError("agent count must be at least 1")
    if d <= 0:
        raise ValueError("noise-to-signal ratio must be positive")
    var_bound = d / (n + d)
    return BoundReport(n=n, d=d, var_bound=var_bound, action_bound=1.0 - 4.0 * var_bound)


def estimator_y(model: SignalModel, llrs: Sequence[float]) -> float:
    """Average of per-agent standardized log-likelihood ratios.

    Each term maps E[z|S=0] to 0 and E[z|S=1] to 1, so the estimator is
    unbiased for the state by construction.
    """
    m0, m1, _, _ = llr_conditional_moments(model)
    gap = m1 - m0
    if gap == 0:
        raise NonInformativeModelError("equal conditional means; estimator undefined")
    return sum((z - m0) / gap for z in llrs) / len(llrs)


def k_statistic(beliefs: Sequence, eps) -> float:
    """Fraction of agents whose private belief lies strictly below eps."""
    if len(beliefs) < 1:
        raise ValueError("need at least one belief")
    return sum(1 for b in beliefs if b < eps) / len(beliefs)


def default_eps_grid(lo: float = 1e-6, hi: float = 0.5, points: int = 512) -> tuple[float, ...]:
    """Log-spaced thresholds in (lo, hi]."""
    if not (0 < lo < hi < 1):
        raise ValueError("grid endpoints must satisfy 0 < lo < hi < 1")
    if points < 1:
        raise ValueError("grid needs at least one point")
    if points == 1:
        return (lo,)
    step = (math.log(hi) - math.log(lo)) / (points - 1)
    return tuple(math.exp(math.log(lo) + i * step) for i in range(points))


def qn_bound(
    n: int,
    cdf_given_s0: Callable[[float], object],
    cdf_marginal: Callable[[float], object] | None = None,
    eps_grid: Iterable[float] | None = None,
) -> float:
    """min over grid eps of max{ 2 eps / (1 - eps), 4 / (n P(B < eps | S=0)) }.

    ``cdf_marginal`` is accepted for interface symmetry and sanity checks but
    the bound itself only consumes the conditional lower tail.  When that
    tail vanishes on the whole grid the hypothesis of the learning theorem
    fails and :class:`BoundedBeliefsError` is raised.
    """
    if n < 1:
        raise ValueError("agent count must be at least 1")
    grid = tuple(eps_grid) if eps_grid is not None else default_eps_grid()
    if not grid:
        raise ValueError("threshold grid must be non-empty")
    best = None
    for eps in grid:
        if not 0 < eps < 1:
            raise ValueError("thresholds must lie in (0, 1)")
        tail = cdf_given_s0(eps)
        if not 0 <= tail <= 1:
            raise ValueError("cdf values must lie in [0, 1]")
        if cdf_marginal is not None:
            marginal = cdf_marginal(eps)
            if not 0 <= marginal <= 1:
                raise ValueError("cdf values must lie in [0, 1]")
        if tail == 0:
            continue
        value = max(2.0 * eps / (1.0 - eps), 4.0 / (n * float(tail)))
        if best is None or value < best:
            best = value
    if best is None:
        raise BoundedBeliefsError("no grid point has a positive conditional lower tail")
    return best


def conditional_expectation_interval(
    mean: float, variance: float, p_event: float
) -> tuple[float, float]:
    """Interval guaranteed to contain E[Z | A] from unconditional moments.

    [mean - sqrt(variance / P(A)), mean + sqrt(variance / P(A))], the
    Cauchy-Schwarz consequence for conditioning on an event of probability
    P(A) > 0.
    """
    if variance < 0:
        raise ValueError("variance must be non-negative")
    if p_event == 0:
        raise NullConditioningError("cannot condition on a zero-probability event")
    if not 0 < p_event <= 1:
        raise ValueError("event probability must lie in (0, 1]")
    radius = math.sqrt(variance / p_event)
    return mean - radius, mean + radius


@dataclass(frozen=True)
class EstimatorMoments:
    """Moments of the state estimator for n conditionally i.i.d. signals."""

    n: int
    mean: float
    var_y_minus_s: float
    cov_s_y: float
    var_y: float


def _standardized_terms(model: SignalModel) -> dict:
    m0, m1, _, _ = llr_conditional_moments(model)
    gap = m1 - m0
    if gap == 0:
        raise NonInformativeModelError("equal conditional means; estimator undefined")
    return {
        symbol: (log_likelihood_ratio(model, symbol) - m0) / gap
        for symbol in model.support
    }


def estimator_moments_enumerated(model: SignalModel, n: int, budget: int = 2**22) -> EstimatorMoments:
    """Estimator moments by brute-force enumeration of all signal profiles.

    Exact rational outcome weights, float values.  Independent of the
    closed-form route, so the two can be compared as a check.
    """
    size = 2 * len(model.support) ** n
    if size > budget:
        raise ValueError(f"enumeration of {size} outcomes is too large; use counts")
    terms = _standardized_terms(model)
    weights = {0: dict(zip(model.alphabet, model.mu0)), 1: dict(zip(model.alphabet, model.mu1))}
    e_y = e_y2 = e_sy = e_dev2 = 0.0
    for state in (0, 1):
        mu = weights[state]
        for profile in itertools.product(model.support, repeat=n):
            w = Fraction(1, 2)
            for symbol in profile:
                w *= mu[symbol]
            wf = float(w)
            y = sum(terms[s] for s in profile) / n
            e_y += wf * y
            e_y2 += wf * y * y
            e_sy += wf * state * y
            e_dev2 += wf * (y - state) ** 2
    var_y = e_y2 - e_y * e_y
    cov = e_sy - 0.5 * e_y
    return EstimatorMoments(
        n=n, mean=e_y, var_y_minus_s=e_dev2 - (e_y - 0.5) ** 2, cov_s_y=cov, var_y=var_y
    )


def _count_vectors(total: int, bins: int):
    if bins == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _count_vectors(total - first, bins - 1):
            yield (first,) + rest


def _multinomial_coefficient(counts: Sequence[int]) -> int:
    out = 1
    remaining = sum(counts)
    for c in counts:
        out *= math.comb(remaining, c)
        remaining -= c
    return out


def estimator_moments_by_counts(model: SignalModel, n: int) -> EstimatorMoments:
    """Estimator moments via the multinomial distribution of symbol counts.

    Collapsing profiles to their symbol counts keeps the computation
    polynomial in n, which covers the agent counts the enumeration route
    cannot reach.
    """
    terms = _standardized_terms(model)
    support = model.support
    mu = {0: [model.weight(0, s) for s in support], 1: [model.weight(1, s) for s in support]}
    values = [terms[s] for s in support]
    e_y = e_y2 = e_sy = e_dev2 = 0.0
    for counts in _count_vectors(n, len(support)):
        coeff = _multinomial_coefficient(counts)
        y = sum(c * v for c, v in zip(counts, values)) / n
        for state in (0, 1):
            w = Fraction(coeff, 2)
            for c, p in zip(counts, mu[state]):
                w *= p**c
            wf = float(w)
            e_y += wf * y
            e_y2 += wf * y * y
            e_sy += wf * state * y
            e_dev2 += wf * (y - state) ** 2
    var_y = e_y2 - e_y * e_y
    cov = e_sy - 0.5 * e_y
    return EstimatorMoments(
        n=n, mean=e_y, var_y_minus_s=e_dev2 - (e_y - 0.5) ** 2, cov_s_y=cov, var_y=var_y
    )
