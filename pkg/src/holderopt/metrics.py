"""Regret, gradient variation, and rate-fitting utilities that turn runs into
checkable numbers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core_math import Ball, Box, Domain, as_vector, norm
from .problems import Objective, OnlineSequence
from .traces import OnlineTrace


@dataclass(frozen=True)
class VariationReport:
    value: float
    exact: bool


@dataclass(frozen=True)
class RegretReport:
    value: float
    comparator: np.ndarray
    comparator_value: float
    exact: bool


@dataclass(frozen=True)
class GeometricRateFit:
    rate: float
    r_squared: float


def _sup_norm_sq(seq: OnlineSequence, t: int, domain: Domain, samples: np.ndarray) -> float:
    f_prev = seq.function(t - 1)
    f_cur = seq.function(t)
    worst = 0.0
    for x in samples:
        gap = norm(f_cur.gradient(x) - f_prev.gradient(x)) ** 2
        if gap > worst:
            worst = gap
    return worst


def _variation_terms(
    seq: OnlineSequence,
    rounds: int,
    domain: Domain,
    n_samples: int,
    seed: int,
    force_monte_carlo: bool,
) -> tuple[np.ndarray, bool]:
    if seq.gradient_difference is not None and not force_monte_carlo:
        terms = [norm(seq.gradient_difference(t)) ** 2 for t in range(2, rounds + 1)]
        return np.asarray(terms), True
    rng = np.random.default_rng(seed)
    samples = np.stack([domain.sample(rng) for _ in range(n_samples)])
    terms = [_sup_norm_sq(seq, t, domain, samples) for t in range(2, rounds + 1)]
    return np.asarray(terms), False


def gradient_variation(
    seq: OnlineSequence,
    rounds: int,
    domain: Domain,
    n_samples: int = 10_000,
    seed: int = 0,
    force_monte_carlo: bool = False,
) -> VariationReport:
    """Cumulative squared sup-norm change between consecutive gradients.

    Exact when the sequence exposes constant gradient differences; otherwise a
    Monte-Carlo estimate over sampled domain points, flagged as such.
    """
    if rounds < 2:
        return VariationReport(0.0, True)
    terms, exact = _variation_terms(seq, rounds, domain, n_samples, seed, force_monte_carlo)
    return VariationReport(float(np.sum(terms)), exact)


def ghat_max(
    seq: OnlineSequence,
    rounds: int,
    domain: Domain,
    n_samples: int = 10_000,
    seed: int = 0,
    force_monte_carlo: bool = False,
) -> VariationReport:
    """Largest single-step squared sup-norm gradient change."""
    if rounds < 2:
        return VariationReport(0.0, True)
    terms, exact = _variation_terms(seq, rounds, domain, n_samples, seed, force_monte_carlo)
    return VariationReport(float(np.max(terms)), exact)


def _minimize_linear(coefficient: np.ndarray, domain: Domain) -> tuple[np.ndarray, bool]:
    if isinstance(domain, Ball):
        length = norm(coefficient)
        if length == 0.0:
            return domain.center.copy(), True
        return domain.center - (domain.radius / length) * coefficient, True
    if isinstance(domain, Box):
        point = np.where(coefficient > 0, domain.lower, domain.upper)
        point = np.where(coefficient == 0, domain.anchor(), point)
        return point, True
    raise ValueError("linear comparator needs a bounded domain")


def _projected_descent(
    value_fn, gradient_fn, domain: Domain, start: np.ndarray, tol: float = 1e-10
) -> np.ndarray:
    """Projected (sub)gradient descent fallback for comparator minimization."""
    x = start.copy()
    best = x.copy()
    best_value = value_fn(x)
    scale = max(1.0, norm(gradient_fn(x)))
    for k in range(1, 20_000):
        step = 1.0 / (scale * math.sqrt(k))
        x = domain.project(x - step * gradient_fn(x))
        v = value_fn(x)
        if v < best_value:
            if best_value - v < tol * max(1.0, abs(best_value)) and k > 100:
                best, best_value = x.copy(), v
                break
            best, best_value = x.copy(), v
    return best


def _minimum_over_domain(objective: Objective, domain: Domain) -> tuple[np.ndarray, bool]:
    if objective.optimum_point is not None and domain.contains(objective.optimum_point):
        return objective.optimum_point.copy(), True
    point = _projected_descent(objective.value, objective.gradient, domain, domain.anchor())
    return point, False


def prefix_comparator(seq: OnlineSequence, domain: Domain, upto: int) -> tuple[np.ndarray, bool]:
    """Minimizer of sum_{t<=upto} f_t over the domain; exact where closed forms exist."""
    if seq.linear_coefficient is not None:
        total = np.zeros(seq.dim)
        for t in range(1, upto + 1):
            total = total + seq.linear_coefficient(t)
        return _minimize_linear(total, domain)
    if seq.family == "fixed" and seq.base_objective is not None:
        return _minimum_over_domain(seq.base_objective, domain)
    if seq.quadratic_center is not None:
        centers = np.stack([seq.quadratic_center(t) for t in range(1, upto + 1)])
        mean_center = centers.mean(axis=0)
        if domain.contains(mean_center):
            return mean_center, True
        eig = seq.quadratic_eigenvalues

        def value_fn(x):
            return float(sum(0.5 * np.dot(eig * (x - c), x - c) for c in centers))

        def gradient_fn(x):
            return eig * (upto * x - centers.sum(axis=0))

        return _projected_descent(value_fn, gradient_fn, domain, domain.anchor()), False

    def value_fn(x):
        return float(sum(seq.function(t).value(x) for t in range(1, upto + 1)))

    def gradient_fn(x):
        out = np.zeros(seq.dim)
        for t in range(1, upto + 1):
            out = out + seq.function(t).gradient(x)
        return out

    return _projected_descent(value_fn, gradient_fn, domain, domain.anchor()), False


def _prefix_value(seq: OnlineSequence, point: np.ndarray, upto: int) -> float:
    return float(sum(seq.function(t).value(point) for t in range(1, upto + 1)))


def regret(seq: OnlineSequence, trace: OnlineTrace, domain: Domain) -> RegretReport:
    """Cumulative loss of the trace minus the best fixed decision in hindsight."""
    return regret_at(seq, trace, domain, trace.rounds)


def regret_at(seq: OnlineSequence, trace: OnlineTrace, domain: Domain, upto: int) -> RegretReport:
    if upto < 1 or upto > trace.rounds:
        raise ValueError("checkpoint outside the trace")
    comparator, exact = prefix_comparator(seq, domain, upto)
    comparator_value = _prefix_value(seq, comparator, upto)
    incurred = float(trace.cumulative_losses()[upto - 1])
    return RegretReport(
        value=incurred - comparator_value,
        comparator=comparator,
        comparator_value=comparator_value,
        exact=exact,
    )


def regret_series(
    seq: OnlineSequence, trace: OnlineTrace, domain: Domain, checkpoints: Sequence[int]
) -> list[RegretReport]:
    return [regret_at(seq, trace, domain, c) for c in checkpoints]


def exact_regret_series(
    seq: OnlineSequence, trace: OnlineTrace, domain: Domain
) -> Optional[np.ndarray]:
    """Per-round regret with an incrementally maintained exact comparator.

    Returns None when the family/domain pair has no closed-form prefix
    minimum (callers then fall back to per-checkpoint computation or omit).
    """
    incurred = trace.cumulative_losses()
    rounds = trace.rounds
    if seq.linear_coefficient is not None and isinstance(domain, (Ball, Box)):
        out = np.empty(rounds)
        total = np.zeros(seq.dim)
        for t in range(1, rounds + 1):
            total = total + seq.linear_coefficient(t)
            if isinstance(domain, Ball):
                best = float(np.dot(total, domain.center)) - domain.radius * float(
                    np.linalg.norm(total)
                )
            else:
                best = float(np.sum(np.minimum(total * domain.lower, total * domain.upper)))
            out[t - 1] = incurred[t - 1] - best
        return out
    if seq.family == "fixed" and seq.base_objective is not None:
        base = seq.base_objective
        if base.optimum_point is not None and domain.contains(base.optimum_point):
            base_min = float(base.optimum_value)
            return incurred - base_min * np.arange(1, rounds + 1)
        return None
    if seq.quadratic_center is not None:
        eig = seq.quadratic_eigenvalues
        out = np.empty(rounds)
        center_sum = np.zeros(seq.dim)
        weighted_sq_sum = 0.0
        for t in range(1, rounds + 1):
            c = seq.quadratic_center(t)
            center_sum = center_sum + c
            weighted_sq_sum += float(np.dot(eig * c, c))
            mean_center = center_sum / t
            if not domain.contains(mean_center):
                return None
            best = 0.5 * (weighted_sq_sum - t * float(np.dot(eig * mean_center, mean_center)))
            out[t - 1] = incurred[t - 1] - best
        return out
    return None


def loglog_slope(budgets, values, burn_in: float = 0.25) -> float:
    """Least-squares slope of log(value) against log(budget).

    The leading burn_in fraction of points is dropped: early points carry the
    additive constants of any bound and would bias the fitted exponent.
    """
    budgets = np.asarray(budgets, dtype=float)
    values = np.asarray(values, dtype=float)
    if budgets.shape != values.shape or budgets.size < 4:
        raise ValueError("need at least 4 aligned points")
    if np.any(values <= 0) or np.any(budgets <= 0):
        raise ValueError("values and budgets must be positive")
    skip = int(math.floor(budgets.size * burn_in))
    skip = min(skip, budgets.size - 2)
    x = np.log(budgets[skip:])
    y = np.log(values[skip:])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def geometric_rate(queries, values, burn_in: float = 0.25) -> GeometricRateFit:
    """Per-query contraction: fit log(value) ~ -rate * queries, with fit quality."""
    queries = np.asarray(queries, dtype=float)
    values = np.asarray(values, dtype=float)
    if queries.shape != values.shape or queries.size < 4:
        raise ValueError("need at least 4 aligned points")
    if np.any(values <= 0):
        raise ValueError("values must be positive")
    skip = int(math.floor(queries.size * burn_in))
    skip = min(skip, queries.size - 2)
    x = queries[skip:]
    y = np.log(values[skip:])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return GeometricRateFit(rate=float(-slope), r_squared=r_squared)


def suboptimality(objective: Objective, point) -> Optional[float]:
    """Gap to the recorded optimum value, when the objective declares one."""
    if objective.optimum_value is None:
        return None
    return float(objective.value(as_vector(point))) - objective.optimum_value
