"""Objective zoo with certified curvature metadata, budgeted gradient oracles,
and online function-sequence generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core_math import Domain, as_vector, check_same_dim, norm


class BudgetExhausted(RuntimeError):
    """The gradient oracle has no queries left."""


@dataclass(frozen=True, eq=False)
class Objective:
    """A convex function with value/gradient access and curvature metadata.

    Metadata fields record what is certified about the function:
    ``strong_convexity`` is the strong-convexity modulus (0 for merely convex),
    ``smoothness`` the gradient-Lipschitz constant (inf when the gradient is
    not Lipschitz), and the Holder pair (``holder_exponent``,
    ``holder_constant``) bounds gradient changes by
    constant * ||x - y|| ** exponent. Metadata is used by verification suites
    and reporting only; the optimizers never read it unless a variant takes
    the constant as an explicit argument.
    """

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    dim: int
    strong_convexity: float = 0.0
    smoothness: float = math.inf
    holder_exponent: Optional[float] = None
    holder_constant: Optional[float] = None
    optimum_point: Optional[np.ndarray] = None
    optimum_value: Optional[float] = None
    name: str = "objective"


def make_quadratic(center, eigenvalues) -> Objective:
    """Diagonal quadratic 0.5 * sum_i e_i (x_i - c_i)^2 with optimum at the center."""
    center = as_vector(center)
    eig = as_vector(eigenvalues)
    check_same_dim(center, eig)
    if np.any(eig <= 0):
        raise ValueError("eigenvalues must be positive")
    center.flags.writeable = False
    eig.flags.writeable = False

    def value(x):
        gap = np.asarray(x, dtype=float) - center
        return 0.5 * float(np.dot(eig * gap, gap))

    def gradient(x):
        return eig * (np.asarray(x, dtype=float) - center)

    top = float(np.max(eig))
    return Objective(
        value=value,
        gradient=gradient,
        dim=center.shape[0],
        strong_convexity=float(np.min(eig)),
        smoothness=top,
        holder_exponent=1.0,
        holder_constant=top,
        optimum_point=center,
        optimum_value=0.0,
        name="quadratic",
    )


def make_holder_power(center, exponent: float) -> Objective:
    """Radial power function ||x - c||^(1+p) / (1+p) for p in (0, 1].

    Its gradient ||x - c||^(p-1) (x - c) changes by at most
    2^(1-p) * ||x - y||^p between any two points (constant certified by
    sampling, stored in metadata). At p = 1 this is the unit quadratic.
    """
    if not (0.0 < exponent <= 1.0):
        raise ValueError("exponent must lie in (0, 1]")
    center = as_vector(center)
    center.flags.writeable = False
    power = 1.0 + exponent

    def value(x):
        r = norm(np.asarray(x, dtype=float) - center)
        return r**power / power

    def gradient(x):
        gap = np.asarray(x, dtype=float) - center
        r = float(np.linalg.norm(gap))
        if r == 0.0:
            return np.zeros_like(gap)
        return r ** (exponent - 1.0) * gap

    return Objective(
        value=value,
        gradient=gradient,
        dim=center.shape[0],
        strong_convexity=0.0,
        smoothness=1.0 if exponent == 1.0 else math.inf,
        holder_exponent=float(exponent),
        holder_constant=2.0 ** (1.0 - exponent),
        optimum_point=center,
        optimum_value=0.0,
        name="holder_power",
    )


def make_nonsmooth(center, strong_convexity: float = 0.0) -> Objective:
    """Composite (m/2)||x - c||^2 + ||x - c||_1 with a fixed subgradient selection.

    The l1 subgradient uses sign with sign(0) = 0, so repeated calls at the
    same point agree and traces reproduce exactly.
    """
    if strong_convexity < 0:
        raise ValueError("strong_convexity must be nonnegative")
    center = as_vector(center)
    center.flags.writeable = False
    modulus = float(strong_convexity)

    def value(x):
        gap = np.asarray(x, dtype=float) - center
        return 0.5 * modulus * float(np.dot(gap, gap)) + float(np.sum(np.abs(gap)))

    def gradient(x):
        gap = np.asarray(x, dtype=float) - center
        return modulus * gap + np.sign(gap)

    dim = center.shape[0]
    return Objective(
        value=value,
        gradient=gradient,
        dim=dim,
        strong_convexity=modulus,
        smoothness=math.inf,
        holder_exponent=0.0,
        # Subgradient jumps are globally bounded only for the pure l1 part.
        holder_constant=2.0 * math.sqrt(dim) if modulus == 0.0 else None,
        optimum_point=center,
        optimum_value=0.0,
        name="nonsmooth",
    )


def finite_difference_gradient(objective: Objective, x, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient, the independent check for exact gradients."""
    x = as_vector(x)
    out = np.zeros_like(x)
    for i in range(x.shape[0]):
        bump = np.zeros_like(x)
        bump[i] = step
        out[i] = (objective.value(x + bump) - objective.value(x - bump)) / (2.0 * step)
    return out


class GradientOracle:
    """Budgeted gradient access, exact or corrupted by isotropic Gaussian noise.

    Noise has per-coordinate variance (noise_std^2 / dim) so the expected
    squared error of a query equals noise_std^2. Function values are not
    budgeted. Each oracle owns its RNG; same seed, same noise sequence.
    """

    def __init__(
        self,
        objective: Objective,
        budget: int,
        noise_std: float = 0.0,
        seed: Optional[int] = None,
    ):
        if budget < 1:
            raise ValueError("budget must be a positive integer")
        if noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        self.objective = objective
        self.budget = int(budget)
        self.noise_std = float(noise_std)
        self.queries_used = 0
        self._rng = np.random.default_rng(seed)
        self._per_coord_std = (
            self.noise_std / math.sqrt(objective.dim) if self.noise_std > 0 else 0.0
        )

    @property
    def stochastic(self) -> bool:
        return self.noise_std > 0.0

    @property
    def remaining(self) -> int:
        return self.budget - self.queries_used

    def gradient(self, x) -> np.ndarray:
        if self.queries_used >= self.budget:
            raise BudgetExhausted(
                f"gradient budget of {self.budget} queries exhausted"
            )
        self.queries_used += 1
        g = self.objective.gradient(x)
        if self._per_coord_std > 0.0:
            g = g + self._rng.normal(0.0, self._per_coord_std, size=g.shape[0])
        return g

    def value(self, x) -> float:
        return float(self.objective.value(x))


@dataclass(frozen=True)
class HolderReport:
    max_ratio: float
    bound: float
    passed: bool
    samples: int


def verify_holder(
    objective: Objective,
    exponent: float,
    constant: float,
    domain: Domain,
    n_samples: int = 10_000,
    seed: int = 0,
) -> HolderReport:
    """Sample point pairs and check ||g(x) - g(y)|| <= constant * ||x - y||^exponent."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = domain.sample(rng)
        y = domain.sample(rng)
        while np.array_equal(x, y):
            y = domain.sample(rng)
        gap = norm(x - y)
        ratio = norm(objective.gradient(x) - objective.gradient(y)) / gap**exponent
        if ratio > worst:
            worst = ratio
    return HolderReport(
        max_ratio=worst,
        bound=constant,
        passed=worst <= constant * (1.0 + 1e-6),
        samples=n_samples,
    )


@dataclass(frozen=True)
class InexactSmoothnessReport:
    worst_slack: float
    effective_smoothness: float
    passed: bool
    samples: int


def inexact_smoothness_constant(exponent: float, constant: float, slack: float) -> float:
    """Effective smoothness level at slack budget ``slack``:
    slack^((p-1)/(1+p)) * constant^(2/(1+p))."""
    if slack <= 0:
        raise ValueError("slack must be positive")
    return slack ** ((exponent - 1.0) / (1.0 + exponent)) * constant ** (
        2.0 / (1.0 + exponent)
    )


def verify_inexact_smoothness(
    objective: Objective,
    exponent: float,
    constant: float,
    slack: float,
    domain: Domain,
    n_samples: int = 10_000,
    seed: int = 0,
) -> InexactSmoothnessReport:
    """Check ||g(x)-g(y)||^2 <= L^2 ||x-y||^2 + 4*L*slack on sampled pairs,
    with L the effective smoothness at this slack level. Reports the worst
    margin by which the right side exceeded the left."""
    smooth = inexact_smoothness_constant(exponent, constant, slack)
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(n_samples):
        x = domain.sample(rng)
        y = domain.sample(rng)
        lhs = norm(objective.gradient(x) - objective.gradient(y)) ** 2
        rhs = smooth**2 * norm(x - y) ** 2 + 4.0 * smooth * slack
        margin = rhs - lhs
        if margin < worst:
            worst = margin
    tol = 1e-9 * max(1.0, 4.0 * smooth * slack)
    return InexactSmoothnessReport(
        worst_slack=worst,
        effective_smoothness=smooth,
        passed=worst >= -tol,
        samples=n_samples,
    )


def _linear_objective(coefficient: np.ndarray) -> Objective:
    coefficient = as_vector(coefficient)
    coefficient.flags.writeable = False

    def value(x):
        return float(np.dot(coefficient, np.asarray(x, dtype=float)))

    def gradient(x):
        return coefficient.copy()

    return Objective(
        value=value,
        gradient=gradient,
        dim=coefficient.shape[0],
        strong_convexity=0.0,
        smoothness=0.0,
        holder_exponent=1.0,
        holder_constant=0.0,
        name="linear",
    )


@dataclass(frozen=True, eq=False)
class OnlineSequence:
    """A round-indexed family of convex functions f_1, f_2, ... (1-based).

    ``gradient_difference(t)`` returns grad f_t - grad f_{t-1} when that
    difference is constant in x (true for every shipped family), which makes
    gradient-variation metrics exact; None means metrics must estimate.
    """

    family: str
    dim: int
    function: Callable[[int], Objective]
    strong_convexity: float = 0.0
    gradient_difference: Optional[Callable[[int], np.ndarray]] = None
    base_objective: Optional[Objective] = None
    linear_coefficient: Optional[Callable[[int], np.ndarray]] = None
    quadratic_eigenvalues: Optional[np.ndarray] = None
    quadratic_center: Optional[Callable[[int], np.ndarray]] = None


def make_online_sequence(family: str, params: dict, seed: Optional[int] = None) -> OnlineSequence:
    """Build a named sequence family.

    Families and their params:
      fixed              {"objective": Objective}
      drifting_linear    {"base": vec, "step": vec, optional "drift": bound on ||step||}
      drifting_quadratic {"eigenvalues": vec, "base_center": vec, "center_step": vec}
      adversarial_switch {"coefficient": vec}
    """
    if family == "fixed":
        objective = params["objective"]
        zero = np.zeros(objective.dim)

        return OnlineSequence(
            family=family,
            dim=objective.dim,
            function=lambda t: objective,
            strong_convexity=objective.strong_convexity,
            gradient_difference=lambda t: zero.copy(),
            base_objective=objective,
        )

    if family == "drifting_linear":
        base = as_vector(params["base"])
        step = as_vector(params["step"])
        check_same_dim(base, step)
        drift = params.get("drift")
        if drift is not None and norm(step) > float(drift) * (1 + 1e-12):
            raise ValueError("per-round step exceeds the declared drift bound")

        def coefficient(t: int) -> np.ndarray:
            return base + t * step

        return OnlineSequence(
            family=family,
            dim=base.shape[0],
            function=lambda t: _linear_objective(coefficient(t)),
            gradient_difference=lambda t: step.copy(),
            linear_coefficient=coefficient,
        )

    if family == "drifting_quadratic":
        eig = as_vector(params["eigenvalues"])
        base = as_vector(params["base_center"])
        step = as_vector(params["center_step"])
        check_same_dim(eig, base)
        check_same_dim(base, step)
        if np.any(eig <= 0):
            raise ValueError("eigenvalues must be positive")

        def center(t: int) -> np.ndarray:
            return base + t * step

        diff = -(eig * step)

        return OnlineSequence(
            family=family,
            dim=base.shape[0],
            function=lambda t: make_quadratic(center(t), eig),
            strong_convexity=float(np.min(eig)),
            gradient_difference=lambda t: diff.copy(),
            quadratic_eigenvalues=eig,
            quadratic_center=center,
        )

    if family == "adversarial_switch":
        coefficient = as_vector(params["coefficient"])

        def coef_at(t: int) -> np.ndarray:
            return coefficient if t % 2 == 1 else -coefficient

        def diff_at(t: int) -> np.ndarray:
            return coef_at(t) - coef_at(t - 1)

        return OnlineSequence(
            family=family,
            dim=coefficient.shape[0],
            function=lambda t: _linear_objective(coef_at(t)),
            gradient_difference=diff_at,
            linear_coefficient=coef_at,
        )

    raise ValueError(f"unknown sequence family: {family!r}")
