"""Experiment configuration: flat key=value files with dotted sections,
validated into a typed config object."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core_math import AllSpace, Ball, Box, Domain, as_vector
from .problems import (
    Objective,
    OnlineSequence,
    make_holder_power,
    make_nonsmooth,
    make_online_sequence,
    make_quadratic,
)


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


ALGORITHMS = (
    "online_convex",
    "online_strongly_convex",
    "o2b_convex_universal",
    "alg2_thm4",
    "alg2_cor1_known_L",
    "alg2_cor1_unknown_L",
    "alg3_grid_search",
    "baseline_ogd",
)

OBJECTIVE_FAMILIES = ("quadratic", "holder_power", "nonsmooth")
SEQUENCE_FAMILIES = ("fixed", "drifting_linear", "drifting_quadratic", "adversarial_switch")
ONLINE_ALGORITHMS = ("online_convex", "online_strongly_convex")


def parse_config_text(text: str) -> dict:
    """Parse `section.key=value` lines into a nested dict of strings."""
    tree: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"line {lineno}: key {key!r} conflicts with a scalar")
        if parts[-1] in node:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        node[parts[-1]] = value
    return tree


def _get(tree: dict, section: str, key: str, default=None):
    return tree.get(section, {}).get(key, default)


def _parse_vector(text: str, label: str) -> np.ndarray:
    try:
        return as_vector([float(v) for v in text.split(",") if v.strip() != ""])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{label}: cannot parse vector {text!r} ({exc})")


def _parse_float(text: str, label: str) -> float:
    try:
        return float(text)
    except (ValueError, TypeError):
        raise ConfigError(f"{label}: cannot parse number {text!r}")


def _parse_int(text: str, label: str) -> int:
    try:
        return int(text)
    except (ValueError, TypeError):
        raise ConfigError(f"{label}: cannot parse integer {text!r}")


@dataclass
class ExperimentConfig:
    algorithm: str
    budget: int
    domain: Domain
    objective: Optional[Objective] = None
    sequence: Optional[OnlineSequence] = None
    strong_convexity: float = 0.0
    smoothness: Optional[float] = None
    noise_std: float = 0.0
    seed: Optional[int] = None
    start: Optional[np.ndarray] = None
    trace_path: Optional[str] = None
    summary_path: Optional[str] = None
    stride: int = 1
    echo: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.domain.dim


def _build_domain(tree: dict, dim_hint: Optional[int]) -> Domain:
    kind = _get(tree, "domain", "kind")
    if kind is None:
        raise ConfigError("domain.kind is required")
    if kind == "ball":
        center_text = _get(tree, "domain", "center")
        radius_text = _get(tree, "domain", "radius")
        if center_text is None or radius_text is None:
            raise ConfigError("ball domain needs domain.center and domain.radius")
        try:
            return Ball(_parse_vector(center_text, "domain.center"),
                        _parse_float(radius_text, "domain.radius"))
        except ValueError as exc:
            raise ConfigError(f"domain: {exc}")
    if kind == "box":
        lower_text = _get(tree, "domain", "lower")
        upper_text = _get(tree, "domain", "upper")
        if lower_text is None or upper_text is None:
            raise ConfigError("box domain needs domain.lower and domain.upper")
        try:
            return Box(_parse_vector(lower_text, "domain.lower"),
                       _parse_vector(upper_text, "domain.upper"))
        except ValueError as exc:
            raise ConfigError(f"domain: {exc}")
    if kind == "all_space":
        dim_text = _get(tree, "domain", "dimension")
        dim = _parse_int(dim_text, "domain.dimension") if dim_text else dim_hint
        if dim is None:
            raise ConfigError("all_space domain needs domain.dimension")
        return AllSpace(dim)
    raise ConfigError(f"unknown domain.kind {kind!r}")


def _build_objective(tree: dict, family: str) -> Objective:
    center_text = _get(tree, "problem", "center")
    if center_text is None:
        raise ConfigError(f"problem.center is required for family {family!r}")
    center = _parse_vector(center_text, "problem.center")
    if family == "quadratic":
        eig_text = _get(tree, "problem", "eigenvalues")
        if eig_text is None:
            raise ConfigError("quadratic needs problem.eigenvalues")
        try:
            return make_quadratic(center, _parse_vector(eig_text, "problem.eigenvalues"))
        except ValueError as exc:
            raise ConfigError(f"problem: {exc}")
    if family == "holder_power":
        exp_text = _get(tree, "problem", "exponent")
        if exp_text is None:
            raise ConfigError("holder_power needs problem.exponent")
        try:
            return make_holder_power(center, _parse_float(exp_text, "problem.exponent"))
        except ValueError as exc:
            raise ConfigError(f"problem: {exc}")
    if family == "nonsmooth":
        modulus = _parse_float(_get(tree, "problem", "strong_convexity", "0"),
                               "problem.strong_convexity")
        try:
            return make_nonsmooth(center, modulus)
        except ValueError as exc:
            raise ConfigError(f"problem: {exc}")
    raise ConfigError(f"unknown objective family {family!r}")


def _build_sequence(tree: dict, family: str) -> OnlineSequence:
    try:
        if family == "fixed":
            base_family = _get(tree, "problem", "base_family")
            if base_family is None:
                raise ConfigError("fixed sequence needs problem.base_family")
            return make_online_sequence("fixed", {"objective": _build_objective(tree, base_family)})
        if family == "drifting_linear":
            base = _get(tree, "problem", "base")
            step = _get(tree, "problem", "step")
            if base is None or step is None:
                raise ConfigError("drifting_linear needs problem.base and problem.step")
            params = {"base": _parse_vector(base, "problem.base"),
                      "step": _parse_vector(step, "problem.step")}
            drift = _get(tree, "problem", "drift")
            if drift is not None:
                params["drift"] = _parse_float(drift, "problem.drift")
            return make_online_sequence("drifting_linear", params)
        if family == "drifting_quadratic":
            eig = _get(tree, "problem", "eigenvalues")
            base_center = _get(tree, "problem", "base_center")
            step = _get(tree, "problem", "step")
            if eig is None or base_center is None or step is None:
                raise ConfigError(
                    "drifting_quadratic needs problem.eigenvalues, problem.base_center, problem.step"
                )
            return make_online_sequence(
                "drifting_quadratic",
                {"eigenvalues": _parse_vector(eig, "problem.eigenvalues"),
                 "base_center": _parse_vector(base_center, "problem.base_center"),
                 "center_step": _parse_vector(step, "problem.step")},
            )
        if family == "adversarial_switch":
            coeff = _get(tree, "problem", "coefficient")
            if coeff is None:
                raise ConfigError("adversarial_switch needs problem.coefficient")
            return make_online_sequence(
                "adversarial_switch", {"coefficient": _parse_vector(coeff, "problem.coefficient")}
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"problem: {exc}")
    raise ConfigError(f"unknown sequence family {family!r}")


def build_config(tree: dict) -> ExperimentConfig:
    """Validate the parsed tree: algorithm/problem/domain compatibility, budgets, oracle."""
    algorithm = _get(tree, "", "") or tree.get("algorithm")
    if isinstance(algorithm, dict) or algorithm is None:
        raise ConfigError("algorithm is required")
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")

    budget_text = tree.get("budget")
    if budget_text is None or isinstance(budget_text, dict):
        raise ConfigError("budget is required")
    budget = _parse_int(budget_text, "budget")
    if budget < 1:
        raise ConfigError("budget must be a positive integer")

    family = _get(tree, "problem", "family")
    if family is None:
        raise ConfigError("problem.family is required")

    online = algorithm in ONLINE_ALGORITHMS
    if online and family not in SEQUENCE_FAMILIES:
        raise ConfigError(
            f"algorithm {algorithm} needs a sequence family {SEQUENCE_FAMILIES}, got {family!r}"
        )
    if not online and family not in OBJECTIVE_FAMILIES:
        raise ConfigError(
            f"algorithm {algorithm} needs an objective family {OBJECTIVE_FAMILIES}, got {family!r}"
        )

    objective = None
    sequence = None
    if online:
        sequence = _build_sequence(tree, family)
        dim_hint = sequence.dim
    else:
        objective = _build_objective(tree, family)
        dim_hint = objective.dim

    domain = _build_domain(tree, dim_hint)
    if domain.dim != dim_hint:
        raise ConfigError(f"domain dimension {domain.dim} != problem dimension {dim_hint}")

    mode = _get(tree, "oracle", "mode", "deterministic")
    if mode not in ("deterministic", "stochastic"):
        raise ConfigError(f"oracle.mode must be deterministic or stochastic, got {mode!r}")
    noise_std = 0.0
    if mode == "stochastic":
        noise_std = _parse_float(_get(tree, "oracle", "noise", "0"), "oracle.noise")
        if noise_std < 0:
            raise ConfigError("oracle.noise must be nonnegative")
    seed_text = _get(tree, "oracle", "seed")
    seed = _parse_int(seed_text, "oracle.seed") if seed_text is not None else None

    strong_convexity = _parse_float(
        _get(tree, "problem", "strong_convexity", "0"), "problem.strong_convexity"
    )
    smoothness_text = _get(tree, "problem", "smoothness")
    smoothness = _parse_float(smoothness_text, "problem.smoothness") if smoothness_text else None

    # Algorithm/problem compatibility.
    if algorithm.startswith("alg2"):
        if strong_convexity <= 0:
            raise ConfigError(f"{algorithm} requires problem.strong_convexity > 0")
        if noise_std > 0:
            raise ConfigError(f"{algorithm} requires a deterministic oracle")
    if algorithm == "alg2_cor1_known_L":
        if smoothness is None:
            raise ConfigError("alg2_cor1_known_L requires problem.smoothness")
        if smoothness < strong_convexity:
            raise ConfigError("problem.smoothness must be >= problem.strong_convexity")
    if algorithm == "alg3_grid_search":
        if not isinstance(domain, AllSpace):
            raise ConfigError("alg3_grid_search requires an all_space domain")
        if noise_std > 0:
            raise ConfigError("alg3_grid_search requires a deterministic oracle")
    if algorithm in ("o2b_convex_universal", "baseline_ogd") and not math.isfinite(domain.diameter):
        raise ConfigError(f"{algorithm} requires a domain with finite diameter")
    if online and not math.isfinite(domain.diameter):
        raise ConfigError(f"{algorithm} requires a domain with finite diameter")
    if algorithm == "online_strongly_convex":
        modulus = sequence.strong_convexity if sequence is not None else 0.0
        if strong_convexity > 0:
            modulus = strong_convexity
        if modulus <= 0:
            raise ConfigError(
                "online_strongly_convex needs a strongly convex sequence or problem.strong_convexity > 0"
            )

    start_text = _get(tree, "init", "start")
    start = _parse_vector(start_text, "init.start") if start_text else None
    if start is not None and start.shape[0] != domain.dim:
        raise ConfigError("init.start dimension does not match the domain")
    if start is not None and not domain.contains(start):
        raise ConfigError("init.start lies outside the domain")

    stride = _parse_int(_get(tree, "output", "stride", "1"), "output.stride")
    if stride < 1:
        raise ConfigError("output.stride must be >= 1")

    return ExperimentConfig(
        algorithm=algorithm,
        budget=budget,
        domain=domain,
        objective=objective,
        sequence=sequence,
        strong_convexity=strong_convexity,
        smoothness=smoothness,
        noise_std=noise_std,
        seed=seed,
        start=start,
        trace_path=_get(tree, "output", "trace_path"),
        summary_path=_get(tree, "output", "summary_path"),
        stride=stride,
        echo=tree,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return build_config(parse_config_text(handle.read()))
