import math

import numpy as np
import pytest

from holderopt.core_math import AllSpace, Ball, norm
from holderopt.problems import (
    BudgetExhausted,
    GradientOracle,
    finite_difference_gradient,
    inexact_smoothness_constant,
    make_holder_power,
    make_nonsmooth,
    make_online_sequence,
    make_quadratic,
    verify_holder,
    verify_inexact_smoothness,
)


def shipped_zoo():
    center = np.array([0.3, -0.2, 0.1])
    return [
        make_quadratic(center, [1.0, 2.0, 5.0]),
        make_holder_power(center, 0.5),
        make_holder_power(center, 1.0),
        make_nonsmooth(center, 0.0),
        make_nonsmooth(center, 1.0),
    ]


def test_quadratic_hand_values():
    obj = make_quadratic(np.zeros(2), [1.0, 1.0])
    x = np.array([1.0, 1.0])
    assert obj.value(x) == pytest.approx(1.0)
    assert np.allclose(obj.gradient(x), [1.0, 1.0])
    assert obj.value(np.zeros(2)) == 0.0
    assert np.allclose(obj.gradient(np.zeros(2)), 0.0)


def test_quadratic_condition_number_metadata():
    obj = make_quadratic(np.zeros(2), [1.0, 100.0])
    assert obj.smoothness / obj.strong_convexity == pytest.approx(100.0)


def test_quadratic_rejects_nonpositive_eigenvalue():
    with pytest.raises(ValueError):
        make_quadratic(np.zeros(2), [1.0, 0.0])


def test_holder_power_reduces_to_quadratic_at_exponent_one():
    obj = make_holder_power(np.array([1.0]), 1.0)
    x = np.array([3.0])
    assert obj.value(x) == pytest.approx(2.0)
    assert np.allclose(obj.gradient(x), [2.0])


def test_holder_power_value_matches_gradient_quadrature():
    # value(4) should equal the integral of t^0.5 over [0, 4] = 16/3
    obj = make_holder_power(np.zeros(1), 0.5)
    x = np.array([4.0])
    steps = 200_000
    h = 4.0 / steps
    integral = sum(math.sqrt((i + 0.5) * h) for i in range(steps)) * h
    assert obj.value(x) == pytest.approx(16.0 / 3.0, rel=1e-12)
    assert obj.value(x) == pytest.approx(integral, rel=1e-6)
    assert np.allclose(obj.gradient(x), [2.0])


def test_holder_power_gradient_vanishes_at_center():
    obj = make_holder_power(np.array([1.0, -1.0]), 0.5)
    assert np.array_equal(obj.gradient(np.array([1.0, -1.0])), np.zeros(2))


def test_holder_power_rejects_bad_exponent():
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            make_holder_power(np.zeros(1), bad)


def test_nonsmooth_hand_values():
    obj = make_nonsmooth(np.zeros(1), 0.0)
    assert obj.value(np.array([-2.0])) == pytest.approx(2.0)
    assert np.allclose(obj.gradient(np.array([-2.0])), [-1.0])
    assert obj.value(np.zeros(1)) == 0.0
    assert np.array_equal(obj.gradient(np.zeros(1)), np.zeros(1))

    strongly = make_nonsmooth(np.zeros(1), 1.0)
    assert strongly.value(np.array([3.0])) == pytest.approx(7.5)
    assert np.allclose(strongly.gradient(np.array([3.0])), [4.0])


def test_zoo_gradients_match_finite_differences():
    rng = np.random.default_rng(2)
    for obj in shipped_zoo():
        checked = 0
        while checked < 100:
            x = rng.normal(size=obj.dim)
            gap = x - np.array([0.3, -0.2, 0.1])
            # stay away from kinks and the radial singularity
            if obj.name == "nonsmooth" and np.min(np.abs(gap)) < 1e-3:
                continue
            if obj.name == "holder_power" and norm(gap) < 1e-2:
                continue
            fd = finite_difference_gradient(obj, x)
            exact = obj.gradient(x)
            assert np.linalg.norm(fd - exact) <= 1e-5 * max(1.0, np.linalg.norm(exact))
            checked += 1


def test_zoo_optimum_metadata():
    for obj in shipped_zoo():
        assert obj.value(obj.optimum_point) == pytest.approx(obj.optimum_value, abs=1e-15)
        if obj.name != "nonsmooth":
            assert norm(obj.gradient(obj.optimum_point)) <= 1e-9


def test_oracle_counts_and_budget():
    obj = make_quadratic(np.zeros(1), [1.0])
    oracle = GradientOracle(obj, budget=3)
    assert np.allclose(oracle.gradient(np.array([2.0])), [2.0])
    assert oracle.queries_used == 1
    oracle.gradient(np.zeros(1))
    oracle.value(np.array([5.0]))  # values are free
    assert oracle.queries_used == 2
    oracle.gradient(np.zeros(1))
    with pytest.raises(BudgetExhausted):
        oracle.gradient(np.zeros(1))


def test_oracle_counter_matches_wrapped_call_count():
    obj = make_quadratic(np.zeros(2), [1.0, 2.0])
    calls = {"n": 0}
    true_gradient = obj.gradient

    def counting(x):
        calls["n"] += 1
        return true_gradient(x)

    object.__setattr__(obj, "gradient", counting)
    oracle = GradientOracle(obj, budget=17, noise_std=0.5, seed=4)
    rng = np.random.default_rng(5)
    while oracle.remaining:
        oracle.gradient(rng.normal(size=2))
    assert calls["n"] == oracle.queries_used == 17


def test_oracle_zero_noise_equals_deterministic():
    obj = make_quadratic(np.zeros(2), [1.0, 3.0])
    x = np.array([0.7, -0.4])
    det = GradientOracle(obj, budget=1).gradient(x)
    stoch = GradientOracle(obj, budget=1, noise_std=0.0, seed=9).gradient(x)
    assert np.array_equal(det, stoch)


def test_oracle_noise_variance_contract():
    obj = make_quadratic(np.zeros(4), [1.0, 1.0, 1.0, 1.0])
    oracle = GradientOracle(obj, budget=100_000, noise_std=1.0, seed=11)
    x = np.zeros(4)
    total = 0.0
    for _ in range(100_000):
        g = oracle.gradient(x)
        total += float(np.dot(g, g))
    assert 0.97 <= total / 100_000 <= 1.03


def test_oracle_noise_reproducible():
    obj = make_quadratic(np.zeros(3), [1.0, 1.0, 1.0])
    x = np.array([1.0, 2.0, 3.0])
    a = GradientOracle(obj, budget=50, noise_std=2.0, seed=42)
    b = GradientOracle(obj, budget=50, noise_std=2.0, seed=42)
    for _ in range(50):
        assert np.array_equal(a.gradient(x), b.gradient(x))


def test_verify_holder_quadratic_bounds():
    dom = Ball(np.zeros(2), 2.0)
    obj = make_quadratic(np.zeros(2), [1.0, 2.0])
    assert verify_holder(obj, 1.0, 2.0, dom, n_samples=2000, seed=0).passed
    assert not verify_holder(obj, 1.0, 0.5, dom, n_samples=2000, seed=0).passed


def test_verify_holder_power_certified_constant():
    dom = Ball(np.zeros(2), 2.0)
    obj = make_holder_power(np.zeros(2), 0.5)
    report = verify_holder(obj, 0.5, 2.0, dom, n_samples=2000, seed=0)
    assert report.passed
    assert report.max_ratio <= 2.0 ** 0.5 * (1 + 1e-6)


def test_zoo_holder_certificates_full_sampling():
    dom = Ball(np.array([0.3, -0.2, 0.1]), 1.5)
    center = np.array([0.3, -0.2, 0.1])
    cases = [
        (make_quadratic(center, [1.0, 2.0, 5.0]), 1.0, 5.0),
        (make_holder_power(center, 0.5), 0.5, 2.0 ** 0.5),
        (make_holder_power(center, 1.0), 1.0, 1.0),
        (make_nonsmooth(center, 0.0), 0.0, 2.0 * math.sqrt(3)),
    ]
    for obj, exponent, constant in cases:
        report = verify_holder(obj, exponent, constant, dom, n_samples=10_000, seed=1)
        assert report.passed, (obj.name, report)


def test_inexact_smoothness_constant_formula():
    # exponent 1 leaves the constant unchanged for any slack
    assert inexact_smoothness_constant(1.0, 3.0, 0.01) == pytest.approx(3.0)
    got = inexact_smoothness_constant(0.5, 2.0, 0.1)
    assert got == pytest.approx(0.1 ** (-1.0 / 3.0) * 2.0 ** (4.0 / 3.0))


def test_verify_inexact_smoothness_zoo():
    dom = Ball(np.zeros(2), 2.0)
    cases = [
        (make_quadratic(np.zeros(2), [1.0, 2.0]), 1.0, 2.0, 0.05),
        (make_holder_power(np.zeros(2), 0.5), 0.5, 2.0, 0.1),
        (make_nonsmooth(np.zeros(2), 0.0), 0.0, 2.0 * math.sqrt(2), 0.3),
    ]
    for obj, exponent, constant, slack in cases:
        report = verify_inexact_smoothness(obj, exponent, constant, slack, dom,
                                           n_samples=3000, seed=2)
        assert report.passed, (obj.name, report)


def test_nonsmooth_uniform_gradient_bound():
    # at exponent 0 the inexact-smoothness right side is a constant in the distance
    dom = AllSpace(2)
    obj = make_nonsmooth(np.zeros(2), 0.0)
    lipschitz = math.sqrt(2)
    constant = 2.0 * lipschitz
    slack = 0.5
    report = verify_inexact_smoothness(obj, 0.0, constant, slack, dom, n_samples=3000, seed=3)
    assert report.passed


def test_descent_upper_bound_form_sampled():
    # f(y) - f(x) - <g(x), y - x> <= (L/2)||x - y||^2 + slack with the matched L
    dom = Ball(np.zeros(2), 2.0)
    rng = np.random.default_rng(21)
    for obj, exponent, constant in [
        (make_holder_power(np.zeros(2), 0.5), 0.5, 2.0),
        (make_quadratic(np.zeros(2), [1.0, 2.0]), 1.0, 2.0),
    ]:
        for slack in (0.05, 0.5):
            smooth = inexact_smoothness_constant(exponent, constant, slack)
            for _ in range(2000):
                x = dom.sample(rng)
                y = dom.sample(rng)
                lhs = obj.value(y) - obj.value(x) - float(np.dot(obj.gradient(x), y - x))
                rhs = 0.5 * smooth * norm(x - y) ** 2 + slack
                assert lhs <= rhs + 1e-9


def test_bregman_gradient_bound_form_sampled():
    # ||g(x) - g(y)||^2 <= 2L * divergence(x, y) + 2L * slack with the matched L
    from holderopt.core_math import bregman_divergence

    dom = Ball(np.zeros(2), 2.0)
    rng = np.random.default_rng(22)
    for obj, exponent, constant in [
        (make_holder_power(np.zeros(2), 0.5), 0.5, 2.0),
        (make_nonsmooth(np.zeros(2), 0.0), 0.0, 2.0 * math.sqrt(2)),
    ]:
        slack = 0.25
        smooth = inexact_smoothness_constant(exponent, constant, slack)
        for _ in range(2000):
            x = dom.sample(rng)
            y = dom.sample(rng)
            lhs = norm(obj.gradient(x) - obj.gradient(y)) ** 2
            rhs = 2.0 * smooth * bregman_divergence(obj, x, y) + 2.0 * smooth * slack
            assert lhs <= rhs + 1e-9


def test_fixed_sequence_zero_variation():
    seq = make_online_sequence("fixed", {"objective": make_quadratic(np.zeros(2), [1.0, 2.0])})
    for t in (2, 5, 100):
        assert norm(seq.gradient_difference(t)) == 0.0


def test_drifting_linear_sequence():
    seq = make_online_sequence(
        "drifting_linear", {"base": np.zeros(2), "step": np.array([0.01, 0.0])}
    )
    f2 = seq.function(2)
    assert np.allclose(f2.gradient(np.zeros(2)), [0.02, 0.0])
    total = sum(norm(seq.gradient_difference(t)) ** 2 for t in (2, 3))
    assert total == pytest.approx(2e-4)


def test_drifting_linear_drift_validation():
    with pytest.raises(ValueError):
        make_online_sequence(
            "drifting_linear",
            {"base": np.zeros(2), "step": np.array([1.0, 0.0]), "drift": 0.5},
        )


def test_adversarial_switch_variation():
    seq = make_online_sequence("adversarial_switch", {"coefficient": np.array([1.0])})
    assert norm(seq.gradient_difference(2)) ** 2 == pytest.approx(4.0)
    T = 7
    total = sum(norm(seq.gradient_difference(t)) ** 2 for t in range(2, T + 1))
    assert total == pytest.approx(4.0 * (T - 1))


def test_drifting_quadratic_constant_gradient_difference():
    seq = make_online_sequence(
        "drifting_quadratic",
        {"eigenvalues": np.array([1.0, 2.0]), "base_center": np.zeros(2),
         "center_step": np.array([0.1, 0.0])},
    )
    rng = np.random.default_rng(0)
    for t in (2, 4, 9):
        expected = seq.gradient_difference(t)
        for _ in range(5):
            x = rng.normal(size=2)
            got = seq.function(t).gradient(x) - seq.function(t - 1).gradient(x)
            assert np.allclose(got, expected, atol=1e-12)


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        make_online_sequence("mystery", {})
