import math

import numpy as np
import pytest

from holderopt.core_math import AllSpace, Ball, Box, norm
from holderopt.online_learners import (
    AdaGradSchedule,
    ConstantSchedule,
    OptimisticOGD,
    ProtocolError,
    StronglyConvexSchedule,
    one_step_update,
    run_online_convex,
    run_online_strongly_convex,
    self_confident_bound_holds,
)
from holderopt.problems import make_online_sequence, make_quadratic, make_nonsmooth


BOX = Box(np.array([-1.0]), np.array([1.0]))


def test_predict_zero_optimism_is_noop():
    learner = OptimisticOGD(BOX, np.array([0.0]), ConstantSchedule(0.5))
    assert np.array_equal(learner.predict(np.zeros(1)), np.zeros(1))


def test_predict_hand_values():
    learner = OptimisticOGD(BOX, np.array([0.0]), ConstantSchedule(0.5))
    assert np.allclose(learner.predict(np.array([1.0])), [-0.5])

    clamped = OptimisticOGD(BOX, np.array([0.0]), ConstantSchedule(3.0))
    assert np.allclose(clamped.predict(np.array([1.0])), [-1.0])


def test_update_hand_value():
    learner = OptimisticOGD(BOX, np.array([0.0]), ConstantSchedule(0.5))
    learner.predict(np.zeros(1))
    learner.update(np.array([1.0]))
    assert np.allclose(learner.anchor, [-0.5])


def test_perfect_optimism_keeps_accumulator_flat():
    schedule = AdaGradSchedule(diameter=2.0, floor=1.0)
    learner = OptimisticOGD(BOX, np.array([0.0]), schedule)
    learner.predict(np.array([0.25]))
    learner.update(np.array([0.25]))
    assert schedule.accumulator == 0.0


def test_adagrad_accumulator_hand_value():
    schedule = AdaGradSchedule(diameter=1.0, floor=0.0)
    schedule.accumulate(4.0)  # gradient gap of norm 2 in round 1
    assert schedule.step_size(2) == pytest.approx(0.25)


def test_adagrad_step_sizes_nonincreasing():
    seq = make_online_sequence("adversarial_switch", {"coefficient": np.array([1.0, -0.5])})
    dom = Ball(np.zeros(2), 1.0)
    trace = run_online_convex(seq, dom, 300)
    steps = trace.step_sizes
    assert all(b <= a for a, b in zip(steps, steps[1:]))


def test_strongly_convex_schedule_formula():
    schedule = StronglyConvexSchedule(modulus=1.0)
    assert schedule.step_size(6) == pytest.approx(1.0)


def test_protocol_enforced():
    learner = OptimisticOGD(BOX, np.array([0.0]), ConstantSchedule(0.5))
    with pytest.raises(ProtocolError):
        learner.update(np.zeros(1))
    learner.predict(np.zeros(1))
    with pytest.raises(ProtocolError):
        learner.predict(np.zeros(1))


def test_infeasible_initialization_rejected():
    with pytest.raises(ValueError):
        OptimisticOGD(BOX, np.array([2.0]), ConstantSchedule(0.5))


def test_one_step_update_hand_values():
    dom = AllSpace(1)
    x = np.array([1.0])
    # cancelled step
    got = one_step_update(x, np.array([2.0]), np.array([2.0]), np.zeros(1), 0.1, dom)
    assert np.array_equal(got, x)
    got = one_step_update(x, np.array([2.0]), np.array([1.0]), np.array([3.0]), 0.1, dom)
    assert np.allclose(got, [0.6])
    ball = Ball(np.zeros(1), 0.5)
    got = one_step_update(np.array([0.5]), np.array([-9.0]), np.zeros(1), np.zeros(1), 1.0, ball)
    assert abs(got[0]) <= 0.5 + 1e-15


def test_one_step_update_rejects_nonpositive_step():
    with pytest.raises(ValueError):
        one_step_update(np.zeros(1), np.zeros(1), np.zeros(1), np.zeros(1), 0.0, AllSpace(1))


def test_two_step_one_step_consistency_on_linear_sequences():
    rng = np.random.default_rng(3)
    dom = AllSpace(3)
    eta = 0.05
    for _ in range(5):
        coeffs = [rng.normal(size=3) for _ in range(12)]
        # two-step learner
        learner = OptimisticOGD(dom, np.zeros(3), ConstantSchedule(eta))
        optimism = np.zeros(3)
        plays = []
        for t in range(12):
            plays.append(learner.predict(optimism))
            grad = coeffs[t]
            learner.update(grad)
            optimism = grad
        # one-step recursion on the same gradients
        x = np.zeros(3)
        one_plays = []
        optimism = np.zeros(3)
        for t in range(12):
            one_plays.append(x)
            nxt = coeffs[t + 1] if t + 1 < 12 else np.zeros(3)
            # optimism for round t+1 is this round's gradient
            x = one_step_update(x, coeffs[t], optimism, coeffs[t], eta, dom)
            optimism = coeffs[t]
        for a, b in zip(plays, one_plays):
            assert np.allclose(a, b, atol=1e-12)


def test_run_online_convex_requires_bounded_domain():
    seq = make_online_sequence("fixed", {"objective": make_quadratic(np.zeros(1), [1.0])})
    with pytest.raises(ValueError):
        run_online_convex(seq, AllSpace(1), 10)


def test_fixed_linear_sequence_freezes_accumulator():
    seq = make_online_sequence(
        "drifting_linear", {"base": np.array([1.0, 0.0]), "step": np.zeros(2)}
    )
    dom = Ball(np.zeros(2), 1.0)
    trace = run_online_convex(seq, dom, 50)
    # constant gradients: from round 2 on the optimism is perfect
    accum = trace.accumulators
    assert accum[0] == pytest.approx(norm(trace.gradients[0]) ** 2)
    assert all(a == pytest.approx(accum[0]) for a in accum[1:])


def test_single_round_run():
    seq = make_online_sequence("fixed", {"objective": make_quadratic(np.zeros(1), [1.0])})
    trace = run_online_convex(seq, Box(np.array([-1.0]), np.array([1.0])), 1)
    assert trace.rounds == 1
    assert trace.total_queries == 1


def test_feasibility_of_all_iterates():
    seq = make_online_sequence("adversarial_switch", {"coefficient": np.array([2.0, 1.0])})
    dom = Ball(np.array([0.2, -0.1]), 0.8)
    trace = run_online_convex(seq, dom, 200)
    for x in trace.points:
        assert norm(x - dom.center) <= dom.radius + 1e-10


def test_self_confident_inequality_on_traces_and_random_sequences():
    seq = make_online_sequence("adversarial_switch", {"coefficient": np.array([1.0])})
    trace = run_online_convex(seq, Box(np.array([-1.0]), np.array([1.0])), 400)
    gaps = [norm(g - m) ** 2 for g, m in zip(trace.gradients, trace.optimisms)]
    assert self_confident_bound_holds(gaps)

    rng = np.random.default_rng(8)
    for _ in range(200):
        gaps = rng.uniform(0.0, 5.0, size=rng.integers(1, 60))
        assert self_confident_bound_holds(gaps, floor=float(rng.uniform(1e-12, 1.0)))


def test_run_online_strongly_convex_step_sizes():
    obj = make_quadratic(np.array([0.3]), [1.0])
    seq = make_online_sequence("fixed", {"objective": obj})
    dom = Box(np.array([-1.0]), np.array([1.0]))
    trace = run_online_strongly_convex(seq, dom, 1.0, 12)
    assert trace.step_sizes[5] == pytest.approx(1.0)  # 6/(1*6)
    with pytest.raises(ValueError):
        run_online_strongly_convex(seq, dom, 0.0, 5)


def test_strongly_convex_nonsmooth_regret_bounded():
    obj = make_nonsmooth(np.array([0.2, -0.1]), 1.0)
    seq = make_online_sequence("fixed", {"objective": obj})
    dom = Ball(np.zeros(2), 1.0)
    from holderopt.metrics import regret_at

    trace = run_online_strongly_convex(seq, dom, 1.0, 4096)
    ratios = [
        regret_at(seq, trace, dom, c).value / math.log(c) for c in (256, 512, 1024, 2048, 4096)
    ]
    assert max(ratios) <= 3.0 * float(np.median(ratios))
