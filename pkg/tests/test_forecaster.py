import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subcoord import forecaster as fsf
from subcoord.forecaster import FixedShareForecaster, ForecasterState
from subcoord.reference import LinearFixedShare

# p after observing (1, 0) once / three times with T=4, |V|=2; computed with a
# 40-digit mpmath transcription of the linear-domain update
P_T4_ONE = [0.7038785218742628, 0.2961214781257372]
P_T4_THREE = [0.8188228132239005, 0.1811771867760995]


def test_params_t8_v4():
    p = fsf.init(8, 4).params
    assert p.n_experts == 3
    assert p.share == 0.125
    assert p.meta_rate == pytest.approx(math.sqrt(math.log(3) / 8), abs=1e-15)
    assert p.meta_rate == pytest.approx(0.370576, abs=1e-6)
    np.testing.assert_allclose(p.rates, [1.861649, 1.316384, 0.930824], atol=1e-6)


def test_params_single_step_clamps_experts():
    p = fsf.init(1, 5).params
    assert p.n_experts == 1
    assert p.share == 1.0
    assert p.meta_rate == 0.0
    assert p.rates[0] == pytest.approx(math.sqrt(math.log(5)), abs=1e-15)


@pytest.mark.parametrize("T, n", [(0, 2), (3, 0), (2.5, 2)])
def test_init_rejects_bad_arguments(T, n):
    with pytest.raises(ValueError):
        fsf.init(T, n)


def test_fresh_state_is_uniform():
    s = fsf.init(50, 7)
    assert np.all(s.log_z == 0) and np.all(s.log_w == 0) and s.t == 1
    np.testing.assert_allclose(fsf.distribution(s), np.full(7, 1 / 7), atol=1e-15)


def test_one_update_matches_reference():
    s = fsf.observe(fsf.init(4, 2), [1.0, 0.0])
    np.testing.assert_allclose(fsf.distribution(s), P_T4_ONE, atol=1e-9)


def test_three_updates_match_reference():
    s = fsf.init(4, 2)
    for _ in range(3):
        s = fsf.observe(s, [1.0, 0.0])
    p = fsf.distribution(s)
    np.testing.assert_allclose(p, P_T4_THREE, atol=1e-9)
    assert p[0] > p[1]


def test_constant_shift_of_state_leaves_distribution():
    s = fsf.init(16, 3)
    for r in np.random.default_rng(1).random((5, 3)):
        s = fsf.observe(s, r)
    shifted = ForecasterState(s.params, s.log_z + 7.0,
                              s.log_w + np.array([[1.0], [-3.0], [2.5], [0.0]]), s.t)
    np.testing.assert_allclose(fsf.distribution(shifted), fsf.distribution(s), atol=1e-12)


def test_equal_rewards_from_uniform_state_stay_uniform():
    s = fsf.observe(fsf.init(16, 3), [0.4, 0.4, 0.4])
    np.testing.assert_allclose(fsf.distribution(s), np.full(3, 1 / 3), atol=1e-12)


def test_equal_rewards_only_apply_the_share_step():
    # from a non-uniform state the share step still pulls toward uniform,
    # exactly as an all-zero reward vector would
    s = fsf.init(16, 3)
    for r in np.random.default_rng(2).random((4, 3)):
        s = fsf.observe(s, r)
    before = fsf.distribution(s)
    after = fsf.distribution(fsf.observe(s, [0.4, 0.4, 0.4]))
    np.testing.assert_allclose(after, fsf.distribution(fsf.observe(s, np.zeros(3))), atol=1e-12)
    assert np.ptp(after) < np.ptp(before)


def test_share_keeps_every_action_alive():
    s = fsf.observe(fsf.init(10, 4), [1.0, 0.0, 0.0, 0.0])
    assert np.all(fsf.distribution(s) > 0)


def test_observe_validates():
    s = fsf.init(2, 3)
    with pytest.raises(ValueError):
        fsf.observe(s, [1.0, 0.0])
    with pytest.raises(ValueError):
        fsf.observe(s, [1.0, np.nan, 0.0])
    s = fsf.observe(fsf.observe(s, [0, 0, 0]), [0, 0, 0])
    with pytest.raises(ValueError):
        fsf.observe(s, [0, 0, 0])


def test_sample_point_masses():
    rng = np.random.default_rng(0)
    assert all(fsf.sample([1.0, 0.0, 0.0], rng) == 0 for _ in range(20))
    assert all(fsf.sample([0.0, 0.0, 1.0], rng) == 2 for _ in range(20))


class _FixedDraw:
    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


def test_sample_inverse_cdf():
    p = [0.25] * 4
    assert fsf.sample(p, _FixedDraw(0.6)) == 2
    # a draw exactly on a cumulative edge moves to the next index
    assert fsf.sample(p, _FixedDraw(0.5)) == 2
    assert fsf.sample(p, _FixedDraw(0.0)) == 0
    assert fsf.sample([0.5, 0.0, 0.5], _FixedDraw(0.5)) == 2


def test_long_horizon_stays_finite():
    T = 100_000
    s = fsf.init(T, 4)
    rewards = np.random.default_rng(5).random((2000, 4))
    rewards[:, 0] = 1.0
    for r in rewards:
        s = fsf.observe(s, r)
    assert np.all(np.isfinite(s.log_w)) and np.all(np.isfinite(s.log_z))
    p = fsf.distribution(s)
    assert abs(p.sum() - 1) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), T=st.integers(1, 16), n=st.integers(1, 4))
def test_matches_linear_reference(seed, T, n):
    rewards = np.random.default_rng(seed).random((T, n))
    s, ref = fsf.init(T, n), LinearFixedShare(T, n)
    for r in rewards:
        s, _ = fsf.observe(s, r), ref.update(r)
        np.testing.assert_allclose(fsf.distribution(s), ref.distribution(), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(-5, 5))
def test_reward_shift_invariance(seed, c):
    rng = np.random.default_rng(seed)
    s = fsf.init(32, 3)
    for r in rng.random((3, 3)):
        s = fsf.observe(s, r)
    r = rng.random(3)
    np.testing.assert_allclose(fsf.distribution(fsf.observe(s, r)),
                               fsf.distribution(fsf.observe(s, r + c)), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(rewards=st.lists(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
                        min_size=1, max_size=30))
def test_distribution_is_on_simplex(rewards):
    s = fsf.init(30, 3)
    for r in rewards:
        s = fsf.observe(s, r)
        p = fsf.distribution(s)
        assert np.all(p >= 0) and abs(p.sum() - 1) <= 1e-12


def test_estimator_api():
    est = FixedShareForecaster(n_steps=10, random_state=0)
    assert est.get_params() == {"n_steps": 10, "n_actions": None, "random_state": 0}
    est.fit(np.tile([1.0, 0.0, 0.0], (5, 1)))
    assert est.n_actions_ == 3 and est.predict() == 0
    p = est.predict_proba()
    est.partial_fit([0.0, 1.0, 0.0])
    assert est.predict_proba()[1] > p[1]
    draws = [FixedShareForecaster(10, 3, random_state=4).sample_action() for _ in range(3)]
    assert len(set(draws)) == 1


def test_estimator_unfitted_without_size():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        FixedShareForecaster(5).predict_proba()
