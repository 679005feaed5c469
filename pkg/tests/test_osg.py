import numpy as np
import pytest

from subcoord import forecaster as fsf
from subcoord.core import (ActionProfile, CountingOracle, CoverageOracle, FunctionOracle,
                           check_normalized_monotone_submodular)
from subcoord.experiment import make_policy
from subcoord.osg import (OnlineSequentialGreedy, ProfileMismatchError, RunExhaustedError,
                          agent_rngs)
from subcoord.tracking_sim import ScenarioConfig, TargetSpec, make_environment

from helpers import SequenceEnv, table_oracle


def test_table_fixture_is_monotone_submodular():
    assert check_normalized_monotone_submodular(table_oracle()).passed


def test_rewards_are_table_marginal_gains():
    f = table_oracle()
    # hand-telescoped gains: agent 0 always sees f({a}); agent 1 sees the
    # gain over agent 0's draw
    expected_second = {0: [1.0, 3.0], 1: [2.0, 3.5]}
    for seed in range(6):
        coord = OnlineSequentialGreedy((2, 2), n_steps=1, random_state=seed)
        chosen = coord.select_actions()
        out = coord.feedback(f, chosen)
        np.testing.assert_array_equal(out.rewards_fed[0], [3.0, 1.0])
        np.testing.assert_array_equal(out.rewards_fed[1], expected_second[chosen.action_of(0)])
        assert out.objective_value == f(chosen)


def test_single_agent_rewards_are_values():
    values = [0.2, 0.9, 0.4]
    f = FunctionOracle(lambda p: values[p.action_of(0)] if len(p) else 0.0, (3,))
    coord = OnlineSequentialGreedy((3,), n_steps=2, random_state=0)
    out = coord.feedback(f, coord.select_actions())
    np.testing.assert_array_equal(out.rewards_fed[0], values)


def test_zero_objective_feeds_zeros():
    f = FunctionOracle(lambda p: 0.0, (4, 4))
    coord = OnlineSequentialGreedy((4, 4), n_steps=5, random_state=0)
    out = coord.feedback(f, coord.select_actions())
    assert all(np.all(r == 0) for r in out.rewards_fed)
    for p in coord.distributions():
        np.testing.assert_allclose(p, np.full(4, 0.25), atol=1e-15)


def test_selection_never_touches_objective():
    f = CountingOracle(CoverageOracle.random((8, 8), 10, np.random.default_rng(0)))
    coord = OnlineSequentialGreedy((8, 8), n_steps=3, random_state=0)
    for _ in range(3):
        before = f.calls
        chosen = coord.select_actions(upcoming=f)
        assert f.calls == before
        coord.feedback(f, chosen)
        # one empty-profile value plus one call per candidate action
        assert f.calls - before == 1 + 16


def test_exact_evaluation_counts():
    rng = np.random.default_rng(1)
    oracles = [CoverageOracle.random((8, 8), 12, rng) for _ in range(100)]
    coord = OnlineSequentialGreedy((8, 8), n_steps=100, random_state=3)
    trace = coord.run(SequenceEnv(oracles, (8, 8)))
    assert trace.counters["gain_evals"] == [800, 800]
    assert trace.counters["prefix_evals"] == [100, 0]
    assert coord.counters_.per_step_gain_evals == [16] * 100
    ops = fsf.arithmetic_ops(fsf.init(100, 8).params)
    assert trace.counters["arithmetic_ops"] == [100 * ops] * 2


def test_zero_horizon_gives_empty_trace():
    coord = OnlineSequentialGreedy((3, 3), n_steps=0, random_state=0)
    assert coord.run(SequenceEnv([], (3, 3))).steps == []


def test_run_exhausted():
    coord = OnlineSequentialGreedy((2,), n_steps=1, random_state=0)
    f = FunctionOracle(lambda p: float(len(p)), (2,))
    coord.feedback(f, coord.select_actions())
    with pytest.raises(RunExhaustedError):
        coord.select_actions()


def test_feedback_rejects_foreign_profile():
    coord = OnlineSequentialGreedy((2, 2), n_steps=3, random_state=0)
    f = table_oracle()
    with pytest.raises(ProfileMismatchError):
        coord.feedback(f, ActionProfile.from_indices([0, 0]))
    chosen = coord.select_actions()
    other = ActionProfile.from_indices([1 - i for i in chosen.indices()])
    with pytest.raises(ProfileMismatchError):
        coord.feedback(f, other)


def test_point_mass_forecaster_is_followed():
    coord = OnlineSequentialGreedy((4,), n_steps=10, random_state=0).reset()
    s = coord.states_[0]
    log_w = np.full_like(s.log_w, -1e6)
    log_w[:, 2] = 0.0
    coord.states_[0] = fsf.ForecasterState(s.params, s.log_z, log_w, s.t)
    assert coord.select_actions().indices() == (2,)


def test_same_seed_same_run():
    rng = np.random.default_rng(7)
    oracles = [CoverageOracle.random((5, 5), 8, rng) for _ in range(100)]

    def run(seed):
        return OnlineSequentialGreedy((5, 5), 100, random_state=seed).run(
            SequenceEnv(oracles, (5, 5)))

    a, b, c = run(11), run(11), run(12)
    assert [s.chosen for s in a.steps] == [s.chosen for s in b.steps]
    assert [s.value for s in a.steps] == [s.value for s in b.steps]
    assert [s.chosen for s in a.steps] != [s.chosen for s in c.steps]


def test_agent_streams_depend_only_on_index():
    two = agent_rngs(5, 2)
    three = agent_rngs(5, 3)
    assert two[1].random() == three[1].random()


def test_first_step_is_uniform():
    draws = np.array([OnlineSequentialGreedy((8, 8), 10, random_state=s).select_actions().indices()
                      for s in range(4000)])
    for agent in range(2):
        counts = np.bincount(draws[:, agent], minlength=8)
        # 4000 draws over 8 bins: expected 500, sd about 21
        assert np.all(np.abs(counts - 500) < 100)


def _tracking_config(scenario="adversarial", steps=300):
    return ScenarioConfig(horizon_s=steps / 20, steps=steps, scenario=scenario,
                          robots=[(0, 0), (0, -2)],
                          targets=[TargetSpec((2, 2)), TargetSpec((2, -4))])


def test_rewards_telescope_and_lie_in_unit_interval_with_auto_scale():
    config = _tracking_config()
    env = make_environment(config, seed=3)
    coord = make_policy(config, env, 3)
    assert coord.reward_scale == env.reward_bound
    for _ in range(config.steps):
        chosen = coord.select_actions()
        f_t = env.step(chosen)
        out = coord.feedback(f_t, chosen)
        fed = sum(r[a] for r, a in zip(out.rewards_fed, chosen.indices()))
        assert abs(fed * coord.reward_scale - f_t(chosen)) <= 1e-9
        assert all(np.all((r >= 0) & (r <= 1)) for r in out.rewards_fed)


def test_estimator_params_roundtrip():
    coord = OnlineSequentialGreedy((3, 4), n_steps=7, reward_scale=2.0, random_state=1)
    clone = OnlineSequentialGreedy(**coord.get_params())
    assert clone.get_params() == coord.get_params()
    with pytest.raises(ValueError):
        OnlineSequentialGreedy((3, 0), 5).reset()
    with pytest.raises(ValueError):
        OnlineSequentialGreedy((3,), 5, reward_scale=0).reset()
