import itertools

import numpy as np
import pytest

from subcoord.baselines import (LaggedGreedyPolicy, PolicyKind, UniformRandomPolicy,
                                brute_force_opt, sg_hat_select, sg_select)
from subcoord.core import (ActionProfile, CoverageOracle, EnumerationTooLargeError,
                           FunctionOracle)

from helpers import table_oracle


def modular(values):
    """f(A) = sum of per-(agent, action) values."""
    sizes = tuple(len(v) for v in values)
    return FunctionOracle(lambda p: float(sum(values[i][a] for i, a in p)), sizes)


def test_sg_on_modular_picks_each_agents_best():
    f = modular([[0.1, 0.7, 0.3], [0.5, 0.2], [0.0, 0.0, 0.9, 0.9]])
    assert sg_select(f).indices() == (1, 0, 2)


def test_sg_on_table_matches_hand_walk():
    # agent 0: f({0:0})=3 beats f({0:1})=1; agent 1 given {0:0}: gains 1 vs 3
    assert sg_select(table_oracle()).indices() == (0, 1)


def test_sg_ties_go_to_lowest_index():
    assert sg_select(FunctionOracle(lambda p: 1.0 if len(p) else 0.0, (3, 3))).indices() == (0, 0)


def test_sg_hat():
    f = table_oracle()
    assert sg_hat_select(None, (2, 2)).indices() == (0, 0)
    assert sg_hat_select(f, (2, 2)) == sg_select(f)
    policy = LaggedGreedyPolicy((2, 2))
    assert policy.select_actions().indices() == (0, 0)
    policy.feedback(f, ActionProfile.from_indices([0, 0]))
    assert policy.select_actions() == sg_select(f)


def test_brute_force_single_agent():
    profile, value = brute_force_opt(modular([[0.3, 0.8, 0.1]]))
    assert profile.indices() == (1,) and value == 0.8


def test_brute_force_modular():
    profile, _ = brute_force_opt(modular([[0.3, 0.8], [0.9, 0.1, 0.2]]))
    assert profile.indices() == (1, 0)


def test_brute_force_tie_is_lexicographic():
    f = FunctionOracle(lambda p: 1.0 if p.indices() in ((1, 0), (0, 1)) else 0.0, (2, 2))
    assert brute_force_opt(f)[0].indices() == (0, 1)


def test_brute_force_against_reverse_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = CoverageOracle.random((8, 8), 10, rng)
        _, value = brute_force_opt(f)
        best = max(f(ActionProfile.from_indices(c))
                   for c in itertools.product(reversed(range(8)), reversed(range(8))))
        assert value == best


def test_brute_force_guard():
    with pytest.raises(EnumerationTooLargeError):
        brute_force_opt(FunctionOracle(lambda p: 0.0, (10,) * 7))


def test_sg_half_approximation_small_sweep():
    rng = np.random.default_rng(0)
    for _ in range(50):
        sizes = tuple(rng.integers(1, 5, rng.integers(1, 4)))
        f = CoverageOracle.random(sizes, 8, rng)
        assert f(sg_select(f)) >= 0.5 * brute_force_opt(f)[1] - 1e-12


def test_policy_kind_parse():
    assert PolicyKind.parse("sg_hat") is PolicyKind.SG_HAT
    assert PolicyKind.parse("OSG") is PolicyKind.OSG
    with pytest.raises(ValueError):
        PolicyKind.parse("greedy")


def test_uniform_random_is_seeded():
    a = UniformRandomPolicy((4, 4), random_state=3)
    b = UniformRandomPolicy((4, 4), random_state=3)
    assert [a.select_actions() for _ in range(5)] == [b.select_actions() for _ in range(5)]
