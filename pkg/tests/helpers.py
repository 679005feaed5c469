"""Shared fixtures-as-functions for the test suite."""
from subcoord.core import ActionProfile, TableOracle

# 2 agents x 2 actions: every valid profile and its value
TABLE_2X2 = {
    (): 0.0,
    ((0, 0),): 3.0,
    ((0, 1),): 1.0,
    ((1, 0),): 2.0,
    ((1, 1),): 4.0,
    ((0, 0), (1, 0)): 4.0,
    ((0, 0), (1, 1)): 6.0,
    ((0, 1), (1, 0)): 3.0,
    ((0, 1), (1, 1)): 4.5,
}


def table_oracle() -> TableOracle:
    return TableOracle({ActionProfile(k): v for k, v in TABLE_2X2.items()}, (2, 2))


class SequenceEnv:
    """Replays a fixed list of oracles, one per step."""

    def __init__(self, oracles, action_sizes):
        self.oracles = list(oracles)
        self.action_sizes = tuple(action_sizes)
        self.executed = []

    def step(self, executed):
        self.executed.append(executed)
        return self.oracles[len(self.executed) - 1]
