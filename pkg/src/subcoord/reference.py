"""Plain linear-domain transcription of the fixed-share forecaster.

Kept deliberately naive (Python lists, no logarithms, no renormalization)
so it can serve as an independent oracle for the log-domain version in
:mod:`subcoord.forecaster`.  Only safe for short horizons and bounded
rewards, where the raw weights cannot overflow.
"""
from __future__ import annotations

import math


class LinearFixedShare:
    def __init__(self, n_steps: int, n_actions: int):
        self.n_actions = n_actions
        self.J = max(1, math.ceil(math.log2(n_steps)))
        self.gamma = math.sqrt(math.log(self.J) / n_steps)
        self.beta = 1.0 / n_steps
        self.gammas = [math.sqrt(math.log(n_actions * n_steps) / 2 ** (j - 1))
                       for j in range(1, self.J + 1)]
        self.z = [1.0 / self.J] * self.J
        self.w = [[1.0 / n_actions] * n_actions for _ in range(self.J)]

    def expert_distribution(self, j: int) -> list[float]:
        total = sum(self.w[j])
        return [x / total for x in self.w[j]]

    def distribution(self) -> list[float]:
        z_total = sum(self.z)
        p = [0.0] * self.n_actions
        for j in range(self.J):
            pj = self.expert_distribution(j)
            for a in range(self.n_actions):
                p[a] += self.z[j] / z_total * pj[a]
        return p

    def update(self, rewards) -> None:
        n = self.n_actions
        for j in range(self.J):
            pj = self.expert_distribution(j)
            v = [self.w[j][a] * math.exp(self.gammas[j] * rewards[a]) for a in range(n)]
            W = sum(v)
            self.w[j] = [self.beta * W / n + (1 - self.beta) * v[a] for a in range(n)]
            expected = sum(pj[a] * rewards[a] for a in range(n))
            self.z[j] = self.z[j] * math.exp(self.gamma * expected)
