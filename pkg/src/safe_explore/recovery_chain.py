"""Forward analysis of the recovery Markov chain.

States 1..tau+1 encode "time since the trajectory left the admissible set":
state 1 is inside, state i+1 means i consecutive steps outside.  From state
i <= tau the chain returns to state 1 with probability rho_i, else moves to
state i+1; from state tau+1 it returns with certainty (the backup sequence
has, at the latest, completed).  State-1 occupancy therefore lower-bounds
the probability of constraint satisfaction, and the worst case over time is
rho_1^tau.

Analysis tool only; the control path never consults it.  Horizons are small,
so the distribution is propagated by exact repeated matrix-vector products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RecoveryChain:
    """Chain on {1, ..., tau+1} with per-state return probabilities rho."""

    tau: int
    rho: np.ndarray

    def __post_init__(self):
        if int(self.tau) != self.tau or self.tau < 1:
            raise ValueError(f"tau must be a positive integer, got {self.tau}")
        rho = np.asarray(self.rho, dtype=float).ravel()
        if rho.shape[0] != self.tau:
            raise ValueError(f"need {self.tau} return probabilities, got {rho.shape[0]}")
        if np.any((rho < 0.0) | (rho > 1.0)):
            raise ValueError("return probabilities must lie in [0, 1]")
        rho.flags.writeable = False
        object.__setattr__(self, "tau", int(self.tau))
        object.__setattr__(self, "rho", rho)

    def transition_matrix(self) -> np.ndarray:
        """Row-stochastic (tau+1)x(tau+1) transition matrix."""
        t = self.tau
        P = np.zeros((t + 1, t + 1))
        for i in range(t):
            P[i, 0] = self.rho[i]
            P[i, i + 1] = 1.0 - self.rho[i]
        P[t, 0] = 1.0
        return P

    def forward_distribution(self, k: int) -> np.ndarray:
        """Exact state distribution after ``k`` steps from state 1."""
        if k < 0:
            raise ValueError(f"k must be nonnegative, got {k}")
        P = self.transition_matrix()
        p = np.zeros(self.tau + 1)
        p[0] = 1.0
        for _ in range(k):
            p = p @ P
        return p

    def verify_bound(self, horizon: int) -> tuple[bool, float]:
        """Check state-1 occupancy >= rho_1^tau over all k <= horizon.

        Returns (holds, worst state-1 probability observed).
        """
        bound = float(self.rho[0]) ** self.tau
        P = self.transition_matrix()
        p = np.zeros(self.tau + 1)
        p[0] = 1.0
        min_p1 = p[0]
        for _ in range(horizon):
            p = p @ P
            min_p1 = min(min_p1, float(p[0]))
        return bool(min_p1 >= bound), min_p1
