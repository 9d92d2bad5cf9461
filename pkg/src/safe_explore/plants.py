"""True-plant interface, the benchmark nonlinear system, and episode stepping.

Plants are stateless: ``step`` maps (state, input) to (next state, cost).
The benchmark plant is a two-state contraction with scalar input and a
quadratic cost; a linear plant with a fixed worst-corner disturbance is
provided for Monte-Carlo verification of the per-constraint probability
level.  Episodes parallelize across independent RNG streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .governor import StepDecision


class Plant:
    """Interface: subclasses define dynamics, cost, start state and horizon."""

    x0: np.ndarray
    horizon: int
    state_dim: int
    input_dim: int

    def step(self, x, u) -> tuple[np.ndarray, float]:
        """Advance one step; returns (next state, nonnegative cost)."""
        raise NotImplementedError

    def _check_finite(self, x: np.ndarray, u: np.ndarray) -> None:
        if not (np.isfinite(x).all() and np.isfinite(u).all()):
            raise FloatingPointError(
                f"non-finite plant step: x={np.asarray(x)}, u={np.asarray(u)}"
            )


@dataclass
class QuadraticCost:
    """Cost ``x_next^T Q x_next + u^T R u`` observed one step delayed."""

    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        self.R = np.atleast_2d(np.asarray(self.R, dtype=float))

    def __call__(self, x_next: np.ndarray, u: np.ndarray) -> float:
        return float(x_next @ self.Q @ x_next + u @ self.R @ u)


class BenchmarkPlant(Plant):
    """Two-state contraction plant with scalar input.

    Dynamics: x1' = 0.3 x1 - 0.4 sin(x2) + u, x2' = -0.1 x2 + 0.2 cos(x1)
    - 0.2 + u.  The origin is a fixed point of the drift, the drift maps
    the admissible strip |x1| <= 10 into itself, and its Jacobian has
    Frobenius norm below 1 everywhere, so the zero input is always safe
    inside the strip.
    """

    def __init__(self, x0=(5.0, 5.0), horizon: int = 15,
                 q_scale: float = 1.0e5, r_scale: float = 1.0):
        self.x0 = np.asarray(x0, dtype=float)
        self.horizon = int(horizon)
        self.state_dim = 2
        self.input_dim = 1
        self.cost = QuadraticCost(Q=q_scale * np.eye(2), R=[[r_scale]])
        self.g = np.array([1.0, 1.0])

    def drift(self, x: np.ndarray) -> np.ndarray:
        return np.array(
            [
                0.3 * x[0] - 0.4 * np.sin(x[1]),
                -0.1 * x[1] + 0.2 * np.cos(x[0]) - 0.2,
            ]
        )

    def step(self, x, u) -> tuple[np.ndarray, float]:
        x = np.asarray(x, dtype=float).ravel()
        u = np.atleast_1d(np.asarray(u, dtype=float))
        self._check_finite(x, u)
        x_next = self.drift(x) + self.g * u[0]
        return x_next, self.cost(x_next, u)


class LinearCornerPlant(Plant):
    """Linear plant ``x' = A x + B u + eps`` with a pinned disturbance corner.

    Realizes the worst case the exploration bound is computed against: the
    additive error is held constant at one corner of the error box.
    """

    def __init__(self, A, B, eps, x0, horizon: int = 15,
                 q_scale: float = 1.0e5, r_scale: float = 1.0):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.asarray(B, dtype=float)
        self.B = B.reshape(-1, 1) if B.ndim == 1 else B
        self.eps = np.asarray(eps, dtype=float).ravel()
        self.x0 = np.asarray(x0, dtype=float).ravel()
        self.horizon = int(horizon)
        self.state_dim = self.A.shape[0]
        self.input_dim = self.B.shape[1]
        self.cost = QuadraticCost(
            Q=q_scale * np.eye(self.state_dim), R=r_scale * np.eye(self.input_dim)
        )

    def step(self, x, u) -> tuple[np.ndarray, float]:
        x = np.asarray(x, dtype=float).ravel()
        u = np.atleast_1d(np.asarray(u, dtype=float))
        self._check_finite(x, u)
        x_next = self.A @ x + self.B @ u + self.eps
        return x_next, self.cost(x_next, u)


@dataclass
class EpisodeRecord:
    """Full per-step record of one episode.

    ``states`` holds x_0..x_K (K <= horizon transitions executed), with
    inputs, costs and decisions aligned so that ``decisions[i]`` produced
    ``inputs[i]`` at ``states[i]`` and led to ``states[i+1]`` at cost
    ``costs[i]``.  ``violations[i]`` flags whether ``states[i+1]`` left the
    admissible set.  ``penalty`` is nonzero only for penalized baseline
    episodes, and ``cumulative_cost`` includes it.
    """

    episode: int
    states: np.ndarray
    inputs: np.ndarray
    costs: np.ndarray
    decisions: list
    violations: np.ndarray
    cumulative_cost: float
    penalty: float = 0.0
    terminated_at: Optional[int] = None

    @property
    def steps(self) -> int:
        return len(self.costs)


def run_episode(
    plant: Plant,
    controller: Callable[[np.ndarray, np.random.Generator], StepDecision],
    rng: np.random.Generator,
    learner: Optional[Callable] = None,
    violation_test: Optional[Callable[[np.ndarray], bool]] = None,
    episode: int = 0,
) -> EpisodeRecord:
    """Roll one episode of ``plant.horizon`` steps from ``plant.x0``.

    ``controller(x, rng)`` returns the step decision; ``learner`` (if any)
    is called after each transition as ``learner(x, u, decision, x_next,
    cost, step)`` so weight updates interleave with control exactly as in
    one-step temporal-difference learning.  ``violation_test`` marks states
    outside the admissible set for the record (defaults to never).
    """
    T = plant.horizon
    x = plant.x0.copy()
    states = [x.copy()]
    inputs, costs, decisions, violations = [], [], [], []

    for k in range(T):
        decision = controller(x, rng)
        x_next, cost = plant.step(x, decision.u)
        if learner is not None:
            learner(x, decision.u, decision, x_next, cost, k)
        inputs.append(np.atleast_1d(decision.u))
        costs.append(cost)
        decisions.append(decision)
        violated = bool(violation_test(x_next)) if violation_test else False
        violations.append(violated)
        states.append(x_next.copy())
        x = x_next

    total = float(np.sum(costs)) if costs else 0.0
    return EpisodeRecord(
        episode=episode,
        states=np.asarray(states),
        inputs=np.asarray(inputs),
        costs=np.asarray(costs, dtype=float),
        decisions=decisions,
        violations=np.asarray(violations, dtype=bool),
        cumulative_cost=total,
    )
