"""Tiny matrix games: shared-payoff bandits and convention games.

Used as analytically solvable fixtures: PPO convergence has a known
optimum, and the 2x2 convention game (payoff 1 on matching conventions,
0 otherwise) is the exhaustive oracle for adversarial-diversity training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import EnvDescriptor

__all__ = ["MatrixState", "MatrixGameEnv", "convention_game", "row_bandit"]


@dataclass(frozen=True)
class MatrixState:
    t: int


class MatrixGameEnv:
    """Both players pick an action; both receive ``payoffs[a0, a1]``."""

    def __init__(self, payoffs: np.ndarray, horizon: int = 1, gamma: float = 0.99):
        payoffs = np.asarray(payoffs, dtype=np.float64)
        if payoffs.ndim != 2 or payoffs.shape[0] != payoffs.shape[1]:
            raise ValueError("payoff matrix must be square")
        self.payoffs = payoffs
        self.horizon = horizon
        self.descriptor = EnvDescriptor(
            obs_dim=1, n_actions=payoffs.shape[0], horizon=horizon, gamma=gamma
        )

    def reset(self, rng: np.random.Generator) -> MatrixState:
        return MatrixState(t=0)

    def obs(self, state: MatrixState):
        o = np.ones(1)
        return o, o.copy()

    def step(self, state: MatrixState, a0: int, a1: int, rng: np.random.Generator):
        reward = float(self.payoffs[a0, a1])
        t_next = state.t + 1
        return MatrixState(t=t_next), reward, t_next >= self.horizon, {}


def convention_game() -> MatrixGameEnv:
    """Payoff 1 iff both players pick the same convention (A/A or B/B)."""
    return MatrixGameEnv(np.eye(2))


def row_bandit(arm_rewards=(1.0, 0.0)) -> MatrixGameEnv:
    """Reward depends only on player 0's arm; player 1 is irrelevant."""
    arms = np.asarray(arm_rewards, dtype=np.float64)
    return MatrixGameEnv(np.repeat(arms[:, None], len(arms), axis=1))
