"""Level-Based Foraging on a 7x7 grid, forced-cooperation variant.

Two level-1 players must simultaneously ``load`` while adjacent to the
same food (level 2 = sum of player levels) to collect it. Each food pays
0.5/num_foods to both players, so a full clear returns exactly 0.5.

Episodes terminate on: an invalid action (moving off-grid or into a food
cell), a collision (both players moving onto one cell, or swapping),
collecting every food, or reaching the horizon. Moving into the other
player's cell while they stand still is merely blocked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core import EnvDescriptor

__all__ = ["LbfConfig", "LbfState", "LbfEnv", "UP", "DOWN", "LEFT", "RIGHT", "NOOP", "LOAD"]

UP, DOWN, LEFT, RIGHT, NOOP, LOAD = range(6)
_DELTAS = {UP: (-1, 0), DOWN: (1, 0), LEFT: (0, -1), RIGHT: (0, 1)}


@dataclass(frozen=True)
class LbfConfig:
    size: int = 7
    num_foods: int = 3
    horizon: int = 100
    player_level: int = 1
    gamma: float = 0.99

    @property
    def food_level(self) -> int:
        # forced cooperation: every food needs both players
        return 2 * self.player_level


@dataclass(frozen=True)
class LbfState:
    players: Tuple[Tuple[int, int], Tuple[int, int]]
    foods: Tuple[Tuple[int, int], ...]
    active: Tuple[bool, ...]
    t: int


class LbfEnv:
    def __init__(self, config: LbfConfig = LbfConfig()):
        self.config = config
        n = config.num_foods
        self.descriptor = EnvDescriptor(
            obs_dim=6 + 4 * n + 1,
            n_actions=6,
            horizon=config.horizon,
            gamma=config.gamma,
        )

    def reset(self, rng: np.random.Generator) -> LbfState:
        c = self.config
        cells = rng.choice(c.size * c.size, size=2 + c.num_foods, replace=False)
        coords = [(int(x) // c.size, int(x) % c.size) for x in cells]
        return LbfState(
            players=(coords[0], coords[1]),
            foods=tuple(coords[2:]),
            active=(True,) * c.num_foods,
            t=0,
        )

    def obs(self, state: LbfState) -> Tuple[np.ndarray, np.ndarray]:
        return self._obs_for(state, 0), self._obs_for(state, 1)

    def _obs_for(self, state: LbfState, seat: int) -> np.ndarray:
        c = self.config
        span = c.size - 1
        me = state.players[seat]
        other = state.players[1 - seat]
        out = np.empty(self.descriptor.obs_dim)
        out[0] = me[0] / span
        out[1] = me[1] / span
        out[2] = c.player_level / 4.0
        out[3] = other[0] / span
        out[4] = other[1] / span
        out[5] = c.player_level / 4.0
        k = 6
        for (fr, fc), alive in zip(state.foods, state.active):
            out[k] = fr / span
            out[k + 1] = fc / span
            out[k + 2] = c.food_level / 4.0
            out[k + 3] = 1.0 if alive else 0.0
            k += 4
        out[k] = state.t / c.horizon
        return out

    def _food_cells(self, state: LbfState) -> set:
        return {f for f, alive in zip(state.foods, state.active) if alive}

    def step(self, state: LbfState, a0: int, a1: int, rng: np.random.Generator):
        c = self.config
        foods = self._food_cells(state)
        pos = list(state.players)
        actions = (a0, a1)
        targets = []
        for i, a in enumerate(actions):
            if a in _DELTAS:
                dr, dc = _DELTAS[a]
                targets.append((pos[i][0] + dr, pos[i][1] + dc))
            else:
                targets.append(pos[i])

        t_next = state.t + 1

        def ended(reward=0.0):
            return (
                LbfState(tuple(pos), state.foods, state.active, t_next),
                reward,
                True,
                {},
            )

        # invalid moves: off-grid or into a food cell
        for i, a in enumerate(actions):
            if a in _DELTAS:
                r, col = targets[i]
                if not (0 <= r < c.size and 0 <= col < c.size) or (r, col) in foods:
                    return ended()
        moving = [a in _DELTAS for a in actions]
        # collisions: same target cell, or a swap-through
        if moving[0] and moving[1]:
            if targets[0] == targets[1]:
                return ended()
            if targets[0] == pos[1] and targets[1] == pos[0]:
                return ended()
        # blocked: stepping onto a player who stays put
        new_pos = list(targets)
        for i in range(2):
            if moving[i] and not moving[1 - i] and targets[i] == pos[1 - i]:
                new_pos[i] = pos[i]
        pos = new_pos

        reward = 0.0
        active = list(state.active)
        for f_idx, (food, alive) in enumerate(zip(state.foods, state.active)):
            if not alive:
                continue
            level_sum = 0
            for i in range(2):
                if actions[i] == LOAD and abs(pos[i][0] - food[0]) + abs(pos[i][1] - food[1]) == 1:
                    level_sum += c.player_level
            if level_sum >= c.food_level:
                active[f_idx] = False
                reward += 0.5 / c.num_foods

        done = t_next >= c.horizon or not any(active)
        new_state = LbfState(tuple(pos), state.foods, tuple(active), t_next)
        return new_state, reward, done, {}
