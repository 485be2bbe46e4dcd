"""Overcooked (Cramped Room) soup-cooking simulator.

Two players cook and deliver onion soups: put three onions in a pot, wait
for it to cook, plate the soup, and bring it to the delivery cell. The
task reward is +20 per delivered soup (shared); a shaped signal adds
+0.1 onion pickup, +0.5 onion into pot, +0.1 plate pickup and +1.0 soup
plated. Training consumes the shaped signal, evaluation the raw one.

Layouts are ASCII grids: ``#`` counter, ``O`` onion pile, ``P`` pot,
``D`` delivery, ``B`` plate pile, ``.`` free floor. Cramped Room ships
embedded; other layouts can be loaded from files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core import EnvDescriptor

__all__ = [
    "OvercookedConfig",
    "OvercookedState",
    "OvercookedEnv",
    "Layout",
    "load_layout",
    "CRAMPED_ROOM",
    "HELD_NONE",
    "HELD_ONION",
    "HELD_PLATE",
    "HELD_SOUP",
    "INTERACT",
    "OC_NOOP",
]

CRAMPED_ROOM = "##P##\nO...O\n#...#\n#B#D#"

UP, DOWN, LEFT, RIGHT, INTERACT, OC_NOOP = range(6)
_DELTAS = {UP: (-1, 0), DOWN: (1, 0), LEFT: (0, -1), RIGHT: (0, 1)}

HELD_NONE, HELD_ONION, HELD_PLATE, HELD_SOUP = range(4)

DELIVERY_REWARD = 20.0
SHAPED_ONION_PICKUP = 0.1
SHAPED_ONION_IN_POT = 0.5
SHAPED_PLATE_PICKUP = 0.1
SHAPED_SOUP_PLATED = 1.0


@dataclass(frozen=True)
class Layout:
    height: int
    width: int
    free: frozenset
    onion_piles: frozenset
    plate_piles: frozenset
    delivery: frozenset
    pots: Tuple[Tuple[int, int], ...]
    counters: Tuple[Tuple[int, int], ...]  # plain counters that can hold an item

    def counter_index(self, cell) -> int:
        return self.counters.index(cell)


def load_layout(text: str) -> Layout:
    rows = [line for line in text.strip("\n").splitlines()]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("layout must be a non-empty rectangular grid")
    free, onions, plates, delivery, pots, counters = set(), set(), set(), set(), [], []
    for r, line in enumerate(rows):
        for c, ch in enumerate(line):
            cell = (r, c)
            if ch == ".":
                free.add(cell)
            elif ch == "O":
                onions.add(cell)
            elif ch == "B":
                plates.add(cell)
            elif ch == "D":
                delivery.add(cell)
            elif ch == "P":
                pots.append(cell)
            elif ch == "#":
                counters.append(cell)
            else:
                raise ValueError(f"unknown layout glyph {ch!r} at {cell}")
    for name, group in [("onion pile", onions), ("plate pile", plates),
                        ("delivery", delivery), ("pot", pots)]:
        if not group:
            raise ValueError(f"layout has no {name}")
    if len(free) < 2:
        raise ValueError("layout needs at least two free cells")
    return Layout(
        height=len(rows),
        width=len(rows[0]),
        free=frozenset(free),
        onion_piles=frozenset(onions),
        plate_piles=frozenset(plates),
        delivery=frozenset(delivery),
        pots=tuple(sorted(pots)),
        counters=tuple(sorted(counters)),
    )


@dataclass(frozen=True)
class OvercookedConfig:
    layout_text: str = CRAMPED_ROOM
    horizon: int = 400
    cook_time: int = 20
    urgency_window: int = 40
    gamma: float = 0.99


@dataclass(frozen=True)
class OvercookedState:
    players: Tuple[Tuple[int, int, int, int], ...]  # (row, col, dir, held)
    pots: Tuple[Tuple[int, int], ...]  # (onions, cook timer); ready = (3, 0)
    counters: Tuple[int, ...]  # held item per plain counter, HELD_NONE if empty
    t: int


def _pot_ready(pot: Tuple[int, int]) -> bool:
    return pot[0] == 3 and pot[1] == 0


class OvercookedEnv:
    def __init__(self, config: OvercookedConfig = OvercookedConfig()):
        self.config = config
        self.layout = load_layout(config.layout_text)
        lay = self.layout
        self.descriptor = EnvDescriptor(
            obs_dim=20 + 4 * len(lay.pots) + 3 * len(lay.counters) + 2,
            n_actions=6,
            horizon=config.horizon,
            gamma=config.gamma,
        )
        self._free_sorted = tuple(sorted(lay.free))

    def reset(self, rng: np.random.Generator) -> OvercookedState:
        lay = self.layout
        picks = rng.choice(len(self._free_sorted), size=2, replace=False)
        dirs = rng.integers(0, 4, size=2)
        players = tuple(
            (*self._free_sorted[int(p)], int(d), HELD_NONE) for p, d in zip(picks, dirs)
        )
        return OvercookedState(
            players=players,
            pots=((0, 0),) * len(lay.pots),
            counters=(HELD_NONE,) * len(lay.counters),
            t=0,
        )

    def obs(self, state: OvercookedState) -> Tuple[np.ndarray, np.ndarray]:
        return self._obs_for(state, 0), self._obs_for(state, 1)

    def _obs_for(self, state: OvercookedState, seat: int) -> np.ndarray:
        cfg, lay = self.config, self.layout
        out = np.zeros(self.descriptor.obs_dim)
        k = 0
        for who in (seat, 1 - seat):
            r, c, d, held = state.players[who]
            out[k] = r / (lay.height - 1)
            out[k + 1] = c / (lay.width - 1)
            out[k + 2 + d] = 1.0
            out[k + 6 + held] = 1.0
            k += 10
        for onions, timer in state.pots:
            out[k] = onions / 3.0
            out[k + 1] = 1.0 if timer > 0 else 0.0
            out[k + 2] = 1.0 if (onions == 3 and timer == 0) else 0.0
            out[k + 3] = timer / cfg.cook_time
            k += 4
        for item in state.counters:
            if item != HELD_NONE:
                out[k + item - 1] = 1.0
            k += 3
        out[k] = state.t / cfg.horizon
        out[k + 1] = 1.0 if cfg.horizon - state.t <= cfg.urgency_window else 0.0
        return out

    def step(self, state: OvercookedState, a0: int, a1: int, rng: np.random.Generator):
        lay, cfg = self.layout, self.config
        actions = (a0, a1)
        players = [list(p) for p in state.players]
        pots = [list(p) for p in state.pots]
        counters = list(state.counters)

        # movement: blocked moves still re-orient; conflicting moves bounce
        targets = []
        for i, a in enumerate(actions):
            r, c, d, held = players[i]
            if a in _DELTAS:
                players[i][2] = a
                dr, dc = _DELTAS[a]
                tgt = (r + dr, c + dc)
                targets.append(tgt if tgt in lay.free else (r, c))
            else:
                targets.append((r, c))
        cur = [(p[0], p[1]) for p in players]
        if targets[0] == targets[1] or (targets[0] == cur[1] and targets[1] == cur[0]):
            targets = cur
        else:
            targets = [
                cur[i] if targets[i] == cur[1 - i] and targets[1 - i] == cur[1 - i] else targets[i]
                for i in range(2)
            ]
        for i in range(2):
            players[i][0], players[i][1] = targets[i]

        reward = 0.0
        shaped_bonus = 0.0
        for i in range(2):
            if actions[i] != INTERACT:
                continue
            r, c, d, held = players[i]
            dr, dc = _DELTAS[d]
            face = (r + dr, c + dc)
            if face in lay.onion_piles:
                if held == HELD_NONE:
                    players[i][3] = HELD_ONION
                    shaped_bonus += SHAPED_ONION_PICKUP
            elif face in lay.plate_piles:
                if held == HELD_NONE:
                    players[i][3] = HELD_PLATE
                    shaped_bonus += SHAPED_PLATE_PICKUP
            elif face in lay.delivery:
                if held == HELD_SOUP:
                    players[i][3] = HELD_NONE
                    reward += DELIVERY_REWARD
            elif face in lay.pots:
                pot = pots[lay.pots.index(face)]
                if held == HELD_ONION and pot[0] < 3:
                    pot[0] += 1
                    players[i][3] = HELD_NONE
                    shaped_bonus += SHAPED_ONION_IN_POT
                    if pot[0] == 3:
                        pot[1] = cfg.cook_time
                elif held == HELD_PLATE and _pot_ready(tuple(pot)):
                    pot[0] = 0
                    players[i][3] = HELD_SOUP
                    shaped_bonus += SHAPED_SOUP_PLATED
            elif face in lay.counters:
                ci = lay.counters.index(face)
                if held == HELD_NONE and counters[ci] != HELD_NONE:
                    players[i][3] = counters[ci]
                    counters[ci] = HELD_NONE
                elif held != HELD_NONE and counters[ci] == HELD_NONE:
                    counters[ci] = held
                    players[i][3] = HELD_NONE

        for pot in pots:
            if pot[1] > 0:
                pot[1] -= 1

        t_next = state.t + 1
        new_state = OvercookedState(
            players=tuple(tuple(p) for p in players),
            pots=tuple(tuple(p) for p in pots),
            counters=tuple(counters),
            t=t_next,
        )
        done = t_next >= cfg.horizon
        return new_state, reward, done, {"shaped_reward": reward + shaped_bonus}
