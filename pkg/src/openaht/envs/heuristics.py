"""Scripted evaluation agents: LBF sequence planners and Overcooked cooks.

Sequence planners collect foods in a fixed order (column-major, reverse
column-major, lexicographic, reverse lexicographic, nearest-first,
farthest-first from the agent's initial position), walking BFS shortest
paths over free cells and loading when adjacent to the current target.

Cooks execute a kitchen role (fetch onions, plate soups, or both) and,
with probability ``drop_prob`` per held item, divert to place that item
on the nearest empty counter instead.

Planners are deterministic given the state; the only seat asymmetry is a
yield rule (the higher seat defers when its next cell is within the other
player's reach) so that two planners never trigger the terminal LBF
collision rule while converging on one food.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .lbf import LOAD, NOOP, LbfEnv, LbfState
from .overcooked import (
    HELD_NONE,
    HELD_ONION,
    HELD_PLATE,
    HELD_SOUP,
    INTERACT,
    OC_NOOP,
    OvercookedEnv,
    OvercookedState,
)

__all__ = ["HeuristicAgent", "HeuristicPolicy", "heuristic_action", "LBF_KINDS", "COOK_KINDS"]

LBF_KINDS = ("seq_col", "seq_rcol", "seq_lexi", "seq_rlexi", "seq_nearest", "seq_farthest")
COOK_KINDS = ("onion_cook", "plate_cook", "independent_cook")

_DIR_ACTIONS = ((-1, 0), (1, 0), (0, -1), (0, 1))  # up, down, left, right


@dataclass(frozen=True)
class HeuristicAgent:
    kind: str
    drop_prob: float = 0.0

    def __post_init__(self):
        if self.kind not in LBF_KINDS + COOK_KINDS:
            raise ValueError(f"unknown heuristic kind {self.kind!r}")
        if not (0.0 <= self.drop_prob <= 1.0):
            raise ValueError("drop_prob must lie in [0, 1]")

    @property
    def name(self) -> str:
        if self.kind in COOK_KINDS:
            return f"{self.kind}_{self.drop_prob:g}"
        return self.kind


def _bfs_first_step(start, goals, passable):
    """First step of a shortest path from start to the nearest goal.

    Ties between goals break on (distance, row, col); ties between paths
    break on the lowest action index (up, down, left, right). Returns
    (next_cell, goal) or (None, None) when no goal is reachable;
    (start, start) when already standing on a goal.
    """
    if start in goals:
        return start, start
    parent = {start: None}
    dist = {start: 0}
    queue = deque([start])
    found = []
    found_dist = None
    while queue:
        cell = queue.popleft()
        if found_dist is not None and dist[cell] >= found_dist:
            break
        for dr, dc in _DIR_ACTIONS:
            nxt = (cell[0] + dr, cell[1] + dc)
            if nxt in dist:
                continue
            if nxt in goals:
                dist[nxt] = dist[cell] + 1
                parent[nxt] = cell
                found.append(nxt)
                found_dist = dist[nxt]
                continue
            if not passable(nxt):
                continue
            dist[nxt] = dist[cell] + 1
            parent[nxt] = cell
            queue.append(nxt)
    if not found:
        return None, None
    goal = min(found)
    cell = goal
    while parent[cell] != start:
        cell = parent[cell]
    return cell, goal


def _direction_to(src, dst) -> int:
    for action, (dr, dc) in enumerate(_DIR_ACTIONS):
        if (src[0] + dr, src[1] + dc) == dst:
            return action
    raise ValueError(f"{dst} is not adjacent to {src}")


def _adjacent(a, b) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


# ---------------------------------------------------------------------------
# LBF sequence planners


def _food_order(agent: HeuristicAgent, state: LbfState, me) -> list:
    idx = range(len(state.foods))
    keys = {
        "seq_col": lambda i: (state.foods[i][1], state.foods[i][0]),
        "seq_rcol": lambda i: (-state.foods[i][1], -state.foods[i][0]),
        "seq_lexi": lambda i: state.foods[i],
        "seq_rlexi": lambda i: (-state.foods[i][0], -state.foods[i][1]),
        "seq_nearest": lambda i: (
            abs(state.foods[i][0] - me[0]) + abs(state.foods[i][1] - me[1]),
            state.foods[i],
        ),
        "seq_farthest": lambda i: (
            -(abs(state.foods[i][0] - me[0]) + abs(state.foods[i][1] - me[1])),
            state.foods[i],
        ),
    }
    return sorted(idx, key=keys[agent.kind])


def _lbf_action(agent: HeuristicAgent, state: LbfState, env: LbfEnv, seat: int,
                rng: np.random.Generator, memory: dict) -> int:
    me = state.players[seat]
    other = state.players[1 - seat]
    if "order" not in memory:
        memory["order"] = _food_order(agent, state, me)
    size = env.config.size
    food_cells = {f for f, alive in zip(state.foods, state.active) if alive}

    def usable_slots(food):
        # both players must stand adjacent simultaneously to load
        return sum(
            1
            for dr, dc in _DIR_ACTIONS
            if 0 <= food[0] + dr < size
            and 0 <= food[1] + dc < size
            and (food[0] + dr, food[1] + dc) not in food_cells
        )

    remaining = [i for i in memory["order"] if state.active[i]]
    if not remaining:
        return NOOP
    # defer foods that cannot currently seat two loaders (e.g. a corner food
    # walled in by another food); collecting the blocker frees them up
    target = next((i for i in remaining if usable_slots(state.foods[i]) >= 2), remaining[0])
    food = state.foods[target]
    if _adjacent(me, food):
        return LOAD

    def passable(cell):
        r, c = cell
        return 0 <= r < size and 0 <= c < size and cell not in food_cells and cell != other

    goals = {
        (food[0] + dr, food[1] + dc)
        for dr, dc in _DIR_ACTIONS
        if passable((food[0] + dr, food[1] + dc))
    }
    step, _ = _bfs_first_step(me, goals, passable)
    if step is None:
        return NOOP
    # seat-priority yield: avoid contested cells while the other planner is
    # in transit (once it parks next to our target to load, it will not move)
    if seat == 1 and _adjacent(step, other) and not _adjacent(other, food):
        return NOOP
    return _direction_to(me, step)


# ---------------------------------------------------------------------------
# Overcooked cooks


def _cook_goto(me, other, lay, stations, memory_key=None) -> int:
    """Move toward / face / interact with the nearest station cell."""
    pos = (me[0], me[1])
    facing = (me[0] + _DIR_ACTIONS[me[2]][0], me[1] + _DIR_ACTIONS[me[2]][1])
    adjacent_stations = [s for s in stations if _adjacent(pos, s)]
    if adjacent_stations:
        if facing in adjacent_stations:
            return INTERACT
        return _direction_to(pos, min(adjacent_stations))

    other_pos = (other[0], other[1])

    def passable(cell):
        return cell in lay.free and cell != other_pos

    goals = {
        (s[0] + dr, s[1] + dc)
        for s in stations
        for dr, dc in _DIR_ACTIONS
        if passable((s[0] + dr, s[1] + dc))
    }
    step, _ = _bfs_first_step(pos, goals, passable)
    if step is None:
        return OC_NOOP
    return _direction_to(pos, step)


def _step_aside(me, other, lay) -> int:
    """Idle behaviour: clear station access cells instead of camping on them.

    Every station in Cramped Room has a single access cell, so an idle cook
    standing in front of one can deadlock its partner forever.
    """
    pos = (me[0], me[1])
    other_pos = (other[0], other[1])
    stations = set(lay.pots) | lay.onion_piles | lay.plate_piles | lay.delivery
    nooks = {
        cell
        for cell in lay.free
        if cell != other_pos and not any(_adjacent(cell, s) for s in stations)
    }
    if pos in nooks or not nooks:
        return OC_NOOP

    def passable(cell):
        return cell in lay.free and cell != other_pos

    step, _ = _bfs_first_step(pos, nooks, passable)
    if step is None:
        return OC_NOOP
    return _direction_to(pos, step)


def _cook_role_action(agent: HeuristicAgent, state: OvercookedState, lay,
                      seat: int, rng: np.random.Generator, memory: dict) -> int:
    me = state.players[seat]
    other = state.players[1 - seat]
    held = me[3]

    # one divert decision per picked-up item
    if held != HELD_NONE and memory.get("last_held", HELD_NONE) == HELD_NONE:
        memory["divert"] = agent.drop_prob > 0 and rng.random() < agent.drop_prob
    if held == HELD_NONE:
        memory["divert"] = False
    memory["last_held"] = held

    idle = _step_aside(me, other, lay)

    def goto(stations):
        if not stations:
            return idle
        return _cook_goto(me, other, lay, set(stations))

    def empty_counters():
        return [c for c, item in zip(lay.counters, state.counters) if item == HELD_NONE]

    if held != HELD_NONE and memory.get("divert"):
        return goto(empty_counters())

    fillable_pots = [lay.pots[i] for i, (n, t) in enumerate(state.pots) if n < 3]
    ready_pots = [lay.pots[i] for i, (n, t) in enumerate(state.pots) if n == 3 and t == 0]
    busy_pots = [lay.pots[i] for i, (n, t) in enumerate(state.pots) if n == 3]

    if held == HELD_SOUP:
        return goto(lay.delivery)
    if held == HELD_ONION:
        if agent.kind == "plate_cook" or not fillable_pots:
            # not this agent's job right now; stash it so hands are free
            return goto(empty_counters()) if agent.kind != "onion_cook" else idle
        return goto(fillable_pots)
    if held == HELD_PLATE:
        if agent.kind == "onion_cook":
            return goto(empty_counters())
        if ready_pots:
            return goto(ready_pots)
        if busy_pots:
            # wait beside the cooking pot, ready to plate
            pos = (me[0], me[1])
            if any(_adjacent(pos, p) for p in busy_pots):
                return OC_NOOP
            return goto(busy_pots)
        return idle

    # empty-handed
    if agent.kind == "onion_cook":
        return goto(lay.onion_piles) if fillable_pots else idle
    if agent.kind == "plate_cook":
        return goto(lay.plate_piles) if busy_pots else idle
    # independent cook
    if ready_pots or busy_pots:
        return goto(lay.plate_piles)
    return goto(lay.onion_piles)


def _cook_action(agent: HeuristicAgent, state: OvercookedState, env: OvercookedEnv,
                 seat: int, rng: np.random.Generator, memory: dict) -> int:
    lay = env.layout
    me = state.players[seat]
    pos = (me[0], me[1])

    # break deterministic mutual-bounce loops: after a blocked move into a
    # free cell, the higher seat waits one step so the other player can pass
    if seat == 1 and memory.get("last_move") is not None and memory.get("last_pos") == pos:
        memory["last_pos"] = pos
        memory["last_move"] = None
        return OC_NOOP

    action = _cook_role_action(agent, state, lay, seat, rng, memory)

    memory["last_pos"] = pos
    memory["last_move"] = None
    if 0 <= action < 4:
        dr, dc = _DIR_ACTIONS[action]
        target = (pos[0] + dr, pos[1] + dc)
        if target in lay.free:
            memory["last_move"] = target
    return action


def heuristic_action(agent: HeuristicAgent, state, env, seat: int,
                     rng: np.random.Generator, memory: dict | None = None) -> int:
    """Next action for a scripted agent at ``seat`` in ``state``."""
    if memory is None:
        memory = {}
    if isinstance(env, LbfEnv):
        if agent.kind not in LBF_KINDS:
            raise ValueError(f"{agent.kind!r} is not an LBF heuristic")
        return _lbf_action(agent, state, env, seat, rng, memory)
    if isinstance(env, OvercookedEnv):
        if agent.kind not in COOK_KINDS:
            raise ValueError(f"{agent.kind!r} is not an Overcooked heuristic")
        return _cook_action(agent, state, env, seat, rng, memory)
    raise ValueError(f"no heuristics for env {type(env).__name__}")


class HeuristicPolicy:
    """Rollout adapter: per-slot memory, acts from environment states."""

    def __init__(self, agent: HeuristicAgent, env, seat: int):
        self.agent = agent
        self.env = env
        self.seat = seat
        self._memories: list[dict] = []

    def begin(self, n: int) -> None:
        self._memories = [{} for _ in range(n)]

    def reset_slots(self, idx) -> None:
        for i in idx:
            self._memories[int(i)] = {}

    def act(self, idx, env_states, obs, rng):
        actions = np.empty(len(idx), dtype=np.int64)
        for j, slot in enumerate(idx):
            actions[j] = heuristic_action(
                self.agent, env_states[j], self.env, self.seat, rng, self._memories[int(slot)]
            )
        return actions, np.zeros(len(idx))
