"""Dec-POMDP plumbing: descriptors, trajectory storage, and rollouts.

Interaction regimes are tagged on every episode: SP (teammate + best
response), XP (teammate + ego), SXP (teammate + best response restarted
from cross-play states), MP (mixed-play). Episodes are stored as flat
per-transition arrays with explicit boundaries, which keeps variable
length episodes (LBF terminates early) cheap to handle.

Rollouts step both policies simultaneously across a batch of environment
instances and are a pure function of (env, policy parameters, start spec,
seed): identical inputs give byte-identical trajectories.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from .rng import Rng

__all__ = [
    "EnvDescriptor",
    "Episode",
    "TrajectoryBatch",
    "discounted_return",
    "rollout",
    "collect_episodes",
    "save_traces",
    "load_traces",
]

MODES = ("SP", "XP", "SXP", "MP")


@dataclass(frozen=True)
class EnvDescriptor:
    obs_dim: int
    n_actions: int
    horizon: int
    gamma: float
    num_agents: int = 2

    def __post_init__(self):
        if self.num_agents != 2:
            raise ValueError("only two-player environments are supported")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("discount must lie in (0, 1)")


@dataclass
class Episode:
    """One completed episode; arrays are aligned per transition.

    ``rewards`` is the training signal (possibly shaped), ``raw_rewards``
    the task reward. ``dones[t]`` is True only at the final transition.
    ``states[t]`` (optional) snapshots the environment state *before*
    step t, for restart-based SXP collection.
    """

    obs0: np.ndarray
    obs1: np.ndarray
    act0: np.ndarray
    act1: np.ndarray
    logp0: np.ndarray
    logp1: np.ndarray
    rewards: np.ndarray
    raw_rewards: np.ndarray
    dones: np.ndarray
    mode: str
    states: Optional[tuple] = None

    def __len__(self) -> int:
        return len(self.rewards)

    @property
    def episode_return(self) -> float:
        return float(self.raw_rewards.sum())

    def equals(self, other: "Episode") -> bool:
        return (
            self.mode == other.mode
            and all(
                np.array_equal(getattr(self, f), getattr(other, f))
                for f in ("obs0", "obs1", "act0", "act1", "logp0", "logp1",
                          "rewards", "raw_rewards", "dones")
            )
        )


@dataclass
class TrajectoryBatch:
    descriptor: EnvDescriptor
    episodes: List[Episode]
    start_distribution: str = "initial"  # "initial" | "xp_states"

    def __len__(self) -> int:
        return len(self.episodes)

    @property
    def total_steps(self) -> int:
        return sum(len(ep) for ep in self.episodes)

    def episode_returns(self) -> np.ndarray:
        return np.array([ep.episode_return for ep in self.episodes])

    def visited_states(self) -> list:
        states = []
        for ep in self.episodes:
            if ep.states is not None:
                states.extend(ep.states)
        return states

    def equals(self, other: "TrajectoryBatch") -> bool:
        return (
            self.descriptor == other.descriptor
            and self.start_distribution == other.start_distribution
            and len(self.episodes) == len(other.episodes)
            and all(a.equals(b) for a, b in zip(self.episodes, other.episodes))
        )


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """Left-to-right discounted sum; the oracle for lambda=1 GAE."""
    if not (0.0 < gamma < 1.0):
        raise ValueError("discount must lie in (0, 1)")
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * float(r)
        factor *= gamma
    return total


class _SlotBuffer:
    __slots__ = ("obs0", "obs1", "act0", "act1", "logp0", "logp1", "rew", "raw", "done", "states")

    def __init__(self):
        self.obs0, self.obs1 = [], []
        self.act0, self.act1 = [], []
        self.logp0, self.logp1 = [], []
        self.rew, self.raw, self.done = [], [], []
        self.states = []

    def finish(self, mode: str, record_states: bool) -> Episode:
        return Episode(
            obs0=np.array(self.obs0),
            obs1=np.array(self.obs1),
            act0=np.array(self.act0, dtype=np.int64),
            act1=np.array(self.act1, dtype=np.int64),
            logp0=np.array(self.logp0),
            logp1=np.array(self.logp1),
            rewards=np.array(self.rew),
            raw_rewards=np.array(self.raw),
            dones=np.array(self.done, dtype=bool),
            mode=mode,
            states=tuple(self.states) if record_states else None,
        )


def _step_active(env, states, policy0, policy1, idx, bufs, r0, r1, renv,
                 record_states, use_shaped):
    """Advance every active slot one joint step; returns done mask over idx."""
    obs_pairs = [env.obs(states[i]) for i in idx]
    obs0 = np.stack([p[0] for p in obs_pairs])
    obs1 = np.stack([p[1] for p in obs_pairs])
    env_states = [states[i] for i in idx]
    a0, lp0 = policy0.act(idx, env_states, obs0, r0)
    a1, lp1 = policy1.act(idx, env_states, obs1, r1)
    done_now = np.zeros(len(idx), dtype=bool)
    for j, i in enumerate(idx):
        buf = bufs[i]
        if record_states:
            buf.states.append(states[i])
        new_state, reward, done, info = env.step(states[i], int(a0[j]), int(a1[j]), renv)
        shaped = info.get("shaped_reward", reward)
        buf.obs0.append(obs0[j])
        buf.obs1.append(obs1[j])
        buf.act0.append(a0[j])
        buf.act1.append(a1[j])
        buf.logp0.append(lp0[j])
        buf.logp1.append(lp1[j])
        buf.rew.append(shaped if use_shaped else reward)
        buf.raw.append(reward)
        buf.done.append(done)
        states[i] = new_state
        done_now[j] = done
    return done_now


def rollout(
    env,
    policy0,
    policy1,
    start: Union[str, Sequence],
    num_episodes: int,
    rng: Rng,
    mode: str = "SP",
    record_states: bool = False,
    use_shaped_reward: bool = False,
) -> TrajectoryBatch:
    """Run ``num_episodes`` lockstep episodes of (policy0, policy1).

    ``start`` is either ``"initial"`` (sample the env's start distribution)
    or an explicit list of restart states (one per episode, cycled if
    shorter). Transitions carry the caller-supplied mode tag.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode tag {mode!r}")
    explicit = not isinstance(start, str)
    if explicit and len(start) == 0:
        raise ValueError("no restart states")
    r_reset = rng.stream("reset")
    r0, r1 = rng.stream("act0"), rng.stream("act1")
    renv = rng.stream("env")

    if explicit:
        states = [start[i % len(start)] for i in range(num_episodes)]
    else:
        states = [env.reset(r_reset) for _ in range(num_episodes)]
    bufs = [_SlotBuffer() for _ in range(num_episodes)]
    policy0.begin(num_episodes)
    policy1.begin(num_episodes)

    active = np.ones(num_episodes, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        done_now = _step_active(
            env, states, policy0, policy1, idx, bufs, r0, r1, renv,
            record_states, use_shaped_reward,
        )
        active[idx[done_now]] = False

    episodes = [b.finish(mode, record_states) for b in bufs]
    return TrajectoryBatch(
        descriptor=env.descriptor,
        episodes=episodes,
        start_distribution="xp_states" if explicit else "initial",
    )


def collect_episodes(
    env,
    policy0,
    policy1,
    num_envs: int,
    min_steps: int,
    rng: Rng,
    mode: str = "SP",
    record_states: bool = False,
    use_shaped_reward: bool = False,
) -> TrajectoryBatch:
    """Auto-resetting collector: complete episodes totalling >= min_steps.

    Slots stop resetting once the planned step total reaches the quota, so
    every returned episode is complete (GAE never needs a mid-episode
    bootstrap).
    """
    r_reset = rng.stream("reset")
    r0, r1 = rng.stream("act0"), rng.stream("act1")
    renv = rng.stream("env")
    states = [env.reset(r_reset) for _ in range(num_envs)]
    bufs = [_SlotBuffer() for _ in range(num_envs)]
    policy0.begin(num_envs)
    policy1.begin(num_envs)

    episodes: List[Episode] = []
    completed_steps = 0
    active = np.ones(num_envs, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        done_now = _step_active(
            env, states, policy0, policy1, idx, bufs, r0, r1, renv,
            record_states, use_shaped_reward,
        )
        for j, i in enumerate(idx):
            if not done_now[j]:
                continue
            episodes.append(bufs[i].finish(mode, record_states))
            completed_steps += len(episodes[-1])
            in_progress = sum(len(bufs[k].rew) for k in np.flatnonzero(active) if k != i)
            if completed_steps + in_progress < min_steps:
                bufs[i] = _SlotBuffer()
                states[i] = env.reset(r_reset)
                policy0.reset_slots(np.array([i]))
                policy1.reset_slots(np.array([i]))
            else:
                active[i] = False
    return TrajectoryBatch(env.descriptor, episodes, "initial")


# ---------------------------------------------------------------------------
# trace files: magic "AHTT", u32 version, JSON header, length-prefixed episodes

_TRACE_MAGIC = b"AHTT"
_TRACE_VERSION = 1


def save_traces(batch: TrajectoryBatch, path: Union[str, Path]) -> None:
    d = batch.descriptor
    header = json.dumps(
        {
            "obs_dim": d.obs_dim,
            "n_actions": d.n_actions,
            "horizon": d.horizon,
            "gamma": d.gamma,
            "start_distribution": batch.start_distribution,
        },
        sort_keys=True,
    ).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_TRACE_MAGIC)
        f.write(struct.pack("<I", _TRACE_VERSION))
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        f.write(struct.pack("<I", len(batch.episodes)))
        for ep in batch.episodes:
            f.write(struct.pack("<IB", len(ep), MODES.index(ep.mode)))
            f.write(ep.obs0.astype("<f8").tobytes())
            f.write(ep.obs1.astype("<f8").tobytes())
            f.write(ep.act0.astype("<u4").tobytes())
            f.write(ep.act1.astype("<u4").tobytes())
            f.write(ep.raw_rewards.astype("<f8").tobytes())
            f.write(ep.dones.astype("<u1").tobytes())


def load_traces(path: Union[str, Path]) -> TrajectoryBatch:
    with open(path, "rb") as f:
        if f.read(4) != _TRACE_MAGIC:
            raise ValueError(f"{path}: not a trace file (bad magic)")
        (version,) = struct.unpack("<I", f.read(4))
        if version != _TRACE_VERSION:
            raise ValueError(f"{path}: unsupported trace version {version}")
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode("utf-8"))
        desc = EnvDescriptor(
            obs_dim=header["obs_dim"],
            n_actions=header["n_actions"],
            horizon=header["horizon"],
            gamma=header["gamma"],
        )
        (n_eps,) = struct.unpack("<I", f.read(4))
        episodes = []
        for _ in range(n_eps):
            t, mode_idx = struct.unpack("<IB", f.read(5))
            obs0 = np.frombuffer(f.read(8 * t * desc.obs_dim), dtype="<f8").reshape(t, desc.obs_dim)
            obs1 = np.frombuffer(f.read(8 * t * desc.obs_dim), dtype="<f8").reshape(t, desc.obs_dim)
            act0 = np.frombuffer(f.read(4 * t), dtype="<u4").astype(np.int64)
            act1 = np.frombuffer(f.read(4 * t), dtype="<u4").astype(np.int64)
            raw = np.frombuffer(f.read(8 * t), dtype="<f8").astype(np.float64)
            dones = np.frombuffer(f.read(t), dtype="<u1").astype(bool)
            episodes.append(
                Episode(
                    obs0=obs0.astype(np.float64),
                    obs1=obs1.astype(np.float64),
                    act0=act0,
                    act1=act1,
                    logp0=np.zeros(t),
                    logp1=np.zeros(t),
                    rewards=raw.copy(),
                    raw_rewards=raw,
                    dones=dones,
                    mode=MODES[mode_idx],
                )
            )
    return TrajectoryBatch(desc, episodes, header["start_distribution"])
