"""Actor/critic networks and the policy wrappers used during rollouts.

Two architectures cover every agent in the package:

* plain MLPs (two tanh hidden layers by default) for teammates, best
  responses, and all critics over states;
* a single gated recurrent cell (update-gate variant) with actor and
  value heads for the history-conditioned ego agent.

Forward passes are written once against the autodiff helpers, so the same
code runs tape-free on ndarrays during rollouts and taped on Tensors
inside loss closures.
"""

from __future__ import annotations

from typing import Dict, Sequence

import numpy as np

from . import autodiff as ad
from .params import ParamSet, orthogonal

__all__ = [
    "build_mlp",
    "build_recurrent_ac",
    "actor_forward",
    "critic_forward",
    "recurrent_forward",
    "recurrent_sequence_values",
    "np_log_softmax",
    "sample_categorical",
    "MlpPolicy",
    "RecurrentPolicy",
    "UniformPolicy",
    "FixedActionPolicy",
    "MixturePolicy",
]


# ---------------------------------------------------------------------------
# builders


def build_mlp(
    rng: np.random.Generator,
    in_dim: int,
    out_dim: int,
    hidden: Sequence[int] = (64, 64),
    activation: str = "tanh",
    head_gain: float = 0.01,
) -> ParamSet:
    """MLP with orthogonal init: gain sqrt(2) hidden, ``head_gain`` output."""
    dims = [in_dim, *hidden, out_dim]
    layout = []
    for i in range(len(dims) - 1):
        layout.append((f"w{i}", (dims[i], dims[i + 1])))
        layout.append((f"b{i}", (dims[i + 1],)))
    meta = {
        "kind": "mlp",
        "in": int(in_dim),
        "hidden": [int(h) for h in hidden],
        "out": int(out_dim),
        "activation": activation,
    }
    pset = ParamSet(layout, meta)
    n_layers = len(dims) - 1
    for i in range(n_layers):
        gain = head_gain if i == n_layers - 1 else np.sqrt(2.0)
        pset.view(f"w{i}")[:] = orthogonal(rng, (dims[i], dims[i + 1]), gain)
    return pset


def build_recurrent_ac(
    rng: np.random.Generator,
    obs_dim: int,
    n_actions: int,
    hidden: int = 64,
) -> ParamSet:
    """Gated recurrent cell over (obs, last action) with policy/value heads."""
    layout = [
        ("zo", (obs_dim, hidden)),
        ("za", (n_actions, hidden)),
        ("zh", (hidden, hidden)),
        ("zb", (hidden,)),
        ("ho", (obs_dim, hidden)),
        ("ha", (n_actions, hidden)),
        ("hh", (hidden, hidden)),
        ("hb", (hidden,)),
        ("pw", (hidden, n_actions)),
        ("pb", (n_actions,)),
        ("vw", (hidden, 1)),
        ("vb", (1,)),
    ]
    meta = {
        "kind": "gru_ac",
        "obs": int(obs_dim),
        "actions": int(n_actions),
        "hidden": int(hidden),
    }
    pset = ParamSet(layout, meta)
    g = np.sqrt(2.0)
    for name, gain in [
        ("zo", g), ("za", g), ("zh", g), ("ho", g), ("ha", g), ("hh", g),
        ("pw", 0.01), ("vw", 1.0),
    ]:
        pset.view(name)[:] = orthogonal(rng, pset.view(name).shape, gain)
    return pset


# ---------------------------------------------------------------------------
# forwards (ndarray or Tensor params)


def _activate(x, kind: str):
    if kind == "tanh":
        return ad.tanh(x)
    if kind == "relu":
        return ad.relu(x)
    raise ValueError(f"unknown activation {kind!r}")


def _mlp_forward(p: Dict, meta: dict, x):
    n_layers = len(meta["hidden"]) + 1
    h = x
    for i in range(n_layers):
        h = ad.add(ad.matmul(h, p[f"w{i}"]), p[f"b{i}"])
        if i < n_layers - 1:
            h = _activate(h, meta["activation"])
    return h


def actor_forward(params: ParamSet, obs, leaves: Dict | None = None):
    """Action logits for a batch of observations (softmax = policy)."""
    d = obs.data if ad.is_tensor(obs) else np.asarray(obs)
    if d.shape[-1] != params.meta["in"]:
        raise ValueError(f"obs dim {d.shape[-1]} != network input {params.meta['in']}")
    return _mlp_forward(leaves if leaves is not None else params.views(), params.meta, obs)


def critic_forward(params: ParamSet, obs, leaves: Dict | None = None):
    """State values, shape (N, 1)."""
    d = obs.data if ad.is_tensor(obs) else np.asarray(obs)
    if d.shape[-1] != params.meta["in"]:
        raise ValueError(f"obs dim {d.shape[-1]} != network input {params.meta['in']}")
    return _mlp_forward(leaves if leaves is not None else params.views(), params.meta, obs)


def recurrent_forward(params: ParamSet, hidden, obs, last_action_onehot, leaves: Dict | None = None):
    """One recurrent step: returns (hidden', logits, value).

    ``hidden`` is (N, H); reset to zeros at episode start. ``last_action_onehot``
    is all-zero at t=0.
    """
    p = leaves if leaves is not None else params.views()
    d = obs.data if ad.is_tensor(obs) else np.asarray(obs)
    if d.shape[-1] != params.meta["obs"]:
        raise ValueError(f"obs dim {d.shape[-1]} != network input {params.meta['obs']}")
    z_pre = ad.add(
        ad.add(ad.matmul(obs, p["zo"]), ad.matmul(last_action_onehot, p["za"])),
        ad.add(ad.matmul(hidden, p["zh"]), p["zb"]),
    )
    z = ad.sigmoid(z_pre)
    cand_pre = ad.add(
        ad.add(ad.matmul(obs, p["ho"]), ad.matmul(last_action_onehot, p["ha"])),
        ad.add(ad.matmul(hidden, p["hh"]), p["hb"]),
    )
    cand = ad.tanh(cand_pre)
    one_minus_z = ad.sub(1.0, z)
    new_hidden = ad.add(ad.mul(one_minus_z, hidden), ad.mul(z, cand))
    logits = ad.add(ad.matmul(new_hidden, p["pw"]), p["pb"])
    value = ad.add(ad.matmul(new_hidden, p["vw"]), p["vb"])
    return new_hidden, logits, value


def recurrent_sequence_values(params: ParamSet, obs_seq: np.ndarray, act_seq: np.ndarray) -> np.ndarray:
    """Value estimates along one episode (numpy, no tape)."""
    n_actions = params.meta["actions"]
    hidden = np.zeros((1, params.meta["hidden"]))
    last = np.zeros((1, n_actions))
    values = np.empty(len(obs_seq))
    for t in range(len(obs_seq)):
        hidden, _, v = recurrent_forward(params, hidden, obs_seq[t : t + 1], last)
        values[t] = v[0, 0]
        last = np.zeros((1, n_actions))
        last[0, act_seq[t]] = 1.0
    return values


# ---------------------------------------------------------------------------
# numpy-side distributions


def np_log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def sample_categorical(log_probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample one action per row from row-wise log-probabilities."""
    p = np.exp(log_probs)
    cdf = np.cumsum(p, axis=-1)
    u = rng.random((log_probs.shape[0], 1)) * cdf[:, -1:]
    return np.minimum((cdf < u).sum(axis=-1), log_probs.shape[-1] - 1).astype(np.int64)


# ---------------------------------------------------------------------------
# rollout-time policies


class MlpPolicy:
    """Stateless softmax policy over an MLP actor."""

    def __init__(self, params: ParamSet, greedy: bool = False):
        self.params = params
        self.greedy = greedy

    def begin(self, n: int) -> None:
        pass

    def reset_slots(self, idx: np.ndarray) -> None:
        pass

    def act(self, idx, env_states, obs: np.ndarray, rng: np.random.Generator):
        logp = np_log_softmax(actor_forward(self.params, obs))
        if self.greedy:
            actions = logp.argmax(axis=-1)
        else:
            actions = sample_categorical(logp, rng)
        return actions, logp[np.arange(len(actions)), actions]


class RecurrentPolicy:
    """History-conditioned policy; hidden state resets at episode start."""

    def __init__(self, params: ParamSet, greedy: bool = False):
        self.params = params
        self.greedy = greedy
        self._hidden = np.zeros((0, params.meta["hidden"]))
        self._last = np.zeros((0, params.meta["actions"]))
        self._pending: np.ndarray | None = None

    def begin(self, n: int) -> None:
        self._hidden = np.zeros((n, self.params.meta["hidden"]))
        self._last = np.zeros((n, self.params.meta["actions"]))

    def reset_slots(self, idx: np.ndarray) -> None:
        self._hidden[idx] = 0.0
        self._last[idx] = 0.0

    def step_logits(self, idx: np.ndarray, obs: np.ndarray) -> np.ndarray:
        new_hidden, logits, _ = recurrent_forward(
            self.params, self._hidden[idx], obs, self._last[idx]
        )
        self._pending = new_hidden
        return logits

    def commit(self, idx: np.ndarray, actions: np.ndarray) -> None:
        self._hidden[idx] = self._pending
        self._last[idx] = 0.0
        self._last[idx, actions] = 1.0
        self._pending = None

    def act(self, idx, env_states, obs: np.ndarray, rng: np.random.Generator):
        logits = self.step_logits(idx, obs)
        logp = np_log_softmax(logits)
        if self.greedy:
            actions = logp.argmax(axis=-1)
        else:
            actions = sample_categorical(logp, rng)
        self.commit(idx, actions)
        return actions, logp[np.arange(len(actions)), actions]


class UniformPolicy:
    """Uniform-random policy (the 'frozen random ego' of several tests)."""

    def __init__(self, n_actions: int):
        self.n_actions = n_actions

    def begin(self, n: int) -> None:
        pass

    def reset_slots(self, idx) -> None:
        pass

    def act(self, idx, env_states, obs, rng):
        k = len(obs)
        actions = rng.integers(0, self.n_actions, size=k)
        return actions, np.full(k, -np.log(self.n_actions))


class FixedActionPolicy:
    """Always plays one action (e.g. noop)."""

    def __init__(self, action: int):
        self.action = int(action)

    def begin(self, n: int) -> None:
        pass

    def reset_slots(self, idx) -> None:
        pass

    def act(self, idx, env_states, obs, rng):
        k = len(obs)
        return np.full(k, self.action, dtype=np.int64), np.zeros(k)


class MixturePolicy:
    """Per-timestep uniform mixture of two policies (mixed-play starts).

    Each step, every env slot flips a fair coin to decide which component
    acts; a recurrent component's history still records the executed action.
    """

    def __init__(self, policy_a, policy_b):
        self.policy_a = policy_a
        self.policy_b = policy_b

    def begin(self, n: int) -> None:
        self.policy_a.begin(n)
        self.policy_b.begin(n)

    def reset_slots(self, idx) -> None:
        self.policy_a.reset_slots(idx)
        self.policy_b.reset_slots(idx)

    def act(self, idx, env_states, obs, rng):
        coin = rng.random(len(obs)) < 0.5
        a_act, a_logp = self._component_act(self.policy_a, idx, env_states, obs, rng)
        b_act, b_logp = self._component_act(self.policy_b, idx, env_states, obs, rng)
        actions = np.where(coin, a_act, b_act)
        logp = np.where(coin, a_logp, b_logp)
        self._commit_if_recurrent(self.policy_a, idx, actions)
        self._commit_if_recurrent(self.policy_b, idx, actions)
        return actions, logp

    @staticmethod
    def _component_act(policy, idx, env_states, obs, rng):
        if isinstance(policy, RecurrentPolicy):
            logits = policy.step_logits(idx, obs)
            logp = np_log_softmax(logits)
            actions = logp.argmax(axis=-1) if policy.greedy else sample_categorical(logp, rng)
            return actions, logp[np.arange(len(actions)), actions]
        return policy.act(idx, env_states, obs, rng)

    @staticmethod
    def _commit_if_recurrent(policy, idx, actions):
        if isinstance(policy, RecurrentPolicy):
            policy.commit(idx, actions)
