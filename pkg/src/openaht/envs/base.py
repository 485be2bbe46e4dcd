"""Environment protocol shared by every simulator in the package.

Environments are pure state-in/state-out: ``step`` never mutates, states
are immutable (frozen dataclasses of scalars/tuples), and a state can be
used directly as a restart point. Any number of independent episodes may
therefore run concurrently.

Protocol (duck-typed):
    descriptor -> EnvDescriptor
    reset(rng) -> state
    step(state, a0, a1, rng) -> (state', reward, done, info)
    obs(state) -> (obs0, obs1)   # float64 feature vectors

``info`` may carry ``shaped_reward``; the raw reward is the task metric.
"""

from __future__ import annotations

__all__ = []
