"""Bias-corrected Adam on flat parameter vectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["AdamState", "adam_update", "clip_grad_norm"]


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-5

    @classmethod
    def zeros(cls, size: int, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-5):
        return cls(
            m=np.zeros(size, dtype=np.float64),
            v=np.zeros(size, dtype=np.float64),
            beta1=beta1,
            beta2=beta2,
            eps=eps,
        )

    def copy(self) -> "AdamState":
        return AdamState(self.m.copy(), self.v.copy(), self.step, self.beta1, self.beta2, self.eps)


def adam_update(
    params: np.ndarray, grads: np.ndarray, state: AdamState, lr: float
) -> tuple[np.ndarray, AdamState]:
    """One Adam step; returns new parameter vector and advanced state."""
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ValueError("params, grads and moment vectors must share one shape")
    step = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = m / (1.0 - state.beta1**step)
    v_hat = v / (1.0 - state.beta2**step)
    new_params = params - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_params, AdamState(m, v, step, state.beta1, state.beta2, state.eps)


def clip_grad_norm(grads: np.ndarray, max_norm: float) -> np.ndarray:
    """Rescale ``grads`` so its L2 norm is at most ``max_norm``."""
    norm = float(np.linalg.norm(grads))
    if max_norm > 0 and norm > max_norm:
        return grads * (max_norm / norm)
    return grads
