"""Tape-based reverse-mode differentiation over float64 numpy arrays.

The primitive set is deliberately small: affine maps, tanh/relu/sigmoid,
exp/log, clip (subgradient 0 outside the interval), elementwise min/max,
log-softmax, row gathers, and scalar reductions. That is exactly what the
actor-critic losses in this package need, and every primitive's gradient
is checked against central finite differences in the test suite.

Helper functions accept either a ``Tensor`` or a plain ndarray and return
the matching kind, so network forward passes are written once and shared
between rollout (numpy-only, no tape) and training (taped).
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "Tensor",
    "NonFiniteLossError",
    "is_tensor",
    "add",
    "sub",
    "mul",
    "neg",
    "matmul",
    "tanh",
    "relu",
    "sigmoid",
    "exp",
    "log",
    "square",
    "clip",
    "minimum",
    "maximum",
    "log_softmax",
    "take_rows",
    "total_sum",
    "mean",
]

ArrayLike = Union["Tensor", np.ndarray, float, int]


class NonFiniteLossError(RuntimeError):
    """Raised when a loss evaluates to NaN/inf; carries the offending op."""

    def __init__(self, op: str, value: float):
        super().__init__(f"non-finite loss from op '{op}' (value={value!r})")
        self.op = op
        self.value = value


class Tensor:
    __slots__ = ("data", "grad", "op", "_parents", "_backward", "requires_grad")

    def __init__(
        self,
        data: np.ndarray,
        parents: tuple = (),
        backward: Optional[Callable[[np.ndarray], None]] = None,
        op: str = "leaf",
        requires_grad: bool = True,
    ):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.op = op
        self._parents = parents
        self._backward = backward
        self.requires_grad = requires_grad

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def backward(self) -> None:
        """Accumulate gradients of this (scalar) tensor into every leaf."""
        if self.data.shape != ():
            raise ValueError("backward() requires a scalar tensor")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if isinstance(p, Tensor) and id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # Operator sugar, used sparingly in loss code.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self):
        return f"Tensor(op={self.op}, shape={self.data.shape})"


def is_tensor(x: ArrayLike) -> bool:
    return isinstance(x, Tensor)


def _data(x: ArrayLike) -> np.ndarray:
    return x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)


def _accum(t: ArrayLike, g: np.ndarray) -> None:
    if isinstance(t, Tensor) and t.requires_grad:
        if t.grad is None:
            t.grad = np.zeros_like(t.data)
        t.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum ``g`` down to ``shape`` after numpy broadcasting."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def _binary(a: ArrayLike, b: ArrayLike, out: np.ndarray, op: str, back) -> ArrayLike:
    if not (isinstance(a, Tensor) or isinstance(b, Tensor)):
        return out

    def backward(g: np.ndarray) -> None:
        ga, gb = back(g)
        if ga is not None:
            _accum(a, _unbroadcast(ga, _data(a).shape))
        if gb is not None:
            _accum(b, _unbroadcast(gb, _data(b).shape))

    return Tensor(out, parents=(a, b), backward=backward, op=op)


def _unary(x: ArrayLike, out: np.ndarray, op: str, back) -> ArrayLike:
    if not isinstance(x, Tensor):
        return out

    def backward(g: np.ndarray) -> None:
        _accum(x, back(g))

    return Tensor(out, parents=(x,), backward=backward, op=op)


def add(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    return _binary(a, b, _data(a) + _data(b), "add", lambda g: (g, g))


def sub(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    return _binary(a, b, _data(a) - _data(b), "sub", lambda g: (g, -g))


def mul(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    da, db = _data(a), _data(b)
    return _binary(a, b, da * db, "mul", lambda g: (g * db, g * da))


def neg(x: ArrayLike) -> ArrayLike:
    return _unary(x, -_data(x), "neg", lambda g: -g)


def matmul(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    da, db = _data(a), _data(b)
    return _binary(a, b, da @ db, "matmul", lambda g: (g @ db.T, da.T @ g))


def tanh(x: ArrayLike) -> ArrayLike:
    out = np.tanh(_data(x))
    return _unary(x, out, "tanh", lambda g: g * (1.0 - out * out))


def relu(x: ArrayLike) -> ArrayLike:
    d = _data(x)
    out = np.maximum(d, 0.0)
    return _unary(x, out, "relu", lambda g: g * (d > 0.0))


def sigmoid(x: ArrayLike) -> ArrayLike:
    out = 1.0 / (1.0 + np.exp(-_data(x)))
    return _unary(x, out, "sigmoid", lambda g: g * out * (1.0 - out))


def exp(x: ArrayLike) -> ArrayLike:
    out = np.exp(_data(x))
    return _unary(x, out, "exp", lambda g: g * out)


def log(x: ArrayLike) -> ArrayLike:
    d = _data(x)
    return _unary(x, np.log(d), "log", lambda g: g / d)


def square(x: ArrayLike) -> ArrayLike:
    d = _data(x)
    return _unary(x, d * d, "square", lambda g: 2.0 * g * d)


def clip(x: ArrayLike, lo: float, hi: float) -> ArrayLike:
    d = _data(x)
    mask = (d >= lo) & (d <= hi)
    return _unary(x, np.clip(d, lo, hi), "clip", lambda g: g * mask)


def minimum(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    da, db = _data(a), _data(b)
    take_a = da <= db
    return _binary(a, b, np.minimum(da, db), "minimum", lambda g: (g * take_a, g * ~take_a))


def maximum(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    da, db = _data(a), _data(b)
    take_a = da >= db
    return _binary(a, b, np.maximum(da, db), "maximum", lambda g: (g * take_a, g * ~take_a))


def log_softmax(x: ArrayLike) -> ArrayLike:
    """Row-wise log-softmax over the last axis, numerically stable."""
    d = _data(x)
    shifted = d - d.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out = shifted - lse
    softmax = np.exp(out)

    def back(g: np.ndarray) -> np.ndarray:
        return g - softmax * g.sum(axis=-1, keepdims=True)

    return _unary(x, out, "log_softmax", back)


def take_rows(x: ArrayLike, idx: np.ndarray) -> ArrayLike:
    """Gather ``x[i, idx[i]]`` for each row i of a 2-D array."""
    d = _data(x)
    rows = np.arange(d.shape[0])
    out = d[rows, idx]

    def back(g: np.ndarray) -> np.ndarray:
        full = np.zeros_like(d)
        np.add.at(full, (rows, idx), g)
        return full

    return _unary(x, out, "take_rows", back)


def total_sum(x: ArrayLike) -> ArrayLike:
    d = _data(x)
    return _unary(x, np.asarray(d.sum()), "sum", lambda g: np.broadcast_to(g, d.shape).copy())


def mean(x: ArrayLike) -> ArrayLike:
    d = _data(x)
    n = d.size
    return _unary(
        x, np.asarray(d.mean()), "mean", lambda g: np.broadcast_to(g / n, d.shape).copy()
    )
