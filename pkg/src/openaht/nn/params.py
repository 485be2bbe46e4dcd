"""Flat parameter vectors with named slices, plus checkpoint serialization.

A ParamSet owns one contiguous float64 vector; every layer weight/bias is
a reshaped view into it, so optimizers operate on the flat vector while
forward passes see matrices. The slice layout and architecture metadata
travel with the vector, including through checkpoint files.

Checkpoint format (little-endian): magic ``AHTC``, u32 version, u32
descriptor length, descriptor JSON, u64 parameter count, float64 data.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np

from . import autodiff as ad

__all__ = ["ParamSet", "backprop", "save_checkpoint", "load_checkpoint", "orthogonal"]

_MAGIC = b"AHTC"
_VERSION = 1

Layout = Sequence[Tuple[str, Tuple[int, ...]]]


class ParamSet:
    """A named, flat float64 parameter vector for one actor or critic."""

    def __init__(self, layout: Layout, meta: dict, flat: np.ndarray | None = None):
        self.layout: tuple[tuple[str, tuple[int, ...]], ...] = tuple(
            (str(n), tuple(int(d) for d in s)) for n, s in layout
        )
        self.meta = dict(meta)
        sizes = [int(np.prod(s)) if s else 1 for _, s in self.layout]
        self.size = int(sum(sizes))
        if flat is None:
            flat = np.zeros(self.size, dtype=np.float64)
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.size,):
            raise ValueError(f"flat vector has {flat.shape}, layout needs ({self.size},)")
        self.flat = flat
        self._offsets: Dict[str, tuple[int, int, tuple[int, ...]]] = {}
        off = 0
        for (name, shape), n in zip(self.layout, sizes):
            if name in self._offsets:
                raise ValueError(f"duplicate slice name {name!r}")
            self._offsets[name] = (off, off + n, shape)
            off += n

    def view(self, name: str) -> np.ndarray:
        lo, hi, shape = self._offsets[name]
        return self.flat[lo:hi].reshape(shape)

    def views(self) -> Dict[str, np.ndarray]:
        return {name: self.view(name) for name, _ in self.layout}

    def leaves(self) -> Dict[str, ad.Tensor]:
        """Fresh gradient leaves over the current parameter values."""
        return {name: ad.Tensor(self.view(name)) for name, _ in self.layout}

    def grad_vector(self, leaves: Dict[str, ad.Tensor]) -> np.ndarray:
        out = np.zeros(self.size, dtype=np.float64)
        for name, _ in self.layout:
            lo, hi, shape = self._offsets[name]
            g = leaves[name].grad
            if g is not None:
                out[lo:hi] = g.reshape(-1)
        return out

    def copy(self) -> "ParamSet":
        return ParamSet(self.layout, self.meta, self.flat.copy())

    def assign(self, flat: np.ndarray) -> None:
        """In-place overwrite keeping all views valid."""
        self.flat[:] = flat

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ParamSet)
            and self.layout == other.layout
            and np.array_equal(self.flat, other.flat)
        )

    def __repr__(self) -> str:
        return f"ParamSet(kind={self.meta.get('kind')}, size={self.size})"


def backprop(params: ParamSet, loss_fn: Callable[[Dict[str, ad.Tensor]], ad.Tensor]):
    """Exact reverse-mode gradient of ``loss_fn`` w.r.t. ``params``.

    Returns ``(loss_value, gradient_vector)``. Raises NonFiniteLossError
    (naming the final op) if the loss is NaN or infinite.
    """
    leaves = params.leaves()
    loss = loss_fn(leaves)
    value = float(loss.data)
    if not np.isfinite(value):
        raise ad.NonFiniteLossError(loss.op, value)
    loss.backward()
    return value, params.grad_vector(leaves)


def orthogonal(rng: np.random.Generator, shape: Tuple[int, int], gain: float) -> np.ndarray:
    """Orthogonal matrix init (SVD of a Gaussian draw), scaled by ``gain``."""
    a = rng.standard_normal(shape)
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    q = u if u.shape == shape else vt
    return gain * q


def save_checkpoint(params: ParamSet, path: Union[str, Path]) -> None:
    desc = json.dumps(
        {"layout": [[n, list(s)] for n, s in params.layout], "meta": params.meta},
        sort_keys=True,
    ).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<I", _VERSION))
        f.write(struct.pack("<I", len(desc)))
        f.write(desc)
        f.write(struct.pack("<Q", params.size))
        f.write(params.flat.astype("<f8").tobytes())


def load_checkpoint(path: Union[str, Path]) -> ParamSet:
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a parameter checkpoint (bad magic)")
        (version,) = struct.unpack("<I", f.read(4))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        (dlen,) = struct.unpack("<I", f.read(4))
        desc = json.loads(f.read(dlen).decode("utf-8"))
        (n,) = struct.unpack("<Q", f.read(8))
        flat = np.frombuffer(f.read(8 * n), dtype="<f8").astype(np.float64)
    layout = [(name, tuple(shape)) for name, shape in desc["layout"]]
    return ParamSet(layout, desc["meta"], flat)
