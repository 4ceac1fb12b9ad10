"""Vector norms, dual norms, and the steepest-descent direction operator.

The operator P maps a gradient z to argmax_x (<z, x> - ||x||^2 / 2).  Its
closed form per norm turns one descent template into gradient descent
(Euclidean), sign descent (max norm), greedy coordinate descent (one norm),
per-coordinate scaling (weighted norm), and block-normalized descent
(block-max norm).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "BlockPartition",
    "Euclidean",
    "Max",
    "One",
    "WeightedDiag",
    "BlockMax",
    "NormKind",
    "sign_unit",
    "norm",
    "dual_norm",
    "steepest_op",
    "gradient_density",
    "kind_to_json",
    "kind_from_json",
]


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint, covering, non-empty index blocks over {0, ..., d-1}."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise ValueError("partition blocks must be non-empty")
        flat = sorted(i for b in blocks for i in b)
        if flat != list(range(len(flat))):
            raise ValueError("partition blocks must disjointly cover 0..d-1")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return sum(len(b) for b in self.blocks)


@dataclass(frozen=True)
class Euclidean:
    pass


@dataclass(frozen=True)
class Max:
    pass


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class WeightedDiag:
    """sqrt(sum_i w_i x_i^2) with strictly positive weights."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w or any(not np.isfinite(x) or x <= 0.0 for x in w):
            raise ValueError("weights must be finite and strictly positive")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class BlockMax:
    partition: BlockPartition


NormKind = Union[Euclidean, Max, One, WeightedDiag, BlockMax]


def sign_unit(z: np.ndarray) -> np.ndarray:
    """Elementwise sign with sign(0) = +1, fixed for determinism."""
    return np.where(np.asarray(z, dtype=float) >= 0.0, 1.0, -1.0)


def _check_dim(kind: NormKind, d: int) -> None:
    if isinstance(kind, WeightedDiag) and len(kind.weights) != d:
        raise ValueError(f"weight vector has length {len(kind.weights)}, expected {d}")
    if isinstance(kind, BlockMax) and kind.partition.dim != d:
        raise ValueError(f"partition covers {kind.partition.dim} indices, expected {d}")


def norm(x, kind: NormKind) -> float:
    x = np.asarray(x, dtype=float)
    _check_dim(kind, x.size)
    if isinstance(kind, Euclidean):
        return float(np.sqrt(np.dot(x, x)))
    if isinstance(kind, Max):
        return float(np.abs(x).max())
    if isinstance(kind, One):
        return float(np.abs(x).sum())
    if isinstance(kind, WeightedDiag):
        w = np.asarray(kind.weights)
        return float(np.sqrt(np.dot(w * x, x)))
    if isinstance(kind, BlockMax):
        return max(
            float(np.sqrt(np.dot(x[list(b)], x[list(b)])))
            for b in kind.partition.blocks
        )
    raise TypeError(f"unknown norm kind: {kind!r}")


def dual_norm(x, kind: NormKind) -> float:
    x = np.asarray(x, dtype=float)
    _check_dim(kind, x.size)
    if isinstance(kind, Euclidean):
        return float(np.sqrt(np.dot(x, x)))
    if isinstance(kind, Max):
        return float(np.abs(x).sum())
    if isinstance(kind, One):
        return float(np.abs(x).max())
    if isinstance(kind, WeightedDiag):
        w = np.asarray(kind.weights)
        return float(np.sqrt(np.dot(x / w, x)))
    if isinstance(kind, BlockMax):
        return sum(
            float(np.sqrt(np.dot(x[list(b)], x[list(b)])))
            for b in kind.partition.blocks
        )
    raise TypeError(f"unknown norm kind: {kind!r}")


def steepest_op(z, kind: NormKind) -> np.ndarray:
    """P(z): the update direction of steepest descent in the given geometry.

    Closed forms: identity (Euclidean); ||z||_1 * sign(z) (max norm, with
    sign(0) = +1); the largest-magnitude coordinate kept with its sign and
    all others zeroed, smallest index winning ties (one norm); z_i / w_i
    (weighted); and the blockwise-normalized vector scaled by the dual norm,
    zero blocks mapping to zero (block max).  The zero vector maps to the
    zero vector in every geometry.
    """
    z = np.asarray(z, dtype=float)
    _check_dim(kind, z.size)
    if isinstance(kind, Euclidean):
        return z.copy()
    if isinstance(kind, Max):
        return float(np.abs(z).sum()) * sign_unit(z)
    if isinstance(kind, One):
        i = int(np.argmax(np.abs(z)))
        out = np.zeros_like(z)
        out[i] = z[i]
        return out
    if isinstance(kind, WeightedDiag):
        return z / np.asarray(kind.weights)
    if isinstance(kind, BlockMax):
        out = np.zeros_like(z)
        total = dual_norm(z, kind)
        for b in kind.partition.blocks:
            idx = list(b)
            nb = float(np.sqrt(np.dot(z[idx], z[idx])))
            if nb > 0.0:
                out[idx] = z[idx] * (total / nb)
        return out
    raise TypeError(f"unknown norm kind: {kind!r}")


def gradient_density(z) -> float:
    """||z||_1^2 / (d ||z||_2^2), clamped into its analytic range [1/d, 1].

    The vector is prescaled by its largest magnitude so that extreme scales
    can neither overflow nor underflow the intermediate squares.
    """
    z = np.asarray(z, dtype=float)
    m = float(np.abs(z).max(initial=0.0))
    if m == 0.0:
        raise ValueError("gradient density undefined for the zero vector")
    u = z / m
    r = float(np.abs(u).sum()) / float(np.sqrt(np.dot(u, u)))
    d = z.size
    return min(max(r * r / d, 1.0 / d), 1.0)


def kind_to_json(kind: NormKind):
    if isinstance(kind, Euclidean):
        return "euclidean"
    if isinstance(kind, Max):
        return "max"
    if isinstance(kind, One):
        return "one"
    if isinstance(kind, WeightedDiag):
        return {"weighted": list(kind.weights)}
    if isinstance(kind, BlockMax):
        return {"blockmax": [list(b) for b in kind.partition.blocks]}
    raise TypeError(f"unknown norm kind: {kind!r}")


def kind_from_json(obj) -> NormKind:
    if obj == "euclidean":
        return Euclidean()
    if obj == "max":
        return Max()
    if obj == "one":
        return One()
    if isinstance(obj, dict) and set(obj) == {"weighted"}:
        return WeightedDiag(tuple(obj["weighted"]))
    if isinstance(obj, dict) and set(obj) == {"blockmax"}:
        return BlockMax(BlockPartition(tuple(tuple(b) for b in obj["blockmax"])))
    raise ValueError(f"unrecognized norm kind: {obj!r}")
