"""Hessian geometry for sign-based methods.

Computes the exact max-norm smoothness constant of a quadratic by sign
enumeration, the diagonal-concentration ratio, eigenvalue-based upper and
lower bounds on that constant, per-coordinate (separable) surrogates, block
variants, and the local improvement ratio between sign descent and gradient
descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .matrices import SymMatrix, eigh
from .norms import (
    BlockMax,
    BlockPartition,
    Euclidean,
    Max,
    NormKind,
    One,
    WeightedDiag,
    gradient_density,
)

__all__ = [
    "BRUTE_FORCE_CAP",
    "PSD_TOL",
    "SmoothnessReport",
    "BlockReport",
    "linf_bruteforce",
    "rho_diag",
    "linf_bounds",
    "lsep_rowsum",
    "lsep_exact_2x2",
    "block_analysis",
    "improvement_ratio",
    "smoothness_constant",
    "analyze",
]

BRUTE_FORCE_CAP = 24
PSD_TOL = 1e-10
_TABLE_BITS = 16  # low-coordinate sign table is vectorized up to 2^16 columns


@dataclass(frozen=True)
class SmoothnessReport:
    """Smoothness constants and bounds of a quadratic with matrix H.

    ``L2`` is the largest-magnitude eigenvalue and ``Linf_exact`` the exact
    max-norm constant (present only when d is within the brute-force cap).
    ``bound_psd`` is the concentration bound (positive semidefinite input
    only), ``bound_sym`` the eigenvector-weighted bound, ``lower_bound`` the
    eigenvector alignment lower bound, and ``lsep_rowsum`` the row-sum
    separable surrogate.  ``lsep_exact_2x2`` is the closed form available
    for positive definite 2x2 matrices.
    """

    L2: float
    rho_diag: float
    bound_sym: float
    lower_bound: float
    lsep_rowsum: float
    Linf_exact: float | None = None
    bound_psd: float | None = None
    lsep_exact_2x2: float | None = None
    ratio_dL2_over_Linf: float | None = None

    _FIELD_ORDER = (
        "L2",
        "Linf_exact",
        "rho_diag",
        "bound_psd",
        "bound_sym",
        "lower_bound",
        "lsep_rowsum",
        "lsep_exact_2x2",
        "ratio_dL2_over_Linf",
    )

    def to_json_dict(self) -> dict[str, float]:
        """Flat dict in fixed field order; absent optionals omitted."""
        out = {}
        for name in self._FIELD_ORDER:
            value = getattr(self, name)
            if value is not None:
                out[name] = float(value)
        return out


@dataclass(frozen=True)
class BlockReport:
    """Block-structure analysis: concentration ratio, upper bound on the
    block matrix norm, a sampled lower estimate, and per-block top
    eigenvalues."""

    rho_block: float
    bound: float
    sampled_lower: float
    block_lambda_max: tuple[float, ...]


def linf_bruteforce(H: SymMatrix) -> float:
    """Exact max over sign vectors s of ||H s||_1.

    The induced norm's maximum over the unit max-norm ball is attained at
    sign vectors, so enumerating them is exact.  High coordinates are walked
    in Gray-code order (one column update of H s per step); the low
    coordinates are evaluated through a vectorized sign table.
    """
    d = H.dim
    if d > BRUTE_FORCE_CAP:
        raise ValueError(
            f"dimension too large for exact norm: d={d} exceeds cap {BRUTE_FORCE_CAP}"
        )
    a = H.to_array()
    k = min(d, _TABLE_BITS)
    cols = np.arange(1 << k)
    signs = 1.0 - 2.0 * ((cols[None, :] >> np.arange(k)[:, None]) & 1)
    table = a[:, :k] @ signs  # d x 2^k
    if k == d:
        return float(np.abs(table).sum(axis=0).max())
    hi = np.ones(d - k)
    z = a[:, k:] @ hi
    buf = np.empty_like(table)
    best = -math.inf
    for t in range(1 << (d - k)):
        if t:
            j = (t & -t).bit_length() - 1  # Gray code: flip the lowest set bit
            hi[j] = -hi[j]
            z += (2.0 * hi[j]) * a[:, k + j]
        np.add(table, z[:, None], out=buf)
        np.abs(buf, out=buf)
        best = max(best, float(buf.sum(axis=0).max()))
    return best


def rho_diag(H: SymMatrix) -> float:
    """Diagonal concentration: sum_i |H_ii| / sum_ij |H_ij|, in [1/d, 1]."""
    a = np.abs(H.to_array())
    total = float(a.sum())
    if total == 0.0:
        raise ValueError("diagonal concentration undefined for the zero matrix")
    return float(np.trace(a)) / total


def _linf_bounds_from(H: SymMatrix, values: np.ndarray, vectors: np.ndarray):
    abs_lam = np.abs(values)
    l1 = np.abs(vectors).sum(axis=0)
    linf = np.abs(vectors).max(axis=0)
    bound_sym = float((abs_lam * l1 * l1).sum())
    lower = float((abs_lam * l1 / linf).max())
    bound_psd = None
    if values[0] >= -PSD_TOL:
        if float(np.abs(H.to_array()).sum()) == 0.0:
            bound_psd = 0.0
        else:
            bound_psd = float(values.sum()) / rho_diag(H)
    return bound_psd, bound_sym, lower


def linf_bounds(H: SymMatrix) -> tuple[float | None, float, float]:
    """(concentration bound or None, eigenvector bound, alignment lower bound).

    The concentration bound ``rho_diag(H)**-1 * sum(lambda)`` is reported
    only for positive semidefinite input (tolerance 1e-10); the eigenvector
    bound ``sum |lambda_i| ||v_i||_1^2`` and the lower bound
    ``max_i |lambda_i| ||v_i||_1 / ||v_i||_inf`` apply to any symmetric
    matrix.
    """
    dec = eigh(H)
    return _linf_bounds_from(H, dec.values, dec.vectors)


def lsep_rowsum(H: SymMatrix) -> tuple[np.ndarray, float]:
    """Row-sum separable surrogate: l_i = sum_j |H_ij|, and its total.

    diag(l) - H is diagonally dominant with nonnegative diagonal, hence
    positive semidefinite, so l is always a feasible per-coordinate bound.
    """
    l = np.abs(H.to_array()).sum(axis=1)
    l.flags.writeable = False
    return l, float(l.sum())


def lsep_exact_2x2(H: SymMatrix) -> float:
    """Closed form a + d + 2|b| for positive definite [[a, b], [b, d]]."""
    if H.dim != 2:
        raise ValueError(f"closed form requires d = 2, got d = {H.dim}")
    if eigh(H).values[0] <= 0.0:
        raise ValueError("closed form requires positive definite input")
    a = H.to_array()
    return float(a[0, 0] + a[1, 1] + 2.0 * abs(a[0, 1]))


def _spectral_norm(m: np.ndarray) -> float:
    """Largest singular value via the eigendecomposition of M'M."""
    gram = SymMatrix.from_array(m.T @ m)
    return math.sqrt(max(float(eigh(gram).values[-1]), 0.0))


def _block_bound(a: np.ndarray, partition: BlockPartition) -> tuple[float, float, tuple[float, ...]]:
    """(rho_block, upper bound, per-block top eigenvalues) for PSD input."""
    idx = [list(b) for b in partition.blocks]
    lam_max = []
    diag_norms = []
    for b in idx:
        sub = eigh(SymMatrix.from_array(a[np.ix_(b, b)]))
        lam_max.append(float(sub.values[-1]))
        diag_norms.append(float(max(abs(sub.values[0]), abs(sub.values[-1]))))
    off = 0.0
    for i, j in combinations(range(len(idx)), 2):
        off += 2.0 * _spectral_norm(a[np.ix_(idx[i], idx[j])])
    rho_block = sum(diag_norms) / (sum(diag_norms) + off)
    bound = sum(lam_max) / rho_block
    return rho_block, bound, tuple(lam_max)


def block_analysis(
    H: SymMatrix,
    partition: BlockPartition,
    samples: int,
    rng: np.random.Generator,
) -> BlockReport:
    """Concentration of H on its block diagonal, plus bound and estimate.

    ``rho_block`` is the fraction of total block spectral-norm mass sitting
    on the diagonal blocks; the bound is ``rho_block**-1`` times the sum of
    per-block top eigenvalues.  The sampled lower estimate maximizes the
    block-sum norm of H x over random x whose blocks are each normalized to
    the unit sphere (the extreme points of the unit block-max ball).
    """
    if partition.dim != H.dim:
        raise ValueError("partition does not match matrix dimension")
    if samples < 1:
        raise ValueError("samples must be positive")
    dec = eigh(H)
    if dec.values[0] < -PSD_TOL:
        raise ValueError("block analysis requires a positive semidefinite matrix")
    a = H.to_array()
    rho_block, bound, lam_max = _block_bound(a, partition)

    x = rng.standard_normal((samples, H.dim))
    for b in partition.blocks:
        idx = list(b)
        nrm = np.sqrt((x[:, idx] ** 2).sum(axis=1, keepdims=True))
        nrm[nrm == 0.0] = 1.0  # measure-zero guard; such rows stay feasible
        x[:, idx] /= nrm
    y = x @ a
    vals = np.zeros(samples)
    for b in partition.blocks:
        idx = list(b)
        vals += np.sqrt((y[:, idx] ** 2).sum(axis=1))
    return BlockReport(rho_block, bound, float(vals.max()), lam_max)


def improvement_ratio(L2: float, Linf: float, grad) -> float:
    """Guaranteed-progress ratio of sign descent over gradient descent.

    Equals gradient_density(grad) * d * L2 / Linf, which is the ratio of the
    per-step improvement guarantees (||g||_1^2 / Linf) / (||g||_2^2 / L2).
    """
    if not (L2 > 0.0 and Linf > 0.0):
        raise ValueError("smoothness constants must be positive")
    grad = np.asarray(grad, dtype=float)
    return gradient_density(grad) * grad.size * L2 / Linf


def smoothness_constant(H: SymMatrix, kind: NormKind) -> float:
    """Gradient-map Lipschitz constant of f(x) = x'Hx/2 in the given geometry.

    Exact for the Euclidean (largest |eigenvalue|), max (sign enumeration,
    d within the brute-force cap), one (largest |entry|), and weighted
    (rescaled spectral norm) geometries.  For block-max geometry the exact
    constant has no finite enumeration; the block-concentration upper bound
    is returned, which is still a valid Lipschitz constant.
    """
    a = H.to_array()
    if isinstance(kind, Euclidean):
        dec = eigh(H)
        return float(max(abs(dec.values[0]), abs(dec.values[-1])))
    if isinstance(kind, Max):
        return linf_bruteforce(H)
    if isinstance(kind, One):
        return float(np.abs(a).max())
    if isinstance(kind, WeightedDiag):
        if len(kind.weights) != H.dim:
            raise ValueError("weight vector does not match matrix dimension")
        root = np.sqrt(np.asarray(kind.weights))
        scaled = SymMatrix.from_array(a / root[:, None] / root[None, :])
        dec = eigh(scaled)
        return float(max(abs(dec.values[0]), abs(dec.values[-1])))
    if isinstance(kind, BlockMax):
        if kind.partition.dim != H.dim:
            raise ValueError("partition does not match matrix dimension")
        dec = eigh(H)
        if dec.values[0] < -PSD_TOL:
            raise ValueError("block-max constant requires a positive semidefinite matrix")
        _, bound, _ = _block_bound(a, kind.partition)
        return bound
    raise TypeError(f"unknown norm kind: {kind!r}")


def analyze(H: SymMatrix, brute_cap: int = BRUTE_FORCE_CAP) -> SmoothnessReport:
    """Full smoothness report for a symmetric matrix.

    ``Linf_exact`` and the derived ratio are included only when the
    dimension is within the brute-force cap.  The zero matrix is rejected
    (its concentration ratio is undefined).
    """
    dec = eigh(H)
    values = dec.values
    L2 = float(max(abs(values[0]), abs(values[-1])))
    rho = rho_diag(H)
    bound_psd, bound_sym, lower = _linf_bounds_from(H, values, dec.vectors)
    _, total = lsep_rowsum(H)

    linf_exact = None
    ratio = None
    if H.dim <= brute_cap:
        linf_exact = linf_bruteforce(H)
        if linf_exact > 0.0:
            ratio = H.dim * L2 / linf_exact

    lsep_2x2 = None
    if H.dim == 2 and values[0] > 0.0:
        lsep_2x2 = lsep_exact_2x2(H)

    return SmoothnessReport(
        L2=L2,
        rho_diag=rho,
        bound_sym=bound_sym,
        lower_bound=lower,
        lsep_rowsum=total,
        Linf_exact=linf_exact,
        bound_psd=bound_psd,
        lsep_exact_2x2=lsep_2x2,
        ratio_dL2_over_Linf=ratio,
    )
