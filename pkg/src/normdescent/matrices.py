"""Dense symmetric linear algebra for desk-scale matrices (d up to ~25).

Deliberately self-contained: a cyclic Jacobi eigensolver, skew-symmetric
generators and their exponentials (smooth one-parameter orthogonal paths),
and spectrum-preserving conjugation for building test Hessians.  numpy is
used for array storage and elementwise arithmetic only; no LAPACK-backed
decompositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SymMatrix",
    "EigenDecomposition",
    "SkewMatrix",
    "OrthogonalMatrix",
    "MatrixFormatError",
    "EigensolverError",
    "eigh",
    "is_psd",
    "random_skew",
    "exp_skew",
    "rotated_hessian",
    "parse_matrix_text",
    "format_matrix_text",
]

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-14
ORTHOGONALITY_TOL = 1e-10
EXPM_SCALE_LIMIT = 0.5
TEXT_SYMMETRY_TOL = 1e-12


class MatrixFormatError(ValueError):
    """Matrix text input is malformed, non-finite, or asymmetric."""


class EigensolverError(RuntimeError):
    """The Jacobi iteration did not reach its residual target."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class SymMatrix:
    """Real symmetric d x d matrix.

    Only the upper triangle is stored; reads mirror it, so entry (i, j) and
    entry (j, i) are the same float by construction rather than by
    convention.  Instances are immutable.
    """

    __slots__ = ("dim", "_upper", "_full")

    def __init__(self, dim: int, upper: np.ndarray):
        """Build from the packed upper triangle (row-major, length d(d+1)/2).

        Prefer :meth:`from_array` or :meth:`diagonal` in user code.
        """
        upper = np.asarray(upper, dtype=float)
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        if upper.shape != (dim * (dim + 1) // 2,):
            raise ValueError("packed upper triangle has wrong length")
        if not np.isfinite(upper).all():
            raise ValueError("matrix entries must be finite")
        self.dim = dim
        self._upper = _readonly(upper.copy())
        self._full: np.ndarray | None = None

    @classmethod
    def from_array(cls, a) -> "SymMatrix":
        """Build from a square array, averaging A with its transpose.

        Averaging removes rounding-scale asymmetry from upstream matrix
        products; callers that must reject asymmetric input validate before
        calling (see :func:`parse_matrix_text`).
        """
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        sym = 0.5 * (a + a.T)
        iu = np.triu_indices(a.shape[0])
        return cls(a.shape[0], sym[iu])

    @classmethod
    def diagonal(cls, values) -> "SymMatrix":
        return cls.from_array(np.diag(np.asarray(values, dtype=float)))

    def to_array(self) -> np.ndarray:
        """Full dense matrix, mirrored from the stored triangle (read-only)."""
        if self._full is None:
            d = self.dim
            full = np.zeros((d, d))
            iu = np.triu_indices(d)
            full[iu] = self._upper
            full.T[iu] = self._upper
            self._full = _readonly(full)
        return self._full

    def entry(self, i: int, j: int) -> float:
        return float(self.to_array()[i, j])

    def trace(self) -> float:
        return float(np.trace(self.to_array()))

    def __repr__(self) -> str:
        return f"SymMatrix(dim={self.dim})"


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SkewMatrix:
    """Real d x d matrix with entries(i, j) == -entries(j, i), zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite")
        if not np.array_equal(a.T, -a):
            raise ValueError("matrix is not skew-symmetric")
        object.__setattr__(self, "entries", _readonly(a.copy()))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class OrthogonalMatrix:
    """Real square matrix with max |Q'Q - I| at most 1e-10."""

    entries: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.entries, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {q.shape}")
        resid = np.abs(q.T @ q - np.eye(q.shape[0])).max()
        if not resid <= ORTHOGONALITY_TOL:
            raise ValueError(f"matrix is not orthogonal: residual {resid:.3e}")
        object.__setattr__(self, "entries", _readonly(q.copy()))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _offdiag_mass(a: np.ndarray) -> float:
    return math.sqrt(2.0 * float((np.triu(a, 1) ** 2).sum()))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One Jacobi rotation annihilating a[p, q], applied as J'AJ and V <- VJ."""
    apq = a[p, q]
    if apq == 0.0:
        return
    diff = a[q, q] - a[p, p]
    if abs(apq) < 1e-36 * abs(diff):
        t = apq / diff  # limit of the stable root for tiny pivots
    else:
        theta = diff / (2.0 * apq)
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    app, aqq = a[p, p], a[q, q]
    a[p, p] = app - t * apq
    a[q, q] = aqq + t * apq
    a[p, q] = a[q, p] = 0.0

    mask = np.ones(a.shape[0], dtype=bool)
    mask[p] = mask[q] = False
    aip = a[mask, p]
    aiq = a[mask, q]
    new_p = c * aip - s * aiq
    new_q = s * aip + c * aiq
    a[mask, p] = new_p
    a[p, mask] = new_p
    a[mask, q] = new_q
    a[q, mask] = new_q

    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - s * vq
    v[:, q] = s * vp + c * vq


def eigh(H: SymMatrix) -> EigenDecomposition:
    """Eigendecomposition by cyclic Jacobi sweeps.

    Rotations run in row-cyclic order until the off-diagonal Frobenius mass
    drops below 1e-14 times the Frobenius norm of the input, capped at 100
    sweeps.  Eigenvalues are returned ascending, with the eigenvector
    columns permuted to match.
    """
    d = H.dim
    a = H.to_array().copy()
    v = np.eye(d)
    target = JACOBI_REL_TOL * math.sqrt(float((a * a).sum()))
    sweeps = 0
    off = _offdiag_mass(a)
    while off > target:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise EigensolverError(
                f"eigensolver failed: off-diagonal residual {off:.3e} after "
                f"{JACOBI_MAX_SWEEPS} sweeps (target {target:.3e})"
            )
        for p in range(d - 1):
            for q in range(p + 1, d):
                _rotate(a, v, p, q)
        sweeps += 1
        off = _offdiag_mass(a)
    lam = np.diag(a).copy()
    order = np.argsort(lam, kind="stable")
    return EigenDecomposition(_readonly(lam[order]), _readonly(v[:, order].copy()))


def is_psd(H: SymMatrix, tol: float = 0.0) -> bool:
    """True iff the smallest eigenvalue is at least -tol."""
    if tol < 0.0:
        raise ValueError("tolerance must be nonnegative")
    return bool(eigh(H).values[0] >= -tol)


def random_skew(d: int, rng: np.random.Generator) -> SkewMatrix:
    """Gaussian skew generator, rescaled to a largest singular value of pi.

    The strictly-upper entries are i.i.d. standard normal and the lower
    triangle is the negated mirror.  Normalizing the top singular value to
    pi makes a unit-time rotation comparably large across seeds and
    dimensions.
    """
    if d < 2:
        raise ValueError(f"random_skew requires d >= 2, got {d}")
    upper = np.zeros((d, d))
    iu = np.triu_indices(d, 1)
    upper[iu] = rng.standard_normal(iu[0].size)
    s = upper - upper.T
    gram = SymMatrix.from_array(s.T @ s)
    top = math.sqrt(max(float(eigh(gram).values[-1]), 0.0))
    if top == 0.0:
        raise ValueError("degenerate zero draw for skew generator")
    return SkewMatrix(s * (math.pi / top))


def exp_skew(S: SkewMatrix, theta: float) -> OrthogonalMatrix:
    """exp(theta * S) by scaling and squaring with a truncated Taylor series.

    The argument is halved until its Frobenius norm is at most 0.5, the
    series is summed until terms vanish at double precision, and the result
    is squared back up.  exp of an exactly skew matrix is orthogonal, so the
    output satisfies the OrthogonalMatrix residual by construction.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    a = theta * S.entries
    nrm = math.sqrt(float((a * a).sum()))
    squarings = 0 if nrm <= EXPM_SCALE_LIMIT else int(
        math.ceil(math.log2(nrm / EXPM_SCALE_LIMIT))
    )
    b = a / (2.0 ** squarings)
    d = S.dim
    q = np.eye(d)
    term = np.eye(d)
    for j in range(1, 41):
        term = term @ b / j
        q = q + term
        if np.abs(term).max() < 1e-17:
            break
    for _ in range(squarings):
        q = q @ q
    return OrthogonalMatrix(q)


def rotated_hessian(eigs, S: SkewMatrix, theta: float) -> SymMatrix:
    """Q diag(eigs) Q' with Q = exp(theta * S), symmetrized by averaging.

    The averaging only removes rounding-scale skew from the two matrix
    products; the spectrum equals ``eigs`` up to the same rounding.
    """
    lam = np.asarray(eigs, dtype=float)
    if lam.ndim != 1 or lam.size != S.dim:
        raise ValueError("eigenvalue list does not match generator dimension")
    if not np.isfinite(lam).all() or (lam < 0.0).any():
        raise ValueError("eigenvalues must be finite and nonnegative")
    q = exp_skew(S, theta).entries
    return SymMatrix.from_array((q * lam[None, :]) @ q.T)


def parse_matrix_text(text: str) -> SymMatrix:
    """Parse the shared matrix text format.

    Line 1 holds d; the next d lines hold d whitespace-separated decimal
    numbers each.  Asymmetry beyond 1e-12 (absolute) is rejected; smaller
    asymmetry is averaged away.
    """
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    try:
        d = int(lines[0])
    except ValueError:
        raise MatrixFormatError(f"first line must be the dimension, got {lines[0]!r}") from None
    if d < 1:
        raise MatrixFormatError(f"dimension must be positive, got {d}")
    if len(lines) != d + 1:
        raise MatrixFormatError(f"expected {d} matrix rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != d:
            raise MatrixFormatError(f"expected {d} entries per row, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise MatrixFormatError(f"non-numeric entry in row: {ln!r}") from None
    a = np.array(rows)
    if not np.isfinite(a).all():
        raise MatrixFormatError("matrix entries must be finite")
    asym = float(np.abs(a - a.T).max())
    if asym > TEXT_SYMMETRY_TOL:
        raise MatrixFormatError(f"matrix asymmetry {asym:.3e} exceeds {TEXT_SYMMETRY_TOL}")
    return SymMatrix.from_array(a)


def format_matrix_text(H: SymMatrix) -> str:
    a = H.to_array()
    lines = [str(H.dim)]
    lines += [" ".join(f"{x:.17g}" for x in row) for row in a]
    return "\n".join(lines) + "\n"
