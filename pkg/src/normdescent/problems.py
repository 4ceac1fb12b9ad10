"""Differentiable benchmark problems with known optima.

Quadratics with a controlled spectrum and a tunable rotation away from the
coordinate axes, optionally with Gaussian gradient noise, plus a separable
cosh objective whose curvature grows with the gradient norm (the testbed
for the soft-normalized methods).  Both families attain their minimum value
of zero at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import BRUTE_FORCE_CAP, PSD_TOL, SmoothnessReport, analyze
from .matrices import SymMatrix, is_psd, random_skew, rotated_hessian

__all__ = [
    "Oracle",
    "QuadraticProblem",
    "CoshProblem",
    "make_quadratic",
    "quad_eval",
    "noisy_grad",
    "cosh_eval",
    "quad_oracle",
    "quad_noisy_oracle",
    "cosh_oracle",
    "COSH_GUARD",
]

# An oracle maps an iterate to (objective value, gradient).  Deterministic
# oracles are pure functions; stochastic ones own a seeded stream.
Oracle = Callable[[np.ndarray], tuple[float, np.ndarray]]

COSH_GUARD = 700.0


@dataclass(frozen=True)
class QuadraticProblem:
    """f(x) = x' H x / 2 with positive semidefinite H; minimum 0 at x = 0.

    The smoothness report is computed once at construction so that step
    sizes (1/L2, 1/Linf, ...) are available without re-analysis.
    """

    matrix: SymMatrix
    analysis: SmoothnessReport

    @classmethod
    def from_matrix(cls, H: SymMatrix, brute_cap: int = BRUTE_FORCE_CAP) -> "QuadraticProblem":
        if not is_psd(H, PSD_TOL):
            raise ValueError("quadratic problems require a positive semidefinite matrix")
        return cls(H, analyze(H, brute_cap))

    @property
    def dim(self) -> int:
        return self.matrix.dim


def make_quadratic(d: int, lambda_max: float, theta: float, seed) -> QuadraticProblem:
    """Quadratic with spectrum (1, ..., 1, lambda_max) rotated by theta.

    The rotation path is exp(theta * S) for a seeded Gaussian skew generator
    S; theta = 0 gives the axis-aligned diagonal matrix exactly and theta = 1
    a full-strength rotation.
    """
    if d < 2:
        raise ValueError(f"quadratic problems need d >= 2, got {d}")
    if not lambda_max >= 1.0:
        raise ValueError(f"lambda_max must be at least 1, got {lambda_max}")
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    rng = np.random.default_rng(seed)
    skew = random_skew(d, rng)
    eigs = np.concatenate([np.ones(d - 1), [float(lambda_max)]])
    return QuadraticProblem.from_matrix(rotated_hessian(eigs, skew, theta))


def quad_eval(p: QuadraticProblem, x) -> tuple[float, np.ndarray]:
    """(x'Hx/2, Hx)."""
    x = np.asarray(x, dtype=float)
    g = p.matrix.to_array() @ x
    return 0.5 * float(x @ g), g


def noisy_grad(p: QuadraticProblem, x, sigma: float, stream: np.random.Generator) -> np.ndarray:
    """Hx plus isotropic Gaussian noise of scale sigma from the given stream.

    A noise vector is drawn on every call (even for sigma = 0, which returns
    exactly Hx), so the stream position depends only on the call index.
    """
    if sigma < 0.0:
        raise ValueError("noise scale must be nonnegative")
    x = np.asarray(x, dtype=float)
    g = p.matrix.to_array() @ x
    xi = stream.standard_normal(p.dim)
    return g + sigma * xi


@dataclass(frozen=True)
class CoshProblem:
    """f(x) = sum_i (cosh(x_i) - 1) >= 0, minimum 0 at x = 0.

    Its Hessian is diag(cosh(x_i)), whose max-norm induced constant is
    sum_i cosh(x_i) <= d + sum_i |sinh(x_i)|; the objective therefore has
    curvature growing linearly with the dual gradient norm, with offsets
    (d, 1) in the max-norm geometry.
    """

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")


def cosh_eval(p: CoshProblem, x) -> tuple[float, np.ndarray]:
    """(sum cosh(x_i) - d, sinh(x)), guarded against overflow at |x_i| > 700.

    The value is computed as sum of 2 sinh(x_i/2)^2, which equals
    cosh(x_i) - 1 without cancellation near the optimum.
    """
    x = np.asarray(x, dtype=float)
    if x.size != p.dim:
        raise ValueError(f"expected dimension {p.dim}, got {x.size}")
    if np.abs(x).max(initial=0.0) > COSH_GUARD:
        raise ValueError(f"coordinate magnitude exceeds overflow guard {COSH_GUARD:g}")
    half = np.sinh(0.5 * x)
    return 2.0 * float(np.dot(half, half)), np.sinh(x)


def quad_oracle(p: QuadraticProblem) -> Oracle:
    """Deterministic oracle: exact value and gradient."""
    return lambda x: quad_eval(p, x)

def quad_noisy_oracle(p: QuadraticProblem, sigma: float, stream: np.random.Generator) -> Oracle:
    """Stochastic oracle: exact value, noisy gradient from the seeded stream."""

    def oracle(x):
        f, _ = quad_eval(p, x)
        return f, noisy_grad(p, x, sigma, stream)

    return oracle


def cosh_oracle(p: CoshProblem) -> Oracle:
    return lambda x: cosh_eval(p, x)
