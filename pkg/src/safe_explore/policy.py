"""Gaussian RBF features, linear value/mean heads, and Gaussian sampling.

The actor mean and the critic value share one radial basis; both heads are
linear in their weights, so the score function of the Gaussian policy has
the closed form ``(u - mu) / sigma^2 * phi(x)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FeatureBasis:
    """Gaussian radial basis ``phi_i(x) = exp(-||x - c_i||^2 / (2 s_i^2))``.

    Parameters
    ----------
    centers : (N, n) array_like
        Pairwise-distinct center points.
    widths : (N,) array_like
        Positive length scales, one per center.
    """

    centers: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        widths = np.asarray(self.widths, dtype=float).ravel()
        if centers.shape[0] < 1:
            raise ValueError("need at least one basis center")
        if widths.shape[0] != centers.shape[0]:
            raise ValueError(
                f"{widths.shape[0]} widths for {centers.shape[0]} centers"
            )
        if np.any(widths <= 0.0):
            raise ValueError("all basis widths must be positive")
        if len(np.unique(centers, axis=0)) != centers.shape[0]:
            raise ValueError("basis centers must be pairwise distinct")
        centers.flags.writeable = False
        widths.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "widths", widths)

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def state_dim(self) -> int:
        return self.centers.shape[1]

    def features(self, x) -> np.ndarray:
        """Feature vector phi(x), each component in (0, 1]."""
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.state_dim:
            raise ValueError(
                f"state has dimension {x.shape[0]}, expected {self.state_dim}"
            )
        diff = self.centers - x
        sq = np.einsum("ij,ij->i", diff, diff)
        return np.exp(-sq / (2.0 * self.widths**2))


def grid_basis(
    grid_min: float, grid_max: float, points_per_dim: int, width: float, n_dims: int = 2
) -> FeatureBasis:
    """Uniform grid of RBF centers over ``[grid_min, grid_max]^n_dims``.

    With 11 points per dimension on [-10, 10] this yields the 121-feature
    layout used by the bundled benchmark; the shared width defaults to the
    grid spacing in the benchmark configuration.
    """
    if points_per_dim < 1:
        raise ValueError("points_per_dim must be >= 1")
    axis = np.linspace(grid_min, grid_max, points_per_dim)
    centers = np.array(list(itertools.product(axis, repeat=n_dims)), dtype=float)
    widths = np.full(centers.shape[0], float(width))
    return FeatureBasis(centers=centers, widths=widths)


@dataclass
class PolicyState:
    """Actor weights, critic weights, and their shared feature basis.

    ``w`` has shape (N,) for scalar inputs and (N, m) for m-dimensional
    inputs; ``theta`` always has shape (N,).  Weights are mutated in place
    by the learner within a single training run.
    """

    basis: FeatureBasis
    w: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float).ravel()
        if self.theta.shape[0] != self.basis.size:
            raise ValueError(
                f"theta has length {self.theta.shape[0]}, basis has {self.basis.size}"
            )
        if self.w.shape[0] != self.basis.size:
            raise ValueError(
                f"w has leading dimension {self.w.shape[0]}, basis has {self.basis.size}"
            )
        if self.w.ndim not in (1, 2):
            raise ValueError("w must be a vector or an (N, m) matrix")
        if not (np.isfinite(self.w).all() and np.isfinite(self.theta).all()):
            raise ValueError("weights must be finite")

    @classmethod
    def zeros(cls, basis: FeatureBasis, input_dim: int = 1) -> "PolicyState":
        """Zero-initialized weights: the safest prior (zero mean input)."""
        w = np.zeros(basis.size) if input_dim == 1 else np.zeros((basis.size, input_dim))
        return cls(basis=basis, w=w, theta=np.zeros(basis.size))

    @property
    def input_dim(self) -> int:
        return 1 if self.w.ndim == 1 else self.w.shape[1]

    def value(self, x) -> float:
        """Estimated state value ``phi(x) . theta``."""
        return float(self.basis.features(x) @ self.theta)

    def mean_input(self, x) -> np.ndarray:
        """Policy mean ``phi(x) . w`` as a length-m vector."""
        return np.atleast_1d(self.basis.features(x) @ self.w)

    def sample_input(self, x, sigma: float, rng: np.random.Generator) -> np.ndarray:
        """Draw ``u ~ N(mean_input(x), sigma^2 I)`` from the given stream."""
        if sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        mu = self.mean_input(x)
        return mu + sigma * rng.standard_normal(mu.shape[0])

    def log_density(self, x, u, sigma: float) -> float:
        """Log density of input ``u`` under the Gaussian policy at ``x``."""
        if sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        u = np.asarray(u, dtype=float).ravel()
        resid = u - self.mean_input(x)
        m = resid.shape[0]
        return float(
            -0.5 * resid @ resid / sigma**2
            - m * np.log(sigma)
            - 0.5 * m * np.log(2.0 * np.pi)
        )

    def log_policy_gradient(self, x, u, sigma: float) -> np.ndarray:
        """Gradient of the log policy density with respect to ``w``.

        Equals ``outer(phi(x), (u - mu) / sigma^2)`` reshaped to the layout
        of ``w``; it vanishes when ``u`` equals the policy mean.
        """
        if sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        u = np.asarray(u, dtype=float).ravel()
        phi = self.basis.features(x)
        resid = (u - np.atleast_1d(phi @ self.w)) / sigma**2
        return np.outer(phi, resid).reshape(self.w.shape)
