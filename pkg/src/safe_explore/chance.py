"""Probability calculus for one-step-ahead constraint satisfaction.

Contains the standard normal CDF and quantile, the per-constraint
probability level derived from a joint target, the largest exploration
standard deviation that keeps every constraint satisfied with that level
at the next step, and the sufficiency check for a general input covariance.

The quantile uses Acklam's rational approximation polished by one Halley
step on the erfc-based CDF, which brings it to near machine precision;
the CDF itself delegates to the C library's complementary error function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSet
from .nominal import NominalModel

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Acklam's coefficients for the rational initial guess of the normal quantile.
_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01,
    2.445134137142996e00, 3.754408661907416e00,
)
_ACKLAM_SPLIT = 0.02425


class InfeasibleExplorationError(RuntimeError):
    """Raised when a worst-corner predicted margin is nonpositive.

    No positive exploration variance can certify the next-step constraint
    level in this situation; the caller must not use an exploratory input.
    """


def std_normal_cdf(z: float) -> float:
    """CDF of the zero-mean unit-variance normal distribution."""
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    return 0.5 * math.erfc(-z / _SQRT2)


def _std_normal_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on (0, 1)."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie strictly in (0, 1), got {p}")

    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    if p < _ACKLAM_SPLIT:
        q = math.sqrt(-2.0 * math.log(p))
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    elif p <= 1.0 - _ACKLAM_SPLIT:
        q = p - 0.5
        r = q * q
        z = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
        ) / ((((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )

    # One Halley step against the high-accuracy CDF; skip in the far tails
    # where the density underflows and the rational guess is already as
    # good as double precision allows.
    pdf = _std_normal_pdf(z)
    if pdf > 0.0:
        err = std_normal_cdf(z) - p
        u = err / pdf
        z -= u / (1.0 + 0.5 * z * u)
    return z


def bonferroni_level(level: float, n_c: int) -> float:
    """Per-constraint level whose joint satisfaction implies the joint level.

    Splitting the allowed failure mass evenly over ``n_c`` constraints,
    each individual constraint held at ``1 - (1 - level)/n_c`` implies the
    simultaneous constraint at ``level``.
    """
    if not (0.5 < level < 1.0):
        raise ValueError(f"level must lie in (0.5, 1), got {level}")
    if n_c < 1:
        raise ValueError(f"n_c must be >= 1, got {n_c}")
    return 1.0 - (1.0 - level) / n_c


@dataclass(frozen=True)
class ChanceSpec:
    """Joint satisfaction target and its per-constraint refinement.

    Parameters
    ----------
    eta : float
        Required probability, in (0.5, 1), that the full state constraint
        holds at every step.
    tau : int
        Worst-case number of steps the backup input sequence needs to
        return an excursion into the admissible set.
    n_c : int
        Number of individual linear constraints.
    """

    eta: float
    tau: int
    n_c: int

    def __post_init__(self):
        if not (0.5 < self.eta < 1.0):
            raise ValueError(f"eta must lie in (0.5, 1), got {self.eta}")
        if int(self.tau) != self.tau or self.tau < 1:
            raise ValueError(f"tau must be a positive integer, got {self.tau}")
        if int(self.n_c) != self.n_c or self.n_c < 1:
            raise ValueError(f"n_c must be a positive integer, got {self.n_c}")
        object.__setattr__(self, "tau", int(self.tau))
        object.__setattr__(self, "n_c", int(self.n_c))

    def eta_prime(self) -> float:
        """Per-constraint single-step level ``1 - (1 - eta^(1/tau))/n_c``.

        Holding each constraint at this level every step, and recovering
        within ``tau`` steps after any excursion, yields the joint level
        ``eta`` at all times.
        """
        return 1.0 - (1.0 - self.eta ** (1.0 / self.tau)) / self.n_c


def sigma_lower(
    model: NominalModel,
    constraints: ConstraintSet,
    spec: ChanceSpec,
    x,
    u_mean,
    *,
    z_quantile: float | None = None,
) -> tuple[float, tuple[int, int]]:
    """Largest isotropic exploration std dev certifying the next step.

    For input ``u ~ N(u_mean, sigma^2 I)`` the next state satisfies each
    constraint ``j`` with probability at least ``spec.eta_prime()`` whenever
    ``sigma`` does not exceed, for every error corner ``eps``,

        (d_j - h_j^T (A x + B u_mean + eps)) / (||h_j^T B||_2 * z)

    with ``z`` the normal quantile at the per-constraint level.  This
    routine returns the minimum of that table together with the minimizing
    ``(j, corner)`` pair, both 0-based, ties broken lexicographically.

    Raises
    ------
    InfeasibleExplorationError
        If any worst-corner margin is nonpositive, i.e. the caller's guard
        (strict interior prediction for every corner) does not hold.
    """
    x = np.asarray(x, dtype=float).ravel()
    u_mean = np.asarray(u_mean, dtype=float).ravel()
    if z_quantile is None:
        z_quantile = std_normal_quantile(spec.eta_prime())

    coupling_norms = np.linalg.norm(constraints.H @ model.B, axis=1)
    if np.any(coupling_norms == 0.0):
        raise ValueError(
            "a constraint normal is orthogonal to the input gain; "
            "no finite exploration variance bound exists for that row"
        )

    margins = margin_table(model, constraints, x, u_mean)
    if np.min(margins) <= 0.0:
        j, c = np.unravel_index(int(np.argmin(margins)), margins.shape)
        raise InfeasibleExplorationError(
            f"worst-corner margin {margins[j, c]:.6g} <= 0 at constraint {j}, "
            f"corner {c}; exploratory input is not admissible here"
        )

    table = margins / (coupling_norms[:, None] * z_quantile)
    flat = int(np.argmin(table))  # row-major argmin = lexicographic tie-break
    j, c = np.unravel_index(flat, table.shape)
    return float(table[j, c]), (int(j), int(c))


def margin_table(
    model: NominalModel, constraints: ConstraintSet, x, u_mean
) -> np.ndarray:
    """Worst-case predicted margins ``d_j - h_j^T (A x + B u_mean + eps)``.

    Returns an (n_c, 2^n) array over all constraints and error corners, in
    corner-set order.
    """
    x_bar = model.predict_nominal(x, u_mean)
    corner_shift = constraints.H @ model.corner_set().T  # (n_c, 2^n)
    return (constraints.d - constraints.H @ x_bar)[:, None] - corner_shift


#: Relative slack allowed when testing the covariance sufficiency inequality,
#: so that the boundary case (variance exactly at its certified maximum)
#: passes despite round-off.  Inflations beyond ~1e-9 are still rejected.
_SUFFICIENCY_RTOL = 1e-9


def check_sigma_sufficient(
    model: NominalModel,
    constraints: ConstraintSet,
    x,
    u_mean,
    Sigma,
    q: float,
) -> bool:
    """Check a general input covariance against the per-constraint level.

    True iff for every error corner and every constraint ``j`` coupled to
    the input, ``||h_j^T B Sigma^(1/2)||_2`` does not exceed the corner
    margin divided by the normal quantile at ``q``; uncoupled constraints
    must hold deterministically for every corner.
    """
    if not (0.5 < q < 1.0):
        raise ValueError(f"q must lie in (0.5, 1), got {q}")
    x = np.asarray(x, dtype=float).ravel()
    u_mean = np.asarray(u_mean, dtype=float).ravel()
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    m = model.input_dim
    if Sigma.shape != (m, m):
        raise ValueError(f"Sigma must be {m}x{m}, got {Sigma.shape}")
    if not np.allclose(Sigma, Sigma.T, rtol=0.0, atol=1e-12):
        raise ValueError("Sigma must be symmetric")
    evals, evecs = np.linalg.eigh(Sigma)
    scale = max(1.0, float(np.max(np.abs(evals), initial=0.0)))
    if np.min(evals) < -1e-12 * scale:
        raise ValueError(f"Sigma is not positive semidefinite (min eig {evals.min():.3g})")
    sqrt_sigma = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T

    z = std_normal_quantile(q)
    margins = margin_table(model, constraints, x, u_mean)
    coupling = constraints.H @ model.B  # (n_c, m)
    coupled = np.linalg.norm(coupling, axis=1) > 0.0

    lhs = np.linalg.norm(coupling @ sqrt_sigma, axis=1)  # (n_c,)
    for j in range(constraints.n_constraints):
        if coupled[j]:
            bound = np.min(margins[j]) / z
            if lhs[j] > bound * (1.0 + _SUFFICIENCY_RTOL):
                return False
        else:
            # No input coupling: B u drops out of h_j^T x_next, so the
            # margin must be nonnegative for every corner outright.
            drift = constraints.d[j] - constraints.H[j] @ (model.A @ x)
            corner_shift = model.corner_set() @ constraints.H[j]
            if np.min(drift - corner_shift) < 0.0:
                return False
    return True
