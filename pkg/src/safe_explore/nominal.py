"""Linear nominal plant model with componentwise error bounds.

The model predicts ``x_next ~= A x + B u`` with a known per-coordinate bound
``|true_i - predicted_i| <= e_bar_i``.  Worst-case reasoning enumerates the
2^n sign corners of the error box exactly; sampling would void the
per-constraint probability guarantee downstream, so enumeration is capped
rather than approximated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSet

#: Largest state dimension for which corner enumeration (2^n) is permitted.
DEFAULT_CORNER_CAP = 20


class CornerExplosionError(ValueError):
    """State dimension too large for exact 2^n error-corner enumeration."""


@dataclass(frozen=True)
class NominalModel:
    """Known linear approximation ``(A, B)`` of an unknown plant plus error box.

    Parameters
    ----------
    A : (n, n) array_like
        Per-step state transition of the nominal model.
    B : (n, m) array_like
        Input gain. A single column may be given as a flat length-n vector.
    e_bar : (n,) array_like
        Nonnegative bound on the absolute per-coordinate one-step error
        between the true plant and the nominal prediction.
    """

    A: np.ndarray
    B: np.ndarray
    e_bar: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        e_bar = np.asarray(self.e_bar, dtype=float).ravel()
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got shape {A.shape}")
        if B.shape[0] != n:
            raise ValueError(f"B has {B.shape[0]} rows, expected {n}")
        if e_bar.shape[0] != n:
            raise ValueError(f"e_bar has length {e_bar.shape[0]}, expected {n}")
        if not (np.isfinite(A).all() and np.isfinite(B).all() and np.isfinite(e_bar).all()):
            raise ValueError("A, B and e_bar must be finite")
        if np.any(e_bar < 0.0):
            raise ValueError("error bounds e_bar must be nonnegative")
        for arr in (A, B, e_bar):
            arr.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "e_bar", e_bar)

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def input_dim(self) -> int:
        return self.B.shape[1]

    def corner_set(self, cap: int = DEFAULT_CORNER_CAP) -> np.ndarray:
        """All 2^n sign corners of the error box, as a (2^n, n) array.

        Order is fixed by binary counting on the corner index with
        coordinate 0 as the most significant bit; bit value 0 picks
        ``+e_bar_i`` and bit value 1 picks ``-e_bar_i``.  The fixed order
        makes argmin logging reproducible.
        """
        n = self.state_dim
        if n > cap:
            raise CornerExplosionError(
                f"corner enumeration needs 2^{n} vectors; cap is 2^{cap}"
            )
        corners = np.array(
            list(itertools.product(*((e, -e) for e in self.e_bar))), dtype=float
        )
        return corners.reshape(2**n, n)

    def predict_nominal(self, x, u_mean) -> np.ndarray:
        """Nominal next state ``A x + B u_mean`` (no error term)."""
        x = np.asarray(x, dtype=float).ravel()
        u = np.asarray(u_mean, dtype=float).ravel()
        if x.shape[0] != self.state_dim:
            raise ValueError(
                f"state has dimension {x.shape[0]}, expected {self.state_dim}"
            )
        if u.shape[0] != self.input_dim:
            raise ValueError(
                f"input has dimension {u.shape[0]}, expected {self.input_dim}"
            )
        return self.A @ x + self.B @ u

    def validate_input_coupling(self, constraints: ConstraintSet) -> bool:
        """True iff every constraint normal couples to the input: h_j^T B != 0."""
        if constraints.state_dim != self.state_dim:
            raise ValueError(
                f"constraint set is {constraints.state_dim}-dimensional, "
                f"model is {self.state_dim}-dimensional"
            )
        coupling = constraints.H @ self.B  # (n_c, m)
        return bool(np.all(np.linalg.norm(coupling, axis=1) > 0.0))
