"""Linear state-constraint polytope and margin queries.

The admissible region is the polyhedron ``{x | H x <= d}`` (componentwise).
Margins are reported raw, without clamping, so callers can observe and log
violations; the interior test is an exact strict comparison with no epsilon
padding (any safety slack belongs in the caller's configuration).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConstraintSet:
    """Polyhedral constraint set ``{x in R^n | H x <= d}``.

    Parameters
    ----------
    H : (n_c, n) array_like
        Constraint normals, one row per inequality. No row may be zero.
    d : (n_c,) array_like
        Right-hand sides, in state units.
    """

    H: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=float))
        d = np.asarray(self.d, dtype=float).ravel()
        if H.ndim != 2 or H.shape[0] < 1 or H.shape[1] < 1:
            raise ValueError(f"H must be a non-empty 2-D matrix, got shape {H.shape}")
        if d.shape[0] != H.shape[0]:
            raise ValueError(
                f"d has length {d.shape[0]} but H has {H.shape[0]} rows"
            )
        if not (np.isfinite(H).all() and np.isfinite(d).all()):
            raise ValueError("H and d must be finite")
        row_norms = np.linalg.norm(H, axis=1)
        if np.any(row_norms == 0.0):
            raise ValueError("H contains a zero row; every constraint needs a normal")
        H.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "d", d)

    @property
    def n_constraints(self) -> int:
        return self.H.shape[0]

    @property
    def state_dim(self) -> int:
        return self.H.shape[1]

    def _check_dim(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.state_dim:
            raise ValueError(
                f"state has dimension {x.shape[0]}, expected {self.state_dim}"
            )
        return x

    def margins(self, x) -> np.ndarray:
        """Per-constraint slack ``d_j - h_j^T x`` (negative when violated)."""
        x = self._check_dim(x)
        return self.d - self.H @ x

    def contains(self, x) -> bool:
        """Non-strict membership: every margin >= 0."""
        return bool(np.min(self.margins(x)) >= 0.0)

    def contains_interior(self, x) -> bool:
        """Strict membership: every margin > 0 (boundary points excluded)."""
        return bool(np.min(self.margins(x)) > 0.0)
