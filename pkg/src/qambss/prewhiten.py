"""Pre-whitening and signal-subspace projection of received blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

WhiteningMode = Literal["covariance_whitening", "subspace_projection"]
MAX_EIGEN_RATIO = 1e12


class DegenerateDataError(ValueError):
    """Raised when the received block does not span the requested signal subspace."""


@dataclass(frozen=True)
class Whitener:
    matrix_b: np.ndarray
    mode: WhiteningMode = "covariance_whitening"

    @property
    def n_sources(self) -> int:
        return self.matrix_b.shape[0]


def fit_whitener(received: np.ndarray, n_sources: int, mode: WhiteningMode = "covariance_whitening") -> Whitener:
    """Fit ``B`` from the sample covariance ``Y Y^H / N_s``.

    The ``n_sources`` dominant eigenpairs span the signal subspace. In
    covariance mode ``B = diag(lam)^(-1/2) U^H`` so that ``B C B^H = I``;
    in projection mode ``B = U^H``.

    Raises
    ------
    DegenerateDataError
        If fewer samples than sources are given, or the retained eigenvalues
        spread by more than ``1e12``.
    """
    received = np.asarray(received)
    m, n_s = received.shape
    if mode not in ("covariance_whitening", "subspace_projection"):
        raise ValueError(f"unknown whitening mode {mode!r}")
    if not 1 <= n_sources <= m:
        raise ValueError(f"n_sources must lie in [1, {m}]")
    if n_s < n_sources:
        raise DegenerateDataError(f"{n_s} samples cannot span {n_sources} sources")
    cov = received @ received.conj().T / n_s
    lam, u = np.linalg.eigh(cov)
    order = np.argsort(lam)[::-1][:n_sources]
    lam, u = lam[order], u[:, order]
    if lam[-1] <= 0 or lam[0] / lam[-1] > MAX_EIGEN_RATIO:
        raise DegenerateDataError("signal subspace is rank deficient")
    b = u.conj().T
    if mode == "covariance_whitening":
        b = b / np.sqrt(lam)[:, None]
    return Whitener(matrix_b=b, mode=mode)


def apply_whitener(w: Whitener, received: np.ndarray) -> np.ndarray:
    received = np.asarray(received)
    if received.ndim != 2 or received.shape[0] != w.matrix_b.shape[1]:
        raise ValueError(f"expected {w.matrix_b.shape[1]} rows, got shape {received.shape}")
    return w.matrix_b @ received
