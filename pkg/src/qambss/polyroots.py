"""Real roots of small polynomials through companion-matrix eigenvalues."""

from __future__ import annotations

import numpy as np

IMAG_TOL = 1e-8


def companion(coeffs) -> np.ndarray:
    """Companion matrix of a monic-normalized polynomial (descending coefficients)."""
    c = np.asarray(coeffs, dtype=float)
    n = len(c) - 1
    m = np.zeros((n, n))
    m[0, :] = -c[1:] / c[0]
    m[1:, :-1] = np.eye(n - 1)
    return m


def real_roots(coeffs, imag_tol: float = IMAG_TOL) -> np.ndarray:
    """Real roots of the polynomial with descending ``coeffs``.

    Leading coefficients that are negligible relative to the largest one are
    dropped, so a degenerate quartic is handled as a cubic and so on. Roots
    whose imaginary part is below ``imag_tol`` (relative to ``max(1, |root|)``)
    count as real.
    """
    c = np.asarray(coeffs, dtype=float)
    if not np.all(np.isfinite(c)):
        return np.empty(0)
    big = np.max(np.abs(c)) if c.size else 0.0
    if big == 0.0:
        return np.empty(0)
    nz = np.flatnonzero(np.abs(c) > 1e-14 * big)
    c = c[nz[0]:]
    if len(c) < 2:
        return np.empty(0)
    roots = np.linalg.eigvals(companion(c))
    keep = np.abs(roots.imag) <= imag_tol * np.maximum(1.0, np.abs(roots))
    return np.sort(roots[keep].real)
