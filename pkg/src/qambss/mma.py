"""Closed-form parameter solvers for the multimodulus (MM) criterion.

The MM cost of a stacked block is ``sum_j sum_i (y_ji^2 - R)^2`` over all
``2N_t`` real rows. Each solver here works on the rows touched by one
structured rotation pair (see :mod:`qambss.rotations`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polyroots import real_roots
from .rotations import partner_rows

HYPERBOLIC_BOUND = 1.0
ARCTANH_CLAMP = 0.99
_TIE_TOL = 1e-12
CONSTRAINT_TOL = 1e-6


def mm_cost(data: np.ndarray, dispersion: float, rows=None) -> float:
    """Multimodulus cost of ``data`` (optionally restricted to ``rows``)."""
    x = data if rows is None else data[list(rows)]
    return float(np.sum((x**2 - dispersion) ** 2))


def _row_pairs(data: np.ndarray, p: int, q: int, paired: bool) -> list[tuple[int, int, float]]:
    """Row pairs touched by the rotation pair led by ``(p, q)``.

    The third entry is the sign of the companion's parameter relative to the
    leading one (``-1`` only for the cross hyperbolic pattern, applied by the
    caller).
    """
    n = data.shape[0] // 2
    pairs = [(p, q, 1.0)]
    if paired:
        partner = partner_rows(p, q, n)
        if partner is not None:
            sign = -1.0 if q >= n else 1.0
            pairs.append((partner[0], partner[1], sign))
    return pairs


@dataclass(frozen=True)
class QuadraticFormAccumulator:
    """Symmetric 2x2 ``T`` such that the Givens MM cost equals ``v^T T v`` up to constants."""

    t_matrix: np.ndarray


def accumulate_givens_form(data: np.ndarray, p: int, q: int, paired: bool = True) -> QuadraticFormAccumulator:
    """Sum ``t_i t_i^T`` over the samples of every row pair touched by the rotation.

    ``t_i = [(y_p^2 - y_q^2)/2, y_p y_q]`` for each touched pair ``(p, q)``.
    The companion pair is inferred from ``(p, q)``; with ``paired=False``
    (or for the ``(p, p+N_t)`` phase rotation) only ``(p, q)`` is used.
    """
    t = np.zeros((2, 2))
    for a, b, _ in _row_pairs(data, p, q, paired):
        ya, yb = data[a], data[b]
        t1 = 0.5 * (ya * ya - yb * yb)
        t2 = ya * yb
        t[0, 0] += t1 @ t1
        t[0, 1] += t1 @ t2
        t[1, 1] += t2 @ t2
    t[1, 0] = t[0, 1]
    return QuadraticFormAccumulator(t)


def solve_givens_theta(form: QuadraticFormAccumulator) -> tuple[float, float]:
    """Return ``(cos theta, sin theta)`` minimizing ``v^T T v`` with ``v = [cos 2θ, sin 2θ]``.

    ``v`` is the unit eigenvector of the smallest eigenvalue, sign-fixed so
    that ``v_1 >= 0`` (and ``v_2 >= 0`` when ``v_1 = 0``), which confines
    ``theta`` to ``[-pi/4, pi/4]``. An isotropic ``T`` gives the identity.
    """
    a, b, c = form.t_matrix[0, 0], form.t_matrix[0, 1], form.t_matrix[1, 1]
    half_gap = np.hypot(0.5 * (a - c), b)
    if half_gap <= _TIE_TOL * max(abs(a) + abs(c), 1e-300):
        return 1.0, 0.0
    # eigenvector of the smallest eigenvalue: direction 2*phi with
    # (cos 2phi, sin 2phi) = -((a - c)/2, b) / half_gap
    phi = 0.5 * np.arctan2(-b, -0.5 * (a - c))
    v1, v2 = np.cos(phi), np.sin(phi)
    if v1 < -_TIE_TOL or (v1 <= _TIE_TOL and v2 < 0):
        v1, v2 = -v1, -v2
    v1 = min(max(v1, 0.0), 1.0)
    theta = np.arctan2(v2, 1.0 + v1)
    return float(np.cos(theta)), float(np.sin(theta))


@dataclass(frozen=True)
class HyperbolicSystem:
    """``R`` and ``r`` of the hyperbolic MM cost ``u^T R u - 2 u^T r``, ``u = [cosh 2γ, sinh 2γ]``."""

    r_matrix: np.ndarray
    r_vector: np.ndarray


def accumulate_hyperbolic_system(data: np.ndarray, p: int, q: int, dispersion: float = 1.0) -> HyperbolicSystem:
    """Build ``R = sum r_i r_i^T`` and ``r = dispersion * sum r_i`` over the touched row pairs.

    ``r_i = [(y_p^2 + y_q^2)/2, y_p y_q]``; for the companion of a cross pair
    (applied with ``-gamma``) the second entry is negated.
    """
    big_r = np.zeros((2, 2))
    vec = np.zeros(2)
    for a, b, sign in _row_pairs(data, p, q, paired=True):
        ya, yb = data[a], data[b]
        r1 = 0.5 * (ya * ya + yb * yb)
        r2 = sign * ya * yb
        big_r[0, 0] += r1 @ r1
        big_r[0, 1] += r1 @ r2
        big_r[1, 1] += r2 @ r2
        vec[0] += r1.sum()
        vec[1] += r2.sum()
    big_r[1, 0] = big_r[0, 1]
    return HyperbolicSystem(big_r, dispersion * vec)


def hyperbolic_cost(sys: HyperbolicSystem, gamma: float) -> float:
    u = np.array([np.cosh(2 * gamma), np.sinh(2 * gamma)])
    return float(u @ sys.r_matrix @ u - 2 * u @ sys.r_vector)


def _clamped_cs(gamma: float, bound: float) -> tuple[float, float]:
    gamma = float(np.clip(gamma, -bound, bound))
    return float(np.cosh(gamma)), float(np.sinh(gamma))


def lagrange_solution(sys: HyperbolicSystem) -> tuple[np.ndarray, float] | None:
    """Stationary point of the constrained problem ``min u^T R u - 2 r^T u`` s.t. ``u^T J u = 1``.

    Candidate multipliers are the real roots of the quartic obtained by
    clearing denominators in ``r^T M^-1 J M^-1 r = 1`` with ``M = R + λJ``.
    Among those giving ``u_1 > 0`` and meeting the constraint the one with the smallest Lagrangian wins
    (ties go to the smallest ``|λ|``). Falls back to ``λ = 0``; returns
    ``None`` when that is singular as well.
    """
    rm, rv = sys.r_matrix, sys.r_vector
    r11, r12, r22 = rm[0, 0], rm[0, 1], rm[1, 1]
    r1, r2 = rv
    # adj(M) r and det(M) as polynomials in lambda (ascending powers)
    w1 = np.array([r22 * r1 - r12 * r2, -r1])
    w2 = np.array([r11 * r2 - r12 * r1, r2])
    det = np.array([r11 * r22 - r12 * r12, r22 - r11, -1.0])
    quartic = np.polynomial.polynomial.polysub(
        np.polynomial.polynomial.polysub(
            np.polynomial.polynomial.polymul(w1, w1), np.polynomial.polynomial.polymul(w2, w2)
        ),
        np.polynomial.polynomial.polymul(det, det),
    )
    j2 = np.array([1.0, -1.0])
    scale = max(abs(r11) + abs(r22), 1e-300)
    candidates = []
    for lam in real_roots(quartic[::-1]):
        m = rm + lam * np.diag(j2)
        if abs(np.linalg.det(m)) <= 1e-14 * scale * scale:
            continue
        u = np.linalg.solve(m, rv)
        # clearing denominators adds roots where adj(M) r and det(M) vanish together
        if u[0] <= 0 or abs(u @ (j2 * u) - 1.0) > CONSTRAINT_TOL:
            continue
        lagr = u @ rm @ u - 2 * rv @ u + lam * (u @ (j2 * u) - 1.0)
        candidates.append((float(lagr), float(lam), u))
    best = None
    if candidates:
        lowest = min(c[0] for c in candidates)
        tol = 1e-12 * max(1.0, abs(lowest))
        best = min((c for c in candidates if c[0] <= lowest + tol), key=lambda c: abs(c[1]))
    if best is not None:
        return best[2], best[1]
    if abs(np.linalg.det(rm)) <= 1e-14 * scale * scale:
        return None
    return np.linalg.solve(rm, rv), 0.0


def solve_hyperbolic_exact(sys: HyperbolicSystem, bound: float = HYPERBOLIC_BOUND) -> tuple[float, float]:
    """Return ``(cosh γ, sinh γ)`` from the Lagrange-multiplier solution, ``|γ| <= bound``."""
    sol = lagrange_solution(sys)
    if sol is None:
        return 1.0, 0.0
    u, _ = sol
    u1, u2 = u
    if not (np.isfinite(u1) and np.isfinite(u2)) or u1 <= abs(u2):
        return 1.0, 0.0
    # half-angle relations, after projecting u onto the u1 > 0 hyperbola branch
    gamma = 0.5 * np.arctanh(u2 / u1)
    return _clamped_cs(gamma, bound)


def solve_hyperbolic_approx(sys: HyperbolicSystem, bound: float = HYPERBOLIC_BOUND) -> tuple[float, float]:
    """Return ``(cosh γ, sinh γ)`` with ``γ = atanh((r_2 - R_12) / (R_11 + R_22 - r_1)) / 2``."""
    rm, rv = sys.r_matrix, sys.r_vector
    num = rv[1] - rm[0, 1]
    den = rm[0, 0] + rm[1, 1] - rv[0]
    if den == 0 or not np.isfinite(num / den):
        return 1.0, 0.0
    arg = np.clip(num / den, -ARCTANH_CLAMP, ARCTANH_CLAMP)
    return _clamped_cs(0.5 * np.arctanh(arg), bound)


def compute_normalization(data: np.ndarray) -> np.ndarray:
    """Per-stream scale ``λ_p`` minimizing ``sum ((λ y)^2 - 1)^2`` over rows ``p`` and ``p+N_t``."""
    n = data.shape[0] // 2
    sq = data * data
    num = sq[:n].sum(axis=1) + sq[n:].sum(axis=1)
    den = (sq[:n] ** 2).sum(axis=1) + (sq[n:] ** 2).sum(axis=1)
    lam = np.ones(n)
    ok = den > 0
    lam[ok] = np.sqrt(num[ok] / den[ok])
    lam[~np.isfinite(lam) | (lam <= 0)] = 1.0
    return lam
