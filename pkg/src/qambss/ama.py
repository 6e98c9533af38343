"""Alphabet-matched (AM) criterion and its rotation-parameter solvers.

The per-axis penalty is the constellation matched error
``g(x) = 1 - sin^2(pi x / 2d)``, zero on every odd multiple of the half
spacing ``d`` and maximal half-way between alphabet levels.

Around the identity, the AM cost of a rotated row pair is replaced by its
4th-order Taylor polynomial in the rotation parameter. The per-sample
coefficients ``c_0..c_4`` below follow that expansion term by term; the
stationary points of the polynomial are the real roots of its cubic
gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .polyroots import real_roots
from .rotations import partner_rows

SolverMode = Literal["exact", "approximate"]
PolyFamily = Literal["givens", "hyperbolic_pair1", "hyperbolic_pair2"]

GIVENS_BOUND = np.pi / 4
HYPERBOLIC_BOUND = 1.0
EXACT_SEED = 1e-3
EXACT_TOL = 1e-6


def cme(x, d: float):
    """Constellation matched error ``1 - sin^2(x pi / 2d)``."""
    return 1.0 - np.sin(np.asarray(x) * (np.pi / (2.0 * d))) ** 2


def ama_cost(data: np.ndarray, rows, d: float) -> float:
    if d <= 0:
        raise ValueError("half spacing must be positive")
    x = data[list(rows)]
    # cos^2 form of the same penalty; cheaper and identical up to rounding
    return float(np.sum(0.5 * (1.0 + np.cos(x * (np.pi / d)))))


def _givens_terms(ya: np.ndarray, yb: np.ndarray, d: float) -> np.ndarray:
    """Per-sample ``c_0..c_4`` for ``z = cos(t) y_a + sin(t) y_b``."""
    pi = np.pi
    co = np.cos(pi * ya / d)
    si = np.sin(pi * ya / d)
    yb2 = yb * yb
    c4 = (
        4 * pi**2 * d**2 * yb2 * co
        + pi**4 * yb2 * yb2 * co
        - 3 * pi**2 * d**2 * ya * ya * co
        - pi * d**3 * ya * si
        - 6 * pi**3 * d * ya * yb2 * si
    )
    c3 = pi * d**2 * yb * si + pi**3 * yb2 * yb * si + 3 * pi**2 * d * ya * yb * co
    c2 = pi * d * ya * si - pi**2 * yb2 * co
    c1 = pi * yb * si
    c0 = 1 + co
    return np.array([c0.sum(), c1.sum(), c2.sum(), c3.sum(), c4.sum()])


def _hyperbolic_terms(ya: np.ndarray, yb: np.ndarray, d: float) -> np.ndarray:
    """Per-sample ``c_0..c_4`` for ``z = cosh(g) y_a + sinh(g) y_b``."""
    pi = np.pi
    co = np.cos(pi * ya / d)
    si = np.sin(pi * ya / d)
    yb2 = yb * yb
    c4 = (
        pi**4 * yb2 * yb2 * co
        + 6 * pi**3 * d * ya * yb2 * si
        - 4 * pi**2 * d**2 * yb2 * co
        - 3 * pi**2 * d**2 * ya * ya * co
        - pi * d**3 * ya * si
    )
    c3 = pi**3 * yb2 * yb * si - pi * d**2 * yb * si - 3 * pi**2 * d * ya * yb * co
    c2 = pi**2 * yb2 * co + pi * d * ya * si
    c1 = pi * yb * si
    c0 = 1 + co
    return np.array([c0.sum(), c1.sum(), c2.sum(), c3.sum(), c4.sum()])


_ODD = np.array([1.0, -1.0, 1.0, -1.0, 1.0])


@dataclass(frozen=True)
class AmaPolynomial:
    """Quartic model of the AM cost in one rotation parameter.

    ``coefficients`` holds ``C_0..C_4``. The cost reads
    ``C4 x^4/48d^4 + C3 x^3/12d^3 ± C2 x^2/4d^2 ± C1 x/2d + C0/2`` with the
    signs fixed by ``family``.
    """

    coefficients: np.ndarray
    half_spacing: float
    family: PolyFamily

    def power_coefficients(self) -> np.ndarray:
        """Ascending monomial coefficients ``a_0..a_4``."""
        c0, c1, c2, c3, c4 = self.coefficients
        d = self.half_spacing
        s2 = 1.0 if self.family == "givens" else -1.0
        s1 = -1.0 if self.family == "hyperbolic_pair1" else 1.0
        return np.array([c0 / 2, s1 * c1 / (2 * d), s2 * c2 / (4 * d**2), c3 / (12 * d**3), c4 / (48 * d**4)])

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.power_coefficients())

    def stationary_points(self) -> np.ndarray:
        """Real roots of the cubic gradient."""
        a = self.power_coefficients()
        grad = a[1:] * np.arange(1, 5)
        return real_roots(grad[::-1])


def _leading_rows(data: np.ndarray, p: int, q: int) -> tuple[list[tuple[int, int, float]], bool]:
    n = data.shape[0] // 2
    partner = partner_rows(p, q, n)
    if partner is None:
        raise ValueError("AM rotations act on direct or cross pairs only")
    cross = q >= n
    return [(p, q, 1.0), (partner[0], partner[1], -1.0 if cross else 1.0)], cross


def build_ama_polynomial_givens(data: np.ndarray, p: int, q: int, d: float) -> AmaPolynomial:
    """Taylor model of the AM cost for the Givens pair led by rows ``(p, q)``.

    Within each rotated pair the ``q`` row sees ``-theta``, so its odd
    coefficients enter with a flipped sign.
    """
    if d <= 0:
        raise ValueError("half spacing must be positive")
    pairs, _ = _leading_rows(data, p, q)
    total = np.zeros(5)
    for a, b, _ in pairs:
        ya, yb = data[a], data[b]
        total += _givens_terms(ya, yb, d) + _ODD * _givens_terms(yb, ya, d)
    # C_1 is stored with the leading minus of the summed form
    total[1] = -total[1]
    return AmaPolynomial(total, d, "givens")


def build_ama_polynomial_hyperbolic(data: np.ndarray, p: int, q: int, d: float) -> AmaPolynomial:
    """Taylor model of the AM cost for the hyperbolic pair led by rows ``(p, q)``.

    A direct pair gives ``hyperbolic_pair1``; a cross pair, whose companion
    runs with ``-gamma``, gives ``hyperbolic_pair2``.
    """
    if d <= 0:
        raise ValueError("half spacing must be positive")
    pairs, cross = _leading_rows(data, p, q)
    total = np.zeros(5)
    for a, b, sign in pairs:
        ya, yb = data[a], data[b]
        terms = _hyperbolic_terms(ya, yb, d) + _hyperbolic_terms(yb, ya, d)
        total += terms if sign > 0 else _ODD * terms
    if cross:
        total[1] = -total[1]
        return AmaPolynomial(total, d, "hyperbolic_pair2")
    return AmaPolynomial(total, d, "hyperbolic_pair1")


def rotated_ama_cost(data: np.ndarray, p: int, q: int, d: float, kind: str, x: float) -> float:
    """True AM cost of the touched rows after applying the pair with parameter ``x``."""
    pairs, _ = _leading_rows(data, p, q)
    k = np.pi / d
    total = 0.0
    for a, b, sign in pairs:
        ya, yb = data[a], data[b]
        if kind == "givens":
            c, s = np.cos(x), np.sin(x)
            za, zb = c * ya + s * yb, c * yb - s * ya
        else:
            c, s = np.cosh(x), sign * np.sinh(x)
            za, zb = c * ya + s * yb, c * yb + s * ya
        total += np.sum(np.cos(k * za)) + np.sum(np.cos(k * zb))
    return 0.5 * (4 * data.shape[1] + total)


def golden_section(f, lo: float, hi: float, tol: float = EXACT_TOL) -> float:
    """Minimizer of a unimodal ``f`` on ``[lo, hi]`` to within ``tol``."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def local_minimize(f, x0: float, lo: float, hi: float, step: float = 1e-2, tol: float = EXACT_TOL) -> float:
    """Bracket the local minimum downhill from ``x0`` inside ``[lo, hi]``, then refine by golden section."""
    grow = 1.618034
    x1, f1 = x0, f(x0)
    x2 = min(max(x0 + step, lo), hi)
    f2 = f(x2)
    if f2 > f1:
        x2 = min(max(x0 - step, lo), hi)
        f2 = f(x2)
        if f2 > f1:
            return golden_section(f, max(x0 - step, lo), min(x0 + step, hi), tol)
    while True:
        x3 = min(max(x2 + grow * (x2 - x1), lo), hi)
        if x3 == x2:
            return golden_section(f, min(x1, x2), max(x1, x2), tol)
        f3 = f(x3)
        if f3 >= f2:
            return golden_section(f, min(x1, x3), max(x1, x3), tol)
        x1, f1, x2, f2 = x2, f2, x3, f3


def _pick(f, candidates) -> float:
    best_x, best_f = 0.0, f(0.0)
    for x in candidates:
        fx = f(x)
        if fx < best_f:
            best_x, best_f = float(x), fx
    return best_x


def solve_ama_givens(data: np.ndarray, p: int, q: int, d: float, mode: SolverMode = "approximate") -> tuple[float, float]:
    """Return ``(cos θ, sin θ)`` for the Givens pair led by rows ``(p, q)``.

    ``exact`` minimizes the true cost locally from ``θ = 0.001`` within
    ``[-π/4, π/4]``; ``approximate`` takes the real roots of the Taylor
    gradient. Either way ``θ = 0`` stays a candidate, so the returned
    rotation never raises the true cost.
    """
    f = lambda x: rotated_ama_cost(data, p, q, d, "givens", x)
    if mode == "exact":
        candidates = [local_minimize(f, EXACT_SEED, -GIVENS_BOUND, GIVENS_BOUND)]
    elif mode == "approximate":
        roots = build_ama_polynomial_givens(data, p, q, d).stationary_points()
        candidates = np.clip(roots, -GIVENS_BOUND, GIVENS_BOUND)
    else:
        raise ValueError(f"unknown solver mode {mode!r}")
    theta = _pick(f, candidates)
    return float(np.cos(theta)), float(np.sin(theta))


def solve_ama_hyperbolic(
    data: np.ndarray, p: int, q: int, d: float, mode: SolverMode = "approximate", bound: float = HYPERBOLIC_BOUND
) -> tuple[float, float]:
    """Return ``(cosh γ, sinh γ)`` for the hyperbolic pair led by rows ``(p, q)``, ``|γ| <= bound``."""
    f = lambda x: rotated_ama_cost(data, p, q, d, "hyperbolic", x)
    if mode == "exact":
        candidates = [local_minimize(f, EXACT_SEED, -bound, bound)]
    elif mode == "approximate":
        roots = build_ama_polynomial_hyperbolic(data, p, q, d).stationary_points()
        candidates = np.clip(roots, -bound, bound)
    else:
        raise ValueError(f"unknown solver mode {mode!r}")
    gamma = _pick(f, candidates)
    return float(np.cosh(gamma)), float(np.sinh(gamma))
