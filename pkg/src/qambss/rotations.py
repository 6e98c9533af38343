"""Real-stacked data blocks and the structure-preserving rotation pairs.

A complex ``N_t x N_s`` block is handled as a real ``2N_t x N_s`` array with
real parts on top of imaginary parts. The separator accumulated alongside it
is the real ``2N_t x 2N_t`` matrix ``[[V_R, -V_I], [V_I, V_R]]``. Rotations are
only ever applied in the pairings that keep that block structure:

``direct``
    ``(p, q)`` and ``(p+N_t, q+N_t)`` with a shared parameter.
``cross``
    ``(p, q+N_t)`` and ``(q, p+N_t)``; Givens share the angle, hyperbolic
    rotations use opposite parameters.
``phase``
    the single Givens rotation ``(p, p+N_t)``.

Everything here mutates its arguments in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

RotationKind = Literal["givens", "hyperbolic", "normalization"]
PairFamily = Literal["direct", "cross", "phase"]

_UNIT_TOL = 1e-12


def stack(block: np.ndarray) -> np.ndarray:
    """Complex ``(n, N_s)`` block -> real ``(2n, N_s)`` block."""
    block = np.asarray(block)
    return np.vstack([block.real, block.imag]).astype(float)


def unstack(block: np.ndarray) -> np.ndarray:
    n = block.shape[0] // 2
    return block[:n] + 1j * block[n:]


def identity_separator(n_streams: int) -> np.ndarray:
    return np.eye(2 * n_streams)


def separator_to_complex(sep: np.ndarray) -> np.ndarray:
    """Recover the complex ``V`` from its structured real form."""
    n = sep.shape[0] // 2
    return sep[:n, :n] + 1j * sep[n:, :n]


def complex_to_separator(v: np.ndarray) -> np.ndarray:
    return np.block([[v.real, -v.imag], [v.imag, v.real]])


def structure_residual(sep: np.ndarray) -> float:
    """Largest deviation of ``sep`` from the ``[[V_R, -V_I], [V_I, V_R]]`` pattern."""
    n = sep.shape[0] // 2
    d1 = np.abs(sep[:n, :n] - sep[n:, n:]).max()
    d2 = np.abs(sep[:n, n:] + sep[n:, :n]).max()
    return float(max(d1, d2))


def enforce_structure(sep: np.ndarray) -> None:
    """Project ``sep`` back onto the structured set by averaging its blocks."""
    n = sep.shape[0] // 2
    vr = 0.5 * (sep[:n, :n] + sep[n:, n:])
    vi = 0.5 * (sep[n:, :n] - sep[:n, n:])
    sep[:n, :n] = vr
    sep[n:, n:] = vr
    sep[n:, :n] = vi
    sep[:n, n:] = -vi


@dataclass(frozen=True)
class PlaneRotation:
    """Elementary transformation acting on rows ``p`` and ``q``.

    For ``givens`` the 2x2 block is ``[[c, s], [-s, c]]``, for ``hyperbolic``
    it is ``[[c, s], [s, c]]``. ``normalization`` scales rows ``p`` and ``q``
    by ``c`` (``s`` must be zero).
    """

    kind: RotationKind
    p: int
    q: int
    c: float
    s: float

    def __post_init__(self):
        if self.kind == "givens":
            ok = abs(self.c**2 + self.s**2 - 1.0) <= _UNIT_TOL
        elif self.kind == "hyperbolic":
            ok = abs(self.c**2 - self.s**2 - 1.0) <= _UNIT_TOL * max(1.0, self.c**2)
        elif self.kind == "normalization":
            ok = self.c > 0 and self.s == 0
        else:
            raise ValueError(f"unknown rotation kind {self.kind!r}")
        if not ok:
            raise ValueError(f"inconsistent {self.kind} parameters c={self.c}, s={self.s}")
        if self.p == self.q and self.kind != "normalization":
            raise ValueError("rotation rows must differ")

    @classmethod
    def givens(cls, p: int, q: int, theta: float) -> "PlaneRotation":
        return cls("givens", p, q, float(np.cos(theta)), float(np.sin(theta)))

    @classmethod
    def hyperbolic(cls, p: int, q: int, gamma: float) -> "PlaneRotation":
        return cls("hyperbolic", p, q, float(np.cosh(gamma)), float(np.sinh(gamma)))

    @property
    def parameter(self) -> float:
        """Angle ``theta`` or hyperbolic parameter ``gamma``."""
        if self.kind == "givens":
            return float(np.arctan2(self.s, self.c))
        if self.kind == "hyperbolic":
            return float(np.arcsinh(self.s))
        return self.c

    def matrix(self, size: int) -> np.ndarray:
        m = np.eye(size)
        p, q = self.p, self.q
        if self.kind == "normalization":
            m[p, p] = m[q, q] = self.c
            return m
        m[p, p] = m[q, q] = self.c
        m[p, q] = self.s
        m[q, p] = -self.s if self.kind == "givens" else self.s
        return m

    def apply(self, x: np.ndarray) -> None:
        """Left-multiply ``x`` by this rotation, in place."""
        p, q, c, s = self.p, self.q, self.c, self.s
        if self.kind == "normalization":
            x[p] *= c
            if q != p:
                x[q] *= c
            return
        yp = x[p].copy()
        yq = x[q]
        x[p] = c * yp + s * yq
        if self.kind == "givens":
            x[q] = c * yq - s * yp
        else:
            x[q] = c * yq + s * yp


def partner_rows(p: int, q: int, n_streams: int) -> tuple[int, int] | None:
    """Rows touched by the companion rotation of the pair whose first rotation is ``(p, q)``.

    Returns ``None`` for the single ``(p, p+N_t)`` phase rotation.
    """
    n = n_streams
    if p < n and q < n:
        return p + n, q + n
    if p < n <= q:
        if q == p + n:
            return None
        return q - n, p + n
    raise ValueError(f"rows ({p}, {q}) are not the leading rotation of a structured pair")


def pair_rows(p: int, q: int, family: PairFamily, n_streams: int) -> tuple[int, int]:
    """Leading rotation rows for complex streams ``p, q`` under ``family``."""
    if family == "direct":
        return p, q
    if family == "cross":
        return p, q + n_streams
    if family == "phase":
        return p, p + n_streams
    raise ValueError(f"unknown pair family {family!r}")


def make_pair(
    kind: RotationKind, family: PairFamily, p: int, q: int, n_streams: int, c: float, s: float
) -> tuple[PlaneRotation, PlaneRotation]:
    """Build the two rotations of a structured pair on complex streams ``p, q``."""
    if family == "phase":
        if kind != "givens":
            raise ValueError("phase rotations are Givens only")
        rot = PlaneRotation(kind, p, p + n_streams, c, s)
        return rot, rot
    if p == q:
        raise ValueError("direct and cross pairs need distinct streams")
    a, b = pair_rows(p, q, family, n_streams)
    a2, b2 = partner_rows(a, b, n_streams)
    s2 = -s if (kind == "hyperbolic" and family == "cross") else s
    return PlaneRotation(kind, a, b, c, s), PlaneRotation(kind, a2, b2, c, s2)


def classify_pair(rot_a: PlaneRotation, rot_b: PlaneRotation, n_streams: int) -> PairFamily:
    """Identify the structured pattern formed by two rotations, or raise ``ValueError``."""
    n = n_streams
    if rot_a.kind not in ("givens", "hyperbolic") or rot_b.kind != rot_a.kind:
        raise ValueError("a pair needs two Givens or two hyperbolic rotations")
    if not (0 <= rot_a.p < 2 * n and 0 <= rot_a.q < 2 * n):
        raise ValueError("rotation rows out of range")
    if rot_a.q == rot_a.p + n and rot_a.p < n:
        if rot_a.kind != "givens" or rot_b != rot_a:
            raise ValueError("the (p, p+N_t) pattern is a single Givens rotation passed twice")
        return "phase"
    try:
        partner = partner_rows(rot_a.p, rot_a.q, n)
    except ValueError:
        partner = None
    if partner is None or (rot_b.p, rot_b.q) != partner or rot_b.c != rot_a.c:
        raise ValueError(f"rows {(rot_a.p, rot_a.q)} and {(rot_b.p, rot_b.q)} do not form a structured pair")
    family: PairFamily = "direct" if rot_a.q < n else "cross"
    expected_s = -rot_a.s if (family == "cross" and rot_a.kind == "hyperbolic") else rot_a.s
    if rot_b.s != expected_s:
        raise ValueError("pair parameters break the separator structure")
    return family


def apply_rotation_pair(data: np.ndarray, sep: np.ndarray, rot_a: PlaneRotation, rot_b: PlaneRotation) -> None:
    """Apply a structured pair to the stacked data and the separator, in place."""
    family = classify_pair(rot_a, rot_b, data.shape[0] // 2)
    rot_a.apply(data)
    rot_a.apply(sep)
    if family != "phase":
        rot_b.apply(data)
        rot_b.apply(sep)


def apply_normalization(data: np.ndarray, sep: np.ndarray, lambdas) -> None:
    """Scale rows ``p`` and ``p+N_t`` of ``data`` and ``sep`` by ``lambdas[p]``."""
    lam = np.asarray(lambdas, dtype=float)
    n = data.shape[0] // 2
    if lam.shape != (n,):
        raise ValueError(f"expected {n} normalization factors, got shape {lam.shape}")
    if not (np.all(np.isfinite(lam)) and np.all(lam > 0)):
        raise ValueError("normalization factors must be positive and finite")
    scale = np.concatenate([lam, lam])[:, None]
    data *= scale
    sep *= scale


def complex_givens(size: int, p: int, q: int, theta: float, alpha: float) -> np.ndarray:
    """Complex Givens matrix ``G_pq(theta, alpha)``."""
    g = np.eye(size, dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    g[p, p] = g[q, q] = c
    g[p, q] = np.exp(1j * alpha) * s
    g[q, p] = -np.exp(-1j * alpha) * s
    return g


def complex_hyperbolic(size: int, p: int, q: int, gamma: float, beta: float) -> np.ndarray:
    """Complex hyperbolic matrix ``H_pq(gamma, beta)``."""
    h = np.eye(size, dtype=complex)
    c, s = np.cosh(gamma), np.sinh(gamma)
    h[p, p] = h[q, q] = c
    h[p, q] = np.exp(1j * beta) * s
    h[q, p] = np.exp(-1j * beta) * s
    return h
