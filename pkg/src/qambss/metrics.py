"""Separation quality: ambiguity resolution, SINR and symbol error rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal_model import ConstellationSpec

SINR_CAP_DB = 300.0


class DegenerateSeparationError(ValueError):
    """Raised when an output cannot be matched to any source."""


@dataclass(frozen=True)
class GlobalSystem:
    """Global matrix ``G = W A`` with the output -> source assignment.

    ``assignment[j]`` is the source recovered by output ``j`` and
    ``gains[j] = G[j, assignment[j]]``.
    """

    g_matrix: np.ndarray
    assignment: np.ndarray
    gains: np.ndarray


def resolve_ambiguity(w: np.ndarray, a: np.ndarray) -> GlobalSystem:
    """Match outputs to sources greedily by descending ``|g_ij|``."""
    w, a = np.asarray(w), np.asarray(a)
    if w.shape[1] != a.shape[0]:
        raise ValueError(f"W {w.shape} and A {a.shape} do not conform")
    g = w @ a
    n_out, n_src = g.shape
    if n_out != n_src:
        raise ValueError("global system must be square")
    mag = np.abs(g).astype(float)
    assignment = np.full(n_out, -1)
    for _ in range(n_out):
        i, j = np.unravel_index(np.argmax(mag), mag.shape)
        if mag[i, j] <= 0:
            raise DegenerateSeparationError("zero gain on a matched output")
        assignment[i] = j
        mag[i, :] = -1.0
        mag[:, j] = -1.0
    gains = g[np.arange(n_out), assignment]
    return GlobalSystem(g, assignment, gains)


def sinr_per_output(sys: GlobalSystem, w: np.ndarray, sources: np.ndarray, noise_cov: np.ndarray) -> np.ndarray:
    """Linear SINR of every output (``inf`` when interference and noise vanish)."""
    g = sys.g_matrix
    n_s = sources.shape[1]
    power = np.sum(np.abs(sources) ** 2, axis=1) / n_s
    contrib = np.abs(g) ** 2 * power[None, :]
    rows = np.arange(g.shape[0])
    signal = contrib[rows, sys.assignment]
    interference = contrib.sum(axis=1) - signal
    noise = np.real(np.einsum("ij,jk,ik->i", w, noise_cov, w.conj()))
    denom = interference + noise
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, signal / np.where(denom > 0, denom, 1.0), np.inf)
    return out


def compute_sinr(sys: GlobalSystem, w: np.ndarray, sources: np.ndarray, noise_cov: np.ndarray) -> float:
    """Average output SINR in dB, capped at ``SINR_CAP_DB``.

    The per-output ratios are averaged linearly before conversion to dB.
    """
    per = sinr_per_output(sys, np.asarray(w), np.asarray(sources), np.asarray(noise_cov))
    mean = float(np.mean(per))
    if not np.isfinite(mean):
        return SINR_CAP_DB
    return float(min(10.0 * np.log10(mean), SINR_CAP_DB))


def interference_db(sys: GlobalSystem) -> float:
    """Mean off-target to on-target power ratio of the rows of ``G``, in dB."""
    p = np.abs(sys.g_matrix) ** 2
    rows = np.arange(p.shape[0])
    on = p[rows, sys.assignment]
    ratio = np.mean((p.sum(axis=1) - on) / on)
    return float(10 * np.log10(ratio)) if ratio > 0 else -SINR_CAP_DB


def demap(symbols: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Nearest-point decisions as integer level indices, shape ``symbols.shape + (2,)``."""
    m = spec.side
    scaled = np.asarray(symbols) / spec.scale
    re = np.clip(np.rint((scaled.real + (m - 1)) / 2), 0, m - 1).astype(int)
    im = np.clip(np.rint((scaled.imag + (m - 1)) / 2), 0, m - 1).astype(int)
    return np.stack([re, im], axis=-1)


def demap_and_ser(separated: np.ndarray, sources: np.ndarray, sys: GlobalSystem, spec: ConstellationSpec) -> float:
    """Symbol error rate after gain compensation and hard decisions."""
    separated = np.asarray(separated)
    equalized = separated / sys.gains[:, None]
    decided = demap(equalized, spec)
    truth = demap(np.asarray(sources)[sys.assignment], spec)
    wrong = np.any(decided != truth, axis=-1)
    return float(np.mean(wrong))
