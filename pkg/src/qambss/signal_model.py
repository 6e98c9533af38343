"""Square-QAM sources, random MIMO channels and the noisy linear mixing model.

Signals are carried as plain complex ``ndarray`` blocks with one row per
stream and one column per sample (``Y = A S + N``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUPPORTED_ORDERS = (4, 16, 64, 256)
DEFAULT_CONDITION_BOUND = 100.0
DEFAULT_MAX_RETRIES = 1000


class ChannelGenerationError(RuntimeError):
    """Raised when no channel meeting the conditioning bound could be drawn."""


@dataclass(frozen=True)
class ConstellationSpec:
    """Normalized square-QAM alphabet.

    Points are ``scale * (a + 1j*b)`` with ``a, b`` odd integers in
    ``[-(sqrt(L)-1), sqrt(L)-1]``. The integer lattice has spacing 2, so the
    half distance between neighbours equals ``scale``.

    Attributes
    ----------
    order : int
        Alphabet size ``L``.
    half_spacing : float
        Half the minimum distance between normalized points.
    scale : float
        Factor mapping the odd-integer lattice to unit average power.
    dispersion : float
        ``E[s_R^4] / E[s_R^2]`` of the normalized real part.
    """

    order: int
    half_spacing: float
    scale: float
    dispersion: float

    @property
    def side(self) -> int:
        return int(round(np.sqrt(self.order)))

    @property
    def levels(self) -> np.ndarray:
        """Normalized per-axis amplitude levels, ascending."""
        m = self.side
        return self.scale * np.arange(-(m - 1), m, 2, dtype=float)

    @property
    def alphabet(self) -> np.ndarray:
        lv = self.levels
        return (lv[None, :] + 1j * lv[:, None]).ravel()


def build_constellation(order: int) -> ConstellationSpec:
    """Build the unit-average-power square QAM descriptor for ``order`` points."""
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {order}; expected one of {SUPPORTED_ORDERS}")
    m = int(round(np.sqrt(order)))
    lattice = np.arange(-(m - 1), m, 2, dtype=float)
    # per-axis moments of the integer lattice (both axes are identical)
    m2 = np.mean(lattice**2)
    m4 = np.mean(lattice**4)
    scale = 1.0 / np.sqrt(2.0 * m2)
    return ConstellationSpec(
        order=order,
        half_spacing=scale,
        scale=scale,
        dispersion=(m4 / m2) * scale**2,
    )


def draw_sources(spec: ConstellationSpec, n_sources: int, n_samples: int, rng_seed: int) -> np.ndarray:
    """Draw an ``n_sources x n_samples`` block of i.i.d. uniform alphabet symbols."""
    if n_sources < 1 or n_samples < 1:
        raise ValueError("n_sources and n_samples must be positive")
    rng = np.random.default_rng(rng_seed)
    levels = spec.levels
    re = rng.integers(0, spec.side, size=(n_sources, n_samples))
    im = rng.integers(0, spec.side, size=(n_sources, n_samples))
    return levels[re] + 1j * levels[im]


@dataclass(frozen=True)
class ChannelInstance:
    mixing: np.ndarray
    noise_variance: float = 0.0
    condition_bound: float = DEFAULT_CONDITION_BOUND

    @property
    def n_rx(self) -> int:
        return self.mixing.shape[0]

    @property
    def n_tx(self) -> int:
        return self.mixing.shape[1]


def draw_channel(
    n_rx: int,
    n_tx: int,
    condition_bound: float = DEFAULT_CONDITION_BOUND,
    rng_seed: int | None = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
) -> ChannelInstance:
    """Draw a standard complex Gaussian ``n_rx x n_tx`` mixing matrix.

    Draws are rejected until the 2-norm condition number is at most
    ``condition_bound``; an infinite bound accepts the first draw.

    Raises
    ------
    ChannelGenerationError
        If ``max_retries`` draws all violate the bound.
    """
    if not n_rx >= n_tx >= 1:
        raise ValueError("need n_rx >= n_tx >= 1")
    if not condition_bound > 1:
        raise ValueError("condition_bound must exceed 1")
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_retries):
        a = (rng.standard_normal((n_rx, n_tx)) + 1j * rng.standard_normal((n_rx, n_tx))) / np.sqrt(2.0)
        if np.isinf(condition_bound) or np.linalg.cond(a) <= condition_bound:
            return ChannelInstance(mixing=a, condition_bound=condition_bound)
    raise ChannelGenerationError(
        f"no {n_rx}x{n_tx} channel with condition number <= {condition_bound} in {max_retries} draws"
    )


def noise_variance(channel: ChannelInstance, sources: np.ndarray, snr_db: float) -> float:
    """Noise variance giving ``snr_db`` average signal-to-noise per receive antenna."""
    if np.isposinf(snr_db):
        return 0.0
    clean = channel.mixing @ sources
    signal_power = np.mean(np.abs(clean) ** 2)
    return float(signal_power / 10.0 ** (snr_db / 10.0))


def transmit(channel: ChannelInstance, sources: np.ndarray, snr_db: float, rng_seed: int | None = None) -> np.ndarray:
    """Return ``Y = A S + N`` with circular white Gaussian noise at ``snr_db``.

    ``snr_db = inf`` disables the noise term entirely.
    """
    sources = np.asarray(sources)
    if sources.ndim != 2 or sources.shape[0] != channel.n_tx:
        raise ValueError(f"sources must have {channel.n_tx} rows, got shape {sources.shape}")
    clean = channel.mixing @ sources
    var = noise_variance(channel, sources, snr_db)
    if var == 0.0:
        return clean
    rng = np.random.default_rng(rng_seed)
    shape = clean.shape
    noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(var / 2.0)
    return clean + noise
