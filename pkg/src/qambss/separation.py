"""Sweep schedules of the four separation algorithms.

All runners take a whitened (or subspace-projected) real-stacked block,
rotate it in place and accumulate the structured separator alongside.

``g_mma``
    Givens rotations minimizing the MM cost, including the per-stream
    phase rotation ``(p, p+N_t)``.
``hg_mma``
    ``hyperbolic_warmup`` plain G-MMA sweeps, then a hyperbolic and a Givens
    rotation for every pair, MM cost with unit dispersion, and one diagonal
    normalization per sweep.
``g_ama`` / ``hg_ama``
    ``n_warmstart`` G-MMA sweeps, then Givens (resp. hyperbolic + Givens)
    rotations minimizing the AM cost over the strictly upper pairs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from . import ama, mma
from .prewhiten import WhiteningMode, Whitener, apply_whitener, fit_whitener
from .rotations import (
    PairFamily,
    RotationKind,
    apply_normalization,
    apply_rotation_pair,
    enforce_structure,
    identity_separator,
    make_pair,
    pair_rows,
    separator_to_complex,
    stack,
    unstack,
)
from .signal_model import ConstellationSpec

Algorithm = Literal["g_mma", "hg_mma", "g_ama", "hg_ama"]
ALGORITHMS: tuple[str, ...] = ("g_mma", "hg_mma", "g_ama", "hg_ama")
DEFAULT_SWEEPS = {"g_mma": 5, "hg_mma": 5, "g_ama": 8, "hg_ama": 8}
DEFAULT_WARMSTART = 5
DEFAULT_HYPERBOLIC_WARMUP = 2

RotationCallback = Callable[[np.ndarray], None]


@dataclass(frozen=True)
class AlgorithmConfig:
    """Settings of one separation run.

    ``n_sweeps=None`` picks the per-algorithm default. ``n_warmstart`` is the
    number of leading G-MMA sweeps of the AMA variants and
    ``hyperbolic_warmup`` that of HG-MMA. ``solver_mode`` selects the exact
    or approximate hyperbolic (and AM) solver; ``gamma_bound`` caps ``|γ|``
    per rotation. ``label`` names the configuration in experiment output
    and defaults to the algorithm name.
    """

    algorithm: Algorithm = "g_mma"
    n_sweeps: int | None = None
    n_warmstart: int = DEFAULT_WARMSTART
    solver_mode: ama.SolverMode = "approximate"
    whitening_mode: WhiteningMode = "covariance_whitening"
    gamma_bound: float = mma.HYPERBOLIC_BOUND
    hyperbolic_warmup: int = DEFAULT_HYPERBOLIC_WARMUP
    label: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.n_sweeps is None:
            object.__setattr__(self, "n_sweeps", DEFAULT_SWEEPS[self.algorithm])
        if self.n_sweeps < 1:
            raise ValueError("n_sweeps must be >= 1")
        if self.is_ama and not 0 <= self.n_warmstart <= self.n_sweeps:
            raise ValueError("n_warmstart must lie in [0, n_sweeps]")
        if self.solver_mode not in ("exact", "approximate"):
            raise ValueError(f"unknown solver mode {self.solver_mode!r}")
        if not self.gamma_bound > 0:
            raise ValueError("gamma_bound must be positive")
        if self.hyperbolic_warmup < 0:
            raise ValueError("hyperbolic_warmup must be >= 0")

    @property
    def name(self) -> str:
        return self.label or self.algorithm

    @property
    def is_ama(self) -> bool:
        return self.algorithm in ("g_ama", "hg_ama")


@dataclass
class SeparationReport:
    """Outcome of one separation run.

    Attributes
    ----------
    separator : ndarray, shape (2N_t, 2N_t)
        Structured real separator acting on the whitened stacked data.
    separated : ndarray, shape (N_t, N_s)
        Complex separated outputs.
    cost_per_sweep : ndarray
        MM cost after each warm-start/MMA sweep, AM cost after each AMA sweep.
    wall_time : float
        Seconds spent in the sweeps.
    separator_history : list of ndarray
        Copy of ``separator`` after every sweep.
    combined_w : ndarray, shape (N_t, N_r), optional
        ``W = V B``; only filled when the whitener is known.
    """

    separator: np.ndarray
    separated: np.ndarray
    cost_per_sweep: np.ndarray
    wall_time: float
    separator_history: list[np.ndarray] = field(default_factory=list)
    combined_w: np.ndarray | None = None
    whitener: Whitener | None = None

    @property
    def v(self) -> np.ndarray:
        return separator_to_complex(self.separator)

    def w_at_sweep(self, sweep: int) -> np.ndarray:
        """``V B`` using the separator as it stood after ``sweep`` (1-based) sweeps."""
        if self.whitener is None:
            raise ValueError("report carries no whitener")
        return separator_to_complex(self.separator_history[sweep - 1]) @ self.whitener.matrix_b


def _rotate(
    data: np.ndarray,
    sep: np.ndarray,
    kind: RotationKind,
    family: PairFamily,
    p: int,
    q: int,
    cs: tuple[float, float],
    callback: RotationCallback | None,
) -> None:
    c, s = cs
    if s == 0.0:
        return
    rot_a, rot_b = make_pair(kind, family, p, q, data.shape[0] // 2, c, s)
    apply_rotation_pair(data, sep, rot_a, rot_b)
    if callback is not None:
        callback(data)


def _mma_givens(data, sep, family: PairFamily, p: int, q: int, callback) -> None:
    n = data.shape[0] // 2
    a, b = pair_rows(p, q, family, n)
    form = mma.accumulate_givens_form(data, a, b, paired=family != "phase")
    _rotate(data, sep, "givens", family, p, q, mma.solve_givens_theta(form), callback)


def _mma_hyperbolic(data, sep, family: PairFamily, p: int, q: int, cfg: AlgorithmConfig, callback) -> None:
    n = data.shape[0] // 2
    a, b = pair_rows(p, q, family, n)
    system = mma.accumulate_hyperbolic_system(data, a, b, dispersion=1.0)
    if cfg.solver_mode == "exact":
        cs = mma.solve_hyperbolic_exact(system, cfg.gamma_bound)
    else:
        cs = mma.solve_hyperbolic_approx(system, cfg.gamma_bound)
    _rotate(data, sep, "hyperbolic", family, p, q, cs, callback)


def _ama_givens(data, sep, family: PairFamily, p: int, q: int, d: float, cfg: AlgorithmConfig, callback) -> None:
    a, b = pair_rows(p, q, family, data.shape[0] // 2)
    cs = ama.solve_ama_givens(data, a, b, d, cfg.solver_mode)
    _rotate(data, sep, "givens", family, p, q, cs, callback)


def _ama_hyperbolic(data, sep, family: PairFamily, p: int, q: int, d: float, cfg: AlgorithmConfig, callback) -> None:
    a, b = pair_rows(p, q, family, data.shape[0] // 2)
    cs = ama.solve_ama_hyperbolic(data, a, b, d, cfg.solver_mode, cfg.gamma_bound)
    _rotate(data, sep, "hyperbolic", family, p, q, cs, callback)


def g_mma_sweep(data: np.ndarray, sep: np.ndarray, callback: RotationCallback | None = None) -> None:
    n = data.shape[0] // 2
    for p in range(n):
        for q in range(p, n):
            if p == q:
                _mma_givens(data, sep, "phase", p, p, callback)
            else:
                _mma_givens(data, sep, "direct", p, q, callback)
                _mma_givens(data, sep, "cross", p, q, callback)


def hg_mma_sweep(data: np.ndarray, sep: np.ndarray, cfg: AlgorithmConfig, callback: RotationCallback | None = None) -> None:
    n = data.shape[0] // 2
    for p in range(n):
        for q in range(p, n):
            if p == q:
                _mma_givens(data, sep, "phase", p, p, callback)
                continue
            for family in ("direct", "cross"):
                _mma_hyperbolic(data, sep, family, p, q, cfg, callback)
                _mma_givens(data, sep, family, p, q, callback)
    apply_normalization(data, sep, mma.compute_normalization(data))
    if callback is not None:
        callback(data)


def g_ama_sweep(data: np.ndarray, sep: np.ndarray, d: float, cfg: AlgorithmConfig, callback=None) -> None:
    n = data.shape[0] // 2
    for p in range(n - 1):
        for q in range(p + 1, n):
            for family in ("direct", "cross"):
                _ama_givens(data, sep, family, p, q, d, cfg, callback)


def hg_ama_sweep(data: np.ndarray, sep: np.ndarray, d: float, cfg: AlgorithmConfig, callback=None) -> None:
    n = data.shape[0] // 2
    for p in range(n - 1):
        for q in range(p + 1, n):
            for family in ("direct", "cross"):
                _ama_hyperbolic(data, sep, family, p, q, d, cfg, callback)
                _ama_givens(data, sep, family, p, q, d, cfg, callback)


def _all_rows(data: np.ndarray) -> range:
    return range(data.shape[0])


def _run(data, cfg: AlgorithmConfig, constellation: ConstellationSpec, callback) -> SeparationReport:
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] % 2:
        raise ValueError("expected a real-stacked block with an even number of rows")
    n = data.shape[0] // 2
    sep = identity_separator(n)
    d = constellation.half_spacing
    costs, history = [], []
    t0 = time.perf_counter()
    for sweep in range(1, cfg.n_sweeps + 1):
        if cfg.algorithm == "hg_mma":
            # hyperbolic steps taken on still-mixed data tend to pull two
            # outputs towards the same source; let Givens sweeps go first
            if sweep <= cfg.hyperbolic_warmup:
                g_mma_sweep(data, sep, callback)
            else:
                hg_mma_sweep(data, sep, cfg, callback)
            cost = mma.mm_cost(data, 1.0)
        elif cfg.algorithm == "g_mma" or sweep <= cfg.n_warmstart:
            g_mma_sweep(data, sep, callback)
            cost = mma.mm_cost(data, constellation.dispersion)
        elif cfg.algorithm == "g_ama":
            g_ama_sweep(data, sep, d, cfg, callback)
            cost = ama.ama_cost(data, _all_rows(data), d)
        else:
            hg_ama_sweep(data, sep, d, cfg, callback)
            cost = ama.ama_cost(data, _all_rows(data), d)
        enforce_structure(sep)
        costs.append(cost)
        history.append(sep.copy())
    elapsed = time.perf_counter() - t0
    return SeparationReport(
        separator=sep,
        separated=unstack(data),
        cost_per_sweep=np.array(costs),
        wall_time=elapsed,
        separator_history=history,
    )


def _checked(cfg: AlgorithmConfig, expected: str) -> AlgorithmConfig:
    if cfg.algorithm != expected:
        raise ValueError(f"config is for {cfg.algorithm!r}, not {expected!r}")
    return cfg


def run_g_mma(data, cfg: AlgorithmConfig, constellation: ConstellationSpec, callback: RotationCallback | None = None):
    """Givens MMA on a whitened stacked block (mutated in place).

    ``callback`` is called with the data after every applied rotation.
    """
    return _run(data, _checked(cfg, "g_mma"), constellation, callback)


def run_hg_mma(data, cfg: AlgorithmConfig, constellation: ConstellationSpec, callback: RotationCallback | None = None):
    return _run(data, _checked(cfg, "hg_mma"), constellation, callback)


def run_g_ama(data, cfg: AlgorithmConfig, constellation: ConstellationSpec, callback: RotationCallback | None = None):
    return _run(data, _checked(cfg, "g_ama"), constellation, callback)


def run_hg_ama(data, cfg: AlgorithmConfig, constellation: ConstellationSpec, callback: RotationCallback | None = None):
    return _run(data, _checked(cfg, "hg_ama"), constellation, callback)


RUNNERS = {"g_mma": run_g_mma, "hg_mma": run_hg_mma, "g_ama": run_g_ama, "hg_ama": run_hg_ama}


def separate(
    received: np.ndarray,
    n_sources: int,
    constellation: ConstellationSpec,
    cfg: AlgorithmConfig,
    callback: RotationCallback | None = None,
) -> SeparationReport:
    """Whiten ``received``, run the configured algorithm and attach ``W = V B``."""
    whitener = fit_whitener(received, n_sources, cfg.whitening_mode)
    data = stack(apply_whitener(whitener, received))
    report = RUNNERS[cfg.algorithm](data, cfg, constellation, callback)
    report.whitener = whitener
    report.combined_w = report.v @ whitener.matrix_b
    return report
