"""Blind separation of square-QAM MIMO mixtures with Givens and hyperbolic rotations."""

from .metrics import (
    DegenerateSeparationError,
    GlobalSystem,
    compute_sinr,
    demap_and_ser,
    resolve_ambiguity,
)
from .prewhiten import DegenerateDataError, Whitener, apply_whitener, fit_whitener
from .separation import (
    ALGORITHMS,
    AlgorithmConfig,
    SeparationReport,
    run_g_ama,
    run_g_mma,
    run_hg_ama,
    run_hg_mma,
    separate,
)
from .signal_model import (
    ChannelGenerationError,
    ChannelInstance,
    ConstellationSpec,
    build_constellation,
    draw_channel,
    draw_sources,
    transmit,
)

__all__ = [
    "ALGORITHMS",
    "AlgorithmConfig",
    "ChannelGenerationError",
    "ChannelInstance",
    "ConstellationSpec",
    "DegenerateDataError",
    "DegenerateSeparationError",
    "GlobalSystem",
    "SeparationReport",
    "Whitener",
    "apply_whitener",
    "build_constellation",
    "compute_sinr",
    "demap_and_ser",
    "draw_channel",
    "draw_sources",
    "fit_whitener",
    "resolve_ambiguity",
    "run_g_ama",
    "run_g_mma",
    "run_hg_ama",
    "run_hg_mma",
    "separate",
    "transmit",
]
