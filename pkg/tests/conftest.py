"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from qambss.prewhiten import apply_whitener, fit_whitener
from qambss.rotations import stack
from qambss.signal_model import build_constellation, draw_channel, draw_sources, transmit


def make_scenario(seed, order=16, n_tx=3, n_rx=5, n_samples=300, snr_db=30.0, condition_bound=100.0):
    """Draw (spec, channel, sources, received) from one seed."""
    spec = build_constellation(order)
    s_ch, s_src, s_noise = np.random.SeedSequence(seed).spawn(3)
    channel = draw_channel(n_rx, n_tx, condition_bound, rng_seed=s_ch)
    sources = draw_sources(spec, n_tx, n_samples, s_src)
    received = transmit(channel, sources, snr_db, s_noise)
    return spec, channel, sources, received


def whitened_block(seed, **kw):
    """Stacked whitened block plus its scenario."""
    spec, channel, sources, received = make_scenario(seed, **kw)
    w = fit_whitener(received, channel.n_tx)
    return stack(apply_whitener(w, received)), spec


def gaussian_block(seed, n=3, n_s=100):
    """Random stacked block with unit complex power per stream."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((2 * n, n_s)) / np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, title: str, passed: bool, detail: str) -> None:
    """Store (and print) the verdict line of one acceptance criterion."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
