import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qambss.signal_model import (
    SUPPORTED_ORDERS,
    ChannelGenerationError,
    build_constellation,
    draw_channel,
    draw_sources,
    noise_variance,
    transmit,
)


class TestConstellation:
    @pytest.mark.parametrize(
        "order, m2, m4, scale",
        [(16, 5.0, 41.0, 1 / np.sqrt(10)), (64, 21.0, 777.0, 1 / np.sqrt(42))],
    )
    def test_lattice_moments(self, order, m2, m4, scale):
        spec = build_constellation(order)
        lattice = spec.levels / spec.scale
        assert np.mean(lattice**2) == pytest.approx(m2)
        assert np.mean(lattice**4) == pytest.approx(m4)
        assert spec.scale == pytest.approx(scale)
        # unnormalized dispersion m4/m2, then scaled by c^2
        assert spec.dispersion == pytest.approx(m4 / m2 * scale**2)

    def test_dispersion_values(self):
        assert build_constellation(16).dispersion == pytest.approx(8.2 / 10)
        assert build_constellation(64).dispersion == pytest.approx(37 / 42)

    def test_qpsk_is_unit_modulus(self):
        spec = build_constellation(4)
        assert np.allclose(np.abs(spec.alphabet), 1.0)
        assert spec.dispersion == pytest.approx(0.5)

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_unit_average_power(self, order):
        spec = build_constellation(order)
        assert np.mean(np.abs(spec.alphabet) ** 2) == pytest.approx(1.0)
        assert spec.alphabet.size == order

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_min_distance_is_twice_half_spacing(self, order):
        spec = build_constellation(order)
        a = spec.alphabet
        dist = np.abs(a[:, None] - a[None, :])
        np.fill_diagonal(dist, np.inf)
        assert dist.min() == pytest.approx(2 * spec.half_spacing)

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_alphabet_symmetry(self, order):
        a = set(np.round(build_constellation(order).alphabet, 12))
        for op in (np.conj, lambda z: -z, lambda z: 1j * z):
            assert set(np.round(op(np.array(sorted(a, key=lambda z: (z.real, z.imag)))), 12)) == a

    @pytest.mark.parametrize("order", [2, 8, 32, 0])
    def test_unsupported_order(self, order):
        with pytest.raises(ValueError):
            build_constellation(order)


class TestSources:
    def test_power_near_one(self):
        spec = build_constellation(16)
        s = draw_sources(spec, 4, 20000, rng_seed=3)
        assert np.mean(np.abs(s) ** 2) == pytest.approx(1.0, rel=0.03)

    def test_symbols_in_alphabet(self):
        spec = build_constellation(64)
        s = draw_sources(spec, 2, 500, rng_seed=1)
        alphabet = spec.alphabet
        assert np.abs(s.ravel()[:, None] - alphabet[None, :]).min(axis=1).max() < 1e-12

    def test_deterministic(self):
        spec = build_constellation(16)
        a = draw_sources(spec, 3, 50, rng_seed=9)
        b = draw_sources(spec, 3, 50, rng_seed=9)
        c = draw_sources(spec, 3, 50, rng_seed=10)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            draw_sources(build_constellation(4), 0, 10, 0)


class TestChannel:
    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**31), n_tx=st.integers(1, 5), extra=st.integers(0, 3))
    def test_condition_bound_respected(self, seed, n_tx, extra):
        ch = draw_channel(n_tx + extra, n_tx, 100.0, rng_seed=seed)
        assert ch.mixing.shape == (n_tx + extra, n_tx)
        assert np.linalg.cond(ch.mixing) <= 100.0

    def test_tight_bound_raises(self):
        with pytest.raises(ChannelGenerationError):
            draw_channel(4, 4, 1.0001, rng_seed=0, max_retries=20)

    def test_infinite_bound_accepts_first_draw(self):
        rng = np.random.default_rng(5)
        first = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) / np.sqrt(2.0)
        ch = draw_channel(3, 3, np.inf, rng_seed=5)
        assert np.array_equal(ch.mixing, first)

    def test_entry_variance(self):
        ch = draw_channel(200, 100, np.inf, rng_seed=2)
        assert np.mean(np.abs(ch.mixing) ** 2) == pytest.approx(1.0, rel=0.03)
        assert abs(np.mean(ch.mixing)) < 0.02

    @pytest.mark.parametrize("n_rx, n_tx, bound", [(2, 3, 100.0), (3, 0, 100.0), (3, 3, 1.0)])
    def test_invalid_arguments(self, n_rx, n_tx, bound):
        with pytest.raises(ValueError):
            draw_channel(n_rx, n_tx, bound, rng_seed=0)


class TestTransmit:
    def test_noiseless_is_mixing_product(self):
        spec = build_constellation(16)
        ch = draw_channel(5, 3, rng_seed=1)
        s = draw_sources(spec, 3, 100, 2)
        assert np.allclose(transmit(ch, s, np.inf), ch.mixing @ s, atol=0, rtol=0)

    def test_measured_snr(self):
        spec = build_constellation(4)
        ch = draw_channel(1, 1, np.inf, rng_seed=0)
        ch = type(ch)(mixing=np.array([[1.0 + 0j]]))
        s = draw_sources(spec, 1, 100000, 4)
        y = transmit(ch, s, 0.0, rng_seed=8)
        noise = y - s
        measured = 10 * np.log10(np.mean(np.abs(s) ** 2) / np.mean(np.abs(noise) ** 2))
        assert abs(measured) < 0.5

    def test_noise_seed_changes_only_noise(self):
        spec = build_constellation(16)
        ch = draw_channel(4, 2, rng_seed=3)
        s = draw_sources(spec, 2, 2000, 7)
        clean = ch.mixing @ s
        y1, y2 = transmit(ch, s, 10.0, 1), transmit(ch, s, 10.0, 2)
        var = noise_variance(ch, s, 10.0)
        assert not np.allclose(y1, y2)
        for y in (y1, y2):
            assert np.mean(np.abs(y - clean) ** 2) == pytest.approx(var, rel=0.05)

    def test_shape_mismatch(self):
        ch = draw_channel(4, 2, rng_seed=3)
        with pytest.raises(ValueError):
            transmit(ch, np.ones((3, 10)), 10.0, 0)
