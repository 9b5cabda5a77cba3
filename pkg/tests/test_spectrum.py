"""Correlation conventions: FFT fast path against frozen brute-force values."""

import numpy as np
import pytest

from pslwave.constellation import ConstellationSpec
from pslwave.spectrum import (
    LagWeights,
    SymbolGrid,
    cyclic_correlations,
    dft,
    idft,
    peak_sidelobe,
    psl_db,
)

# QPSK labels drawn once from default_rng(12345); the correlation values below
# were frozen from the raw double-sum reference on this grid
FROZEN_LABELS = np.array(
    [[2, 0], [3, 1], [0, 3], [2, 2], [3, 1], [3, 1], [2, 2], [0, 0]]
)


def frozen_grid() -> SymbolGrid:
    spec = ConstellationSpec("psk", 4)
    return SymbolGrid(spec.points[FROZEN_LABELS])


class TestSymbolGrid:
    def test_stacked_is_antenna_by_antenna(self):
        g = SymbolGrid(np.arange(6).reshape(3, 2) + 0j)
        assert np.array_equal(g.stacked(), [0, 2, 4, 1, 3, 5])

    def test_stacked_round_trip(self):
        rng = np.random.default_rng(0)
        g = SymbolGrid(rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3)))
        back = SymbolGrid.from_stacked(g.stacked(), 5)
        assert np.array_equal(back.symbols, g.symbols)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SymbolGrid(np.array([[np.inf, 0.0]]))

    def test_energy(self):
        g = SymbolGrid(np.full((4, 2), 1 + 1j))
        assert g.energy() == pytest.approx(16.0)


class TestDft:
    def test_forward_is_unnormalized(self):
        v = np.zeros(8)
        v[0] = 1.0
        assert np.allclose(dft(v), np.ones(8))
        assert np.allclose(dft(np.ones(8))[0], 8.0)

    def test_idft_inverts(self):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        assert np.allclose(idft(dft(v)), v)


class TestCyclicCorrelations:
    def test_frozen_values(self):
        r = cyclic_correlations(frozen_grid()).values
        assert r[0, 0, 0] == pytest.approx(64.0 + 0.0j, abs=1e-9)
        assert r[0, 1, 0] == pytest.approx(16.0 + 16.0j, abs=1e-9)
        assert r[0, 1, 1] == pytest.approx(0.0 - 32.0j, abs=1e-9)
        assert r[0, 1, 2] == pytest.approx(-16.0 - 16.0j, abs=1e-9)
        assert r[1, 0, 0] == pytest.approx(16.0 - 16.0j, abs=1e-9)

    def test_zero_lag_auto_is_scaled_energy(self):
        rng = np.random.default_rng(2)
        g = SymbolGrid(rng.standard_normal((16, 3)) + 1j * rng.standard_normal((16, 3)))
        r = cyclic_correlations(g).values
        n = g.n_subcarriers
        for m in range(3):
            expect = n * np.sum(np.abs(g.symbols[:, m]) ** 2)
            assert r[m, m, 0] == pytest.approx(expect, rel=1e-12)

    def test_conjugate_lag_symmetry(self):
        rng = np.random.default_rng(3)
        g = SymbolGrid(rng.standard_normal((12, 3)) + 1j * rng.standard_normal((12, 3)))
        r = cyclic_correlations(g).values
        n = g.n_subcarriers
        for m in range(3):
            for k in range(3):
                for i in range(n):
                    assert r[m, k, i] == pytest.approx(
                        np.conj(r[k, m, (n - i) % n]), abs=1e-9
                    )


class TestLagWeights:
    def test_window_excludes_zero_lag(self):
        w = LagWeights(8, 4)
        assert np.array_equal(w.weights, [0, 1, 1, 1, 0, 0, 0, 0])

    def test_one_sided(self):
        w = LagWeights(16, 5)
        assert w.weights[1] == 1.0 and w.weights[4] == 1.0
        assert w.weights[15] == 0.0 and w.weights[12] == 0.0

    def test_bounds(self):
        with pytest.raises(ValueError):
            LagWeights(8, 0)
        with pytest.raises(ValueError):
            LagWeights(8, 9)


class TestPeakSidelobe:
    def test_frozen_peak(self):
        eta, argmax = peak_sidelobe(cyclic_correlations(frozen_grid()), LagWeights(8, 4))
        assert eta == pytest.approx(32.0, abs=1e-9)
        assert argmax == (0, 1, 1)

    def test_lexicographic_tie_break(self):
        vals = np.zeros((2, 2, 4), dtype=complex)
        vals[0, 1, 2] = 5.0
        vals[1, 0, 1] = 5.0
        from pslwave.spectrum import CorrelationTensor

        _, argmax = peak_sidelobe(CorrelationTensor(vals), LagWeights(4, 4))
        assert argmax == (0, 1, 2)

    def test_psl_db_reference_is_mean_mainlobe(self):
        g = frozen_grid()
        corr = cyclic_correlations(g)
        w = LagWeights(8, 4)
        # both antennas have unit-modulus symbols: mainlobe = N^2 = 64
        assert psl_db(corr, w) == pytest.approx(20 * np.log10(32.0 / 64.0))
