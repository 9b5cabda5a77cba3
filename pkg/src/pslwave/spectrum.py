"""DFT conventions and FFT-based cyclic correlations of multi-antenna OFDM symbol grids.

Conventions, fixed here once and relied on by every other module:

* ``dft(v)[q] = sum_n v[n] exp(-2j pi n q / N)`` -- unnormalized forward
  transform; ``idft`` carries the ``1/N`` factor (numpy's default).
* ``r[m, k, i] = N * sum_n exp(+2j pi n i / N) * x_m[n] * conj(x_k[n])
  = N**2 * idft(x_m * conj(x_k))[i]``.

The second line is the cyclic cross-correlation, at lag ``i``, of the
time-domain waveforms of antennas ``m`` and ``k``, written as a quadratic
form in the stacked frequency-domain symbol vector.  The factor ``N``
relative to the plain pointwise-product IDFT keeps the correlation equal to
that quadratic form exactly, which is what the eigenvalue bounds in the
majorizer assume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SymbolGrid",
    "CorrelationTensor",
    "LagWeights",
    "dft",
    "idft",
    "cyclic_correlations",
    "peak_sidelobe",
    "psl_db",
]


@dataclass
class SymbolGrid:
    """N x M frequency-domain data symbols; column m belongs to antenna m."""

    symbols: np.ndarray

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=complex)
        if self.symbols.ndim != 2:
            raise ValueError("symbols must be an N x M matrix")
        if not np.all(np.isfinite(self.symbols)):
            raise ValueError("symbols must be finite")

    @property
    def n_subcarriers(self) -> int:
        return self.symbols.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.symbols.shape[1]

    def stacked(self) -> np.ndarray:
        """Length-MN vector [x_0; x_1; ...; x_{M-1}], antenna by antenna."""
        return self.symbols.reshape(-1, order="F").copy()

    @classmethod
    def from_stacked(cls, x: np.ndarray, n_subcarriers: int) -> "SymbolGrid":
        x = np.asarray(x, dtype=complex).ravel()
        if x.size % n_subcarriers:
            raise ValueError("stacked length not divisible by n_subcarriers")
        m = x.size // n_subcarriers
        return cls(x.reshape(n_subcarriers, m, order="F"))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.symbols) ** 2))

    def copy(self) -> "SymbolGrid":
        return SymbolGrid(self.symbols.copy())


@dataclass
class CorrelationTensor:
    """values[m, k, i] = cyclic correlation r of antennas (m, k) at lag i."""

    values: np.ndarray

    @property
    def n_antennas(self) -> int:
        return self.values.shape[0]

    @property
    def n_lags(self) -> int:
        return self.values.shape[2]


@dataclass
class LagWeights:
    """Binary lag weights: 1 on lags [1, n_cp - 1], 0 elsewhere (zero lag excluded)."""

    n_lags: int
    n_cp: int
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        if not 1 <= self.n_cp <= self.n_lags:
            raise ValueError("need 1 <= n_cp <= n_lags")
        w = np.zeros(self.n_lags)
        w[1 : self.n_cp] = 1.0
        self.weights = w

    @property
    def mask(self) -> np.ndarray:
        return self.weights.astype(bool)


def dft(v: np.ndarray) -> np.ndarray:
    """Unnormalized DFT, output[q] = sum_n v[n] exp(-2j pi n q / N)."""
    return np.fft.fft(np.asarray(v, dtype=complex))


def idft(v: np.ndarray) -> np.ndarray:
    """Exact inverse of :func:`dft` (carries the 1/N factor)."""
    return np.fft.ifft(np.asarray(v, dtype=complex))


def cyclic_correlations(grid: SymbolGrid) -> CorrelationTensor:
    """All M x M x N cyclic auto-/cross-correlations of the time-domain waveforms.

    One IFFT per antenna pair; the N**2 scale keeps r equal to the stacked
    quadratic form (see module docstring).
    """
    x = grid.symbols  # (N, M)
    n = grid.n_subcarriers
    # prod[m, k, :] = x_m * conj(x_k) over subcarriers
    prod = x.T[:, None, :] * np.conj(x.T)[None, :, :]
    values = n**2 * np.fft.ifft(prod, axis=2)
    return CorrelationTensor(values)


def peak_sidelobe(corr: CorrelationTensor, w: LagWeights) -> tuple[float, tuple[int, int, int]]:
    """Largest weighted |r| and its first (m, k, i) triple in lexicographic order."""
    if corr.n_lags != w.n_lags:
        raise ValueError("correlation tensor and weights disagree on lag count")
    if not np.any(w.mask):
        raise ValueError("all lag weights are zero")
    mag = np.abs(corr.values).copy()
    mag[:, :, ~w.mask] = -1.0
    flat = int(np.argmax(mag))  # first maximum in C order == lexicographic (m, k, i)
    m, k, i = np.unravel_index(flat, mag.shape)
    return float(mag[m, k, i]), (int(m), int(k), int(i))


def psl_db(corr: CorrelationTensor, w: LagWeights) -> float:
    """Peak sidelobe in dB relative to the mean zero-lag autocorrelation."""
    eta, _ = peak_sidelobe(corr, w)
    mainlobe = float(np.mean(np.real(np.diagonal(corr.values[:, :, 0]))))
    if mainlobe <= 0:
        raise ValueError("zero mainlobe; cannot normalize")
    if eta == 0.0:
        return -np.inf
    return 20.0 * np.log10(eta / mainlobe)
