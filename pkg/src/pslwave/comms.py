"""Downlink evaluation: flat Rayleigh MIMO channel, zero-forcing receiver, uncoded BER.

The channel H is K x M with iid CN(0, 1) entries, constant across the OFDM
band (frequency-flat).  On sub-carrier n the K receive streams are
H @ X[n, :] plus white noise; the zero-forcing receiver applies the
pseudoinverse of H.  SNR is defined per transmit symbol: Es_avg / sigma_n^2,
where Es_avg is the average energy of the grid's nonzero entries.

BER campaigns compare a reference grid against its sidelobe-optimized
counterpart on the same channel draw and the same noise realization, so the
measured SNR penalty reflects only the symbol perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import ConstellationSpec, SubcarrierMask, demodulate
from .spectrum import SymbolGrid

__all__ = [
    "ChannelRealization",
    "draw_channel",
    "channel_apply",
    "zf_equalize",
    "bit_errors",
    "ber_campaign",
]


@dataclass
class ChannelRealization:
    h: np.ndarray  # (K, M)

    @property
    def n_rx(self) -> int:
        return self.h.shape[0]

    @property
    def n_tx(self) -> int:
        return self.h.shape[1]


def draw_channel(rng: np.random.Generator, n_rx: int, n_tx: int) -> ChannelRealization:
    """iid CN(0, 1) frequency-flat channel matrix."""
    h = (rng.standard_normal((n_rx, n_tx)) + 1j * rng.standard_normal((n_rx, n_tx))) / np.sqrt(2.0)
    return ChannelRealization(h)


def channel_apply(
    grid: SymbolGrid,
    channel: ChannelRealization,
    noise_std: float,
    rng: np.random.Generator,
    noise: np.ndarray | None = None,
) -> np.ndarray:
    """Received (N, K) array: per-subcarrier H @ x plus white noise.

    A pre-drawn noise array may be supplied to pair arms of a comparison.
    """
    received = grid.symbols @ channel.h.T
    if noise is None:
        noise = (
            rng.standard_normal(received.shape) + 1j * rng.standard_normal(received.shape)
        ) / np.sqrt(2.0)
    return received + noise_std * noise


def zf_equalize(received: np.ndarray, channel: ChannelRealization) -> np.ndarray:
    """Zero-forcing estimate of the transmitted grid: (N, M)."""
    return received @ np.linalg.pinv(channel.h).T


def bit_errors(
    estimate: np.ndarray,
    bits: np.ndarray,
    spec: ConstellationSpec,
    mask: SubcarrierMask,
) -> int:
    """Hard-decision bit errors of an equalized grid against the transmitted bits."""
    decided = demodulate(estimate, spec, mask)
    return int(np.count_nonzero(decided != np.asarray(bits)))


def ber_campaign(
    pairs: list[tuple[SymbolGrid, SymbolGrid, np.ndarray]],
    snr_db_list: list[float],
    spec: ConstellationSpec,
    mask: SubcarrierMask,
    rng: np.random.Generator,
    n_rx: int | None = None,
) -> dict[str, np.ndarray]:
    """Uncoded BER vs SNR for (reference, optimized, bits) grid pairs.

    Both arms of each pair share the channel draw and the noise realization
    at every SNR point.  Es_avg is measured on the reference grid; sigma_n is
    set per SNR point as sqrt(Es_avg / snr).  Returns arrays of BER per SNR
    for keys "original" and "optimized".
    """
    n_bits_total = sum(b.size for _, _, b in pairs)
    errors = {"original": np.zeros(len(snr_db_list)), "optimized": np.zeros(len(snr_db_list))}
    for ref, opt, bits in pairs:
        n, m = ref.symbols.shape
        k = n_rx if n_rx is not None else m
        es_avg = ref.energy() / mask.n_used
        channel = draw_channel(rng, k, m)
        for si, snr_db in enumerate(snr_db_list):
            sigma = float(np.sqrt(es_avg / 10.0 ** (snr_db / 10.0)))
            noise = (
                rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
            ) / np.sqrt(2.0)
            for key, grid in (("original", ref), ("optimized", opt)):
                rx = channel_apply(grid, channel, sigma, rng, noise=noise)
                est = zf_equalize(rx, channel)
                errors[key][si] += bit_errors(est, bits, spec, mask)
    return {key: e / n_bits_total for key, e in errors.items()}
