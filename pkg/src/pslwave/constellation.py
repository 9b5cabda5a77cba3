"""Reference symbol grids: Gray-mapped PSK/QAM, sub-carrier masks, baselines.

Bit labeling is fixed here (the standards leave it open) so BER results are
reproducible:

* PSK: constellation position ``k`` (counterclockwise, ``k = 0..Q-1``) sits at
  angle ``2*pi*(k + 0.5)/Q`` and carries the binary-reflected Gray label
  ``k ^ (k >> 1)`` read MSB-first.  QPSK therefore maps bits ``00`` to
  ``exp(1j*pi/4)``.
* Square QAM: the first half of the bits selects the real level, the second
  half the imaginary level; levels ``-(sqrt(Q)-1), ..., sqrt(Q)-1`` (step 2)
  are Gray-labeled the same way.  16QAM maps bits ``0000`` to ``-3-3j``.

QAM points are left unnormalized (odd-integer coordinates) so the disc
projector's radius ``eps_r = 2*rho`` applies literally; average-power scaling
happens only where a transmit SNR is defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .spectrum import SymbolGrid

__all__ = [
    "ConstellationSpec",
    "SubcarrierMask",
    "modulate",
    "demodulate",
    "random_bits",
    "random_reference_grid",
    "orthogonal_interleaved_grid",
    "sum_rate_loss",
]


def _gray(n: int) -> int:
    return n ^ (n >> 1)


@dataclass(frozen=True)
class ConstellationSpec:
    family: str  # "psk" or "qam"
    order: int
    rho: float = 0.15
    eps_a: float = 0.2

    def __post_init__(self):
        if self.family not in ("psk", "qam"):
            raise ValueError("family must be 'psk' or 'qam'")
        q = self.order
        if q < 2 or q & (q - 1):
            raise ValueError("order must be a power of two >= 2")
        if self.family == "qam":
            root = int(round(np.sqrt(q)))
            if root * root != q:
                raise ValueError("QAM order must be a perfect square")
        if not 0.0 < self.rho < 0.5:
            raise ValueError("rho must lie in (0, 0.5)")
        if self.eps_a < 0:
            raise ValueError("eps_a must be nonnegative")

    @property
    def bits_per_symbol(self) -> int:
        return int(self.order).bit_length() - 1

    @property
    def eps_p(self) -> float:
        """PSK phase tolerance: rho times the angular spacing 2*pi/Q."""
        return 2.0 * np.pi * self.rho / self.order

    @property
    def eps_r(self) -> float:
        """QAM disc radius: rho times the minimum point distance 2."""
        return 2.0 * self.rho

    @cached_property
    def points(self) -> np.ndarray:
        """Constellation points indexed by their Gray bit label."""
        q = self.order
        table = np.empty(q, dtype=complex)
        if self.family == "psk":
            for k in range(q):
                table[_gray(k)] = np.exp(2j * np.pi * (k + 0.5) / q)
        else:
            root = int(round(np.sqrt(q)))
            half = self.bits_per_symbol // 2
            pam = np.empty(root)
            for level in range(root):
                pam[_gray(level)] = 2 * level - (root - 1)
            for li in range(root):
                for lq in range(root):
                    table[(li << half) | lq] = pam[li] + 1j * pam[lq]
        table.setflags(write=False)
        return table

    @property
    def mean_symbol_energy(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))


@dataclass
class SubcarrierMask:
    """Per-antenna used/unused sub-carrier partition; ``used`` is N x M boolean."""

    used: np.ndarray

    def __post_init__(self):
        self.used = np.asarray(self.used, dtype=bool)
        if self.used.ndim != 2:
            raise ValueError("used must be an N x M boolean matrix")

    @property
    def n_used(self) -> int:
        return int(np.count_nonzero(self.used))

    @classmethod
    def all_used(cls, n_subcarriers: int, n_antennas: int) -> "SubcarrierMask":
        return cls(np.ones((n_subcarriers, n_antennas), dtype=bool))

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        n_subcarriers: int,
        n_antennas: int,
        unused_fraction: float = 0.05,
    ) -> "SubcarrierMask":
        n_un = int(round(unused_fraction * n_subcarriers))
        used = np.ones((n_subcarriers, n_antennas), dtype=bool)
        for m in range(n_antennas):
            idx = rng.choice(n_subcarriers, size=n_un, replace=False)
            used[idx, m] = False
        return cls(used)

    @classmethod
    def edge_guard(
        cls,
        n_subcarriers: int,
        n_antennas: int,
        unused_fraction: float = 0.05,
    ) -> "SubcarrierMask":
        """Fixed alternative placement: unused carriers split between the band edges."""
        n_un = int(round(unused_fraction * n_subcarriers))
        used = np.ones((n_subcarriers, n_antennas), dtype=bool)
        lo = n_un // 2
        hi = n_un - lo
        if lo:
            used[:lo, :] = False
        if hi:
            used[-hi:, :] = False
        return cls(used)


def random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.int8)


def _bits_to_labels(bits: np.ndarray, bps: int) -> np.ndarray:
    groups = np.asarray(bits, dtype=np.int64).reshape(-1, bps)
    weights = 1 << np.arange(bps - 1, -1, -1)
    return groups @ weights


def _labels_to_bits(labels: np.ndarray, bps: int) -> np.ndarray:
    shifts = np.arange(bps - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).astype(np.int8).ravel()


def modulate(
    bits: np.ndarray,
    spec: ConstellationSpec,
    mask: SubcarrierMask,
) -> SymbolGrid:
    """Map bits onto the used sub-carriers (stacked order); unused entries are 0."""
    bps = spec.bits_per_symbol
    bits = np.asarray(bits)
    if bits.size != bps * mask.n_used:
        raise ValueError(
            f"need {bps * mask.n_used} bits for this mask, got {bits.size}"
        )
    labels = _bits_to_labels(bits, bps)
    symbols = np.zeros(mask.used.shape, dtype=complex)
    # column-major (antenna-by-antenna) fill matches the stacked vector order
    flat_used = mask.used.reshape(-1, order="F")
    flat = symbols.reshape(-1, order="F")
    flat[flat_used] = spec.points[labels]
    return SymbolGrid(flat.reshape(mask.used.shape, order="F"))


def demodulate(
    grid: SymbolGrid | np.ndarray,
    spec: ConstellationSpec,
    mask: SubcarrierMask,
) -> np.ndarray:
    """Hard-decision (minimum distance) demodulation of the used entries."""
    symbols = grid.symbols if isinstance(grid, SymbolGrid) else np.asarray(grid)
    z = symbols.reshape(-1, order="F")[mask.used.reshape(-1, order="F")]
    dist = np.abs(z[:, None] - spec.points[None, :])
    labels = np.argmin(dist, axis=1)
    return _labels_to_bits(labels, spec.bits_per_symbol)


def random_reference_grid(
    rng: np.random.Generator,
    spec: ConstellationSpec,
    mask: SubcarrierMask,
) -> tuple[SymbolGrid, np.ndarray]:
    """Draw a random data grid; returns (grid, bits)."""
    bits = random_bits(rng, spec.bits_per_symbol * mask.n_used)
    return modulate(bits, spec, mask), bits


def orthogonal_interleaved_grid(
    rng: np.random.Generator,
    spec: ConstellationSpec,
    n_subcarriers: int,
    n_antennas: int,
) -> SymbolGrid:
    """Baseline: antenna m occupies sub-carriers m, m+M, m+2M, ... only.

    Disjoint frequency supports make every cross-correlation identically
    zero, at the cost of each antenna carrying only N/M data symbols.
    """
    symbols = np.zeros((n_subcarriers, n_antennas), dtype=complex)
    for m in range(n_antennas):
        idx = np.arange(m, n_subcarriers, n_antennas)
        labels = rng.integers(0, spec.order, size=idx.size)
        symbols[idx, m] = spec.points[labels]
    return SymbolGrid(symbols)


def sum_rate_loss(n_subcarriers: int, n_antennas: int, n_unused: int) -> float:
    """Sum-rate loss of the interleaved baseline vs. a full grid with n_unused idle carriers."""
    return 1.0 - (n_subcarriers / n_antennas) / (n_subcarriers - n_unused)
