"""CP-OFDM modulation at the 30 kHz / 512-point numerology.

FFT scaling is unitary in both directions, so per-sample noise variance in
time equals per-RE noise variance in frequency.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class OfdmConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Numerology:
    scs_hz: float = 30e3
    fft_size: int = 512
    sample_rate_hz: float = 15.36e6
    cp_long: int = 44
    cp_short: int = 36
    symbols_per_slot: int = 14

    def __post_init__(self):
        if abs(self.fft_size * self.scs_hz - self.sample_rate_hz) > 1e-6:
            raise OfdmConfigError("fft_size * scs must equal the sample rate")

    def cp_length(self, symbol: int) -> int:
        # long CP once every 0.5 ms, i.e. on symbol 0 of every 14-symbol slot
        return self.cp_long if symbol % self.symbols_per_slot == 0 else self.cp_short

    def symbol_length(self, symbol: int) -> int:
        return self.fft_size + self.cp_length(symbol)

    def symbol_start(self, symbol: int) -> int:
        """Sample index where symbol ``symbol`` (CP included) begins."""
        full_slots, rem = divmod(symbol, self.symbols_per_slot)
        per_slot = self.symbols_per_slot * self.fft_size + self.cp_long \
            + (self.symbols_per_slot - 1) * self.cp_short
        start = full_slots * per_slot
        if rem:
            start += self.cp_long + self.fft_size + (rem - 1) * (self.cp_short + self.fft_size)
        return start

    @property
    def samples_per_ms(self) -> int:
        return int(round(self.sample_rate_hz / 1000))


NR_30KHZ = Numerology()


@dataclass
class SampleStream:
    samples: np.ndarray  # (ports, n) complex
    rate: float = NR_30KHZ.sample_rate_hz
    t0: int = 0

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim == 1:
            s = s[None, :]
        if s.ndim != 2:
            raise ValueError("samples must be (ports, n)")
        self.samples = s

    @property
    def n_ports(self) -> int:
        return self.samples.shape[0]

    def __len__(self) -> int:
        return self.samples.shape[1]


def _bins(grid_height: int, subcarrier_offset: int, num: Numerology) -> np.ndarray:
    if subcarrier_offset < 0 or subcarrier_offset + grid_height > num.fft_size:
        raise OfdmConfigError(
            f"grid of {grid_height} subcarriers at offset {subcarrier_offset} "
            f"exceeds the {num.fft_size}-bin band")
    # centered mapping: position j in the shifted spectrum -> FFT bin (j - N/2) mod N
    shifted = subcarrier_offset + np.arange(grid_height)
    return (shifted - num.fft_size // 2) % num.fft_size


def modulate(grid, subcarrier_offset: int, num: Numerology = NR_30KHZ,
             first_symbol: int = 0) -> SampleStream:
    """Map a (subcarriers x symbols) grid, or (ports, sc, sym), to CP-OFDM samples.

    ``first_symbol`` is the index of the grid's first column within the
    slot structure and selects which symbols get the long CP.
    """
    g = np.asarray(grid)
    if g.ndim == 2:
        g = g[None]
    ports, height, n_sym = g.shape
    bins = _bins(height, subcarrier_offset, num)
    n = num.fft_size
    spec = np.zeros((ports, n, n_sym), dtype=np.complex128)
    spec[:, bins, :] = g
    useful = np.fft.ifft(spec, axis=1, norm="ortho")
    pieces = []
    for j in range(n_sym):
        cp = num.cp_length(first_symbol + j)
        sym = useful[:, :, j]
        pieces.append(sym[:, n - cp:])
        pieces.append(sym)
    return SampleStream(np.concatenate(pieces, axis=1), rate=num.sample_rate_hz)


def demodulate(stream: SampleStream, num: Numerology = NR_30KHZ, symbol_count: int = 1,
               first_symbol: int = 0, subcarrier_offset: int | None = None,
               n_subcarriers: int | None = None) -> np.ndarray:
    """CP-stripped unitary FFT per symbol, starting at ``stream.t0``.

    Returns (ports, bins, symbols) in centered order: the full 512-bin band,
    or ``n_subcarriers`` rows starting at ``subcarrier_offset``.
    """
    x = stream.samples
    needed = sum(num.symbol_length(first_symbol + j) for j in range(symbol_count))
    if x.shape[1] - stream.t0 < needed:
        raise ValueError(f"stream holds {x.shape[1] - stream.t0} samples, "
                         f"{symbol_count} symbols need {needed}")
    n = num.fft_size
    pos = stream.t0
    cols = []
    for j in range(symbol_count):
        cp = num.cp_length(first_symbol + j)
        cols.append(x[:, pos + cp: pos + cp + n])
        pos += cp + n
    useful = np.stack(cols, axis=2)
    spec = np.fft.fft(useful, axis=1, norm="ortho")
    if subcarrier_offset is None:
        subcarrier_offset, n_subcarriers = 0, n
    elif n_subcarriers is None:
        raise ValueError("n_subcarriers is required with subcarrier_offset")
    return spec[:, _bins(n_subcarriers, subcarrier_offset, num), :]


# -- debug dumps ----------------------------------------------------------------

def write_iq(path, samples) -> None:
    """Interleaved little-endian float32 I/Q, one port."""
    s = np.asarray(samples).ravel()
    out = np.empty(2 * s.size, dtype="<f4")
    out[0::2] = s.real
    out[1::2] = s.imag
    Path(path).write_bytes(out.tobytes())


def read_iq(path) -> np.ndarray:
    raw = np.frombuffer(Path(path).read_bytes(), dtype="<f4")
    return raw[0::2].astype(np.float64) + 1j * raw[1::2]
