"""PSS/SSS sequence generation, SSB resource-grid mapping and burst scheduling.

Sequence constants follow 3GPP TS 38.211 sections 7.4.2.2 / 7.4.2.3, the
burst pattern follows TS 38.213 section 4.1 (Case B).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

SEQ_LEN = 127
SSB_SUBCARRIERS = 240
SSB_SYMBOLS = 4
SYNC_FIRST_SC = 56
SYMBOLS_PER_HALF_FRAME = 140  # 30 kHz SCS, normal CP

N_ID_1_COUNT = 336
N_ID_2_COUNT = 3


class SyncConfigError(ValueError):
    """Unsupported SSB pattern / numerology requested."""


@dataclass(frozen=True)
class CellIdentity:
    n_id_1: int = 0
    n_id_2: int = 0

    def __post_init__(self):
        if not 0 <= self.n_id_1 < N_ID_1_COUNT:
            raise ValueError(f"n_id_1 must be in [0, 335], got {self.n_id_1}")
        if self.n_id_2 not in (0, 1, 2):
            raise ValueError(f"n_id_2 must be 0, 1 or 2, got {self.n_id_2}")

    @property
    def pci(self) -> int:
        return 3 * self.n_id_1 + self.n_id_2

    @classmethod
    def from_pci(cls, pci: int) -> "CellIdentity":
        if not 0 <= pci <= 1007:
            raise ValueError(f"pci must be in [0, 1007], got {pci}")
        return cls(pci // 3, pci % 3)


def _lfsr7(seed_bits, taps):
    """Run x(i+7) = sum(x(i+t) for t in taps) mod 2 for 127 outputs.

    ``seed_bits`` is ``x(0) .. x(6)``.
    """
    x = np.zeros(SEQ_LEN + 7, dtype=np.int8)
    x[:7] = seed_bits
    for i in range(SEQ_LEN):
        x[i + 7] = x[[i + t for t in taps]].sum() % 2
    return x[:SEQ_LEN]


# seeds are given as x(6)..x(0) in TS 38.211; stored here as x(0)..x(6)
_PSS_M = _lfsr7([0, 1, 1, 0, 1, 1, 1], (4, 0))
_SSS_X0 = _lfsr7([1, 0, 0, 0, 0, 0, 0], (4, 0))
_SSS_X1 = _lfsr7([1, 0, 0, 0, 0, 0, 0], (1, 0))


def gen_pss(n_id_2: int) -> np.ndarray:
    """Primary synchronization sequence d_PSS(n), n = 0..126, values +-1."""
    if n_id_2 not in (0, 1, 2):
        raise ValueError(f"n_id_2 must be 0, 1 or 2, got {n_id_2}")
    n = np.arange(SEQ_LEN)
    return (1 - 2 * _PSS_M[(n + 43 * n_id_2) % SEQ_LEN]).astype(np.int8)


def sss_shifts(n_id_1: int, n_id_2: int) -> tuple[int, int]:
    m0 = 15 * (n_id_1 // 112) + 5 * n_id_2
    m1 = n_id_1 % 112
    return m0, m1


def gen_sss(cell: CellIdentity) -> np.ndarray:
    """Secondary synchronization sequence d_SSS(n) for a cell identity."""
    if not isinstance(cell, CellIdentity):
        raise TypeError("gen_sss expects a CellIdentity")
    m0, m1 = sss_shifts(cell.n_id_1, cell.n_id_2)
    n = np.arange(SEQ_LEN)
    d = (1 - 2 * _SSS_X0[(n + m0) % SEQ_LEN]) * (1 - 2 * _SSS_X1[(n + m1) % SEQ_LEN])
    return d.astype(np.int8)


@lru_cache(maxsize=None)
def sss_table(n_id_2: int) -> np.ndarray:
    """All 336 SSS sequences for one n_id_2 as a (127, 336) float matrix."""
    cols = [gen_sss(CellIdentity(n1, n_id_2)) for n1 in range(N_ID_1_COUNT)]
    table = np.stack(cols, axis=1).astype(np.float64)
    table.setflags(write=False)
    return table


# -- resource grid -----------------------------------------------------------

def _pbch_mask() -> np.ndarray:
    mask = np.zeros((SSB_SUBCARRIERS, SSB_SYMBOLS), dtype=bool)
    mask[:, 1] = True
    mask[:, 3] = True
    mask[:48, 2] = True
    mask[192:, 2] = True
    return mask


PBCH_MASK = _pbch_mask()
PSS_SLICE = slice(SYNC_FIRST_SC, SYNC_FIRST_SC + SEQ_LEN)
SSS_SLICE = PSS_SLICE


def occupancy_mask() -> np.ndarray:
    mask = PBCH_MASK.copy()
    mask[PSS_SLICE, 0] = True
    mask[SSS_SLICE, 2] = True
    return mask


@dataclass(frozen=True)
class SsbGrid:
    grid: np.ndarray  # (240, 4) complex
    cell: CellIdentity


def build_ssb_grid(cell: CellIdentity, rng: np.random.Generator) -> SsbGrid:
    """Map PSS, SSS and QPSK PBCH filler onto a 240 x 4 SSB grid.

    PBCH (DMRS included) carries i.i.d. unit-power QPSK symbols; only the
    energy and the PSS/SSS structure matter to the detectors.
    """
    grid = np.zeros((SSB_SUBCARRIERS, SSB_SYMBOLS), dtype=np.complex128)
    grid[PSS_SLICE, 0] = gen_pss(cell.n_id_2)
    grid[SSS_SLICE, 2] = gen_sss(cell)
    n_pbch = int(PBCH_MASK.sum())
    bits = rng.integers(0, 2, size=(2, n_pbch))
    grid[PBCH_MASK] = ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1])) / np.sqrt(2)
    return SsbGrid(grid=grid, cell=cell)


# -- burst schedule -----------------------------------------------------------

@dataclass(frozen=True)
class BurstSchedule:
    ssb_start_symbols: tuple[int, ...]
    period_ms: float
    n_beams: int

    def __post_init__(self):
        s = self.ssb_start_symbols
        if len(s) != self.n_beams:
            raise SyncConfigError("schedule length does not match n_beams")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise SyncConfigError("SSB start symbols must be strictly increasing")
        if s and s[-1] + SSB_SYMBOLS > SYMBOLS_PER_HALF_FRAME:
            raise SyncConfigError("SSB burst does not fit in the half-frame")


SUPPORTED_PERIODS_MS = (5, 10, 20, 40, 80, 160)


def build_burst_schedule(case: str = "B", scs_hz: float = 30e3,
                         fc_hz: float = 3.5e9, n_beams: int = 8,
                         period_ms: float = 20) -> BurstSchedule:
    """Case B SSB candidate positions {4, 8, 16, 20} + 28 n within a half-frame."""
    if case != "B" or scs_hz != 30e3:
        raise SyncConfigError(f"only Case B at 30 kHz SCS is supported (got case={case!r}, scs={scs_hz})")
    if fc_hz > 6e9:
        raise SyncConfigError("Case B applies to FR1 carriers only")
    if period_ms not in SUPPORTED_PERIODS_MS:
        raise SyncConfigError(f"SSB period must be one of {SUPPORTED_PERIODS_MS} ms")
    l_max = 4 if fc_hz <= 3e9 else 8
    if not 1 <= n_beams <= l_max:
        raise SyncConfigError(f"n_beams must be in [1, {l_max}] for fc={fc_hz / 1e9:g} GHz")
    candidates = [s + 28 * n for n in range(l_max // 4) for s in (4, 8, 16, 20)]
    return BurstSchedule(tuple(candidates[:n_beams]), float(period_ms), n_beams)


# -- golden vectors -------------------------------------------------------------

def write_golden_vectors(path, sequences) -> None:
    """Write +-1 sequences as plain text, one sequence per line."""
    lines = [" ".join(str(int(v)) for v in seq) for seq in sequences]
    Path(path).write_text("\n".join(lines) + "\n")


def read_golden_vectors(path) -> list[np.ndarray]:
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            rows.append(np.array([int(tok) for tok in line.split()], dtype=np.int8))
    return rows
