"""Eavesdropper and UE detectors, and empirical ROC construction.

Two blind detectors operate on a multi-antenna sample stream:

* energy: 512-bin spectrogram (hop 548, arbitrary start phase) with a
  240-bin x 4-column sliding window, antennas combined non-coherently;
* correlator: PSS correlation at every sample and every RB-spaced
  frequency hypothesis, plus the best SSS correlation two symbols later.

The correlator time axis is split into blocks of ``CorrelatorSearchSpec.block``
samples. For each block the ``top_k`` strongest PSS hypotheses (over
antennas, frequency offsets and N_ID_2) get the SSS term added; the block
statistic is the best PSS+SSS sum. Block maxima only depend on the samples
the block can see, which lets a signal-plus-noise stream reuse the blocks
of its noise-only twin outside the region the signal touches.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .nr_sync_signals import SEQ_LEN, gen_pss, sss_table
from .ofdm import NR_30KHZ, Numerology, SampleStream, _bins


class DetectorInputError(ValueError):
    pass


# -- energy detector ----------------------------------------------------------

@dataclass(frozen=True)
class EnergyWindowSpec:
    width_subcarriers: int = 240
    width_symbols: int = 4
    freq_step: int = 12
    time_step: int = 1
    hop: int = 548

    def __post_init__(self):
        if self.freq_step < 1 or self.time_step < 1 or self.hop < 1:
            raise ValueError("window steps must be >= 1")


def spectrogram(samples: np.ndarray, num: Numerology = NR_30KHZ, hop: int = 548,
                start: int = 0) -> np.ndarray:
    """Per-antenna power spectrogram (ports, frames, bins), bins in centered order."""
    x = np.atleast_2d(samples)
    n = num.fft_size
    n_frames = (x.shape[1] - start - n) // hop + 1
    if n_frames < 1:
        raise DetectorInputError("stream shorter than one FFT frame")
    idx = start + hop * np.arange(n_frames)[:, None] + np.arange(n)[None, :]
    spec = sfft.fftshift(sfft.fft(x[:, idx], axis=-1, norm="ortho"), axes=-1)
    return spec.real ** 2 + spec.imag ** 2


def energy_statistic(stream: SampleStream, spec: EnergyWindowSpec = EnergyWindowSpec(),
                     num: Numerology = NR_30KHZ, start_offset: int = 0) -> float:
    """Maximum windowed energy over all time/frequency window positions."""
    x = stream.samples
    n = num.fft_size
    if x.shape[1] - start_offset < n + (spec.width_symbols - 1) * spec.hop:
        raise DetectorInputError("stream shorter than one energy window")
    if spec.width_subcarriers > n:
        raise DetectorInputError("window wider than the FFT band")
    power = spectrogram(x, num, spec.hop, start_offset).sum(axis=0)  # (frames, bins)
    cf = np.concatenate([np.zeros((power.shape[0], 1)), np.cumsum(power, axis=1)], axis=1)
    f0 = np.arange(0, n - spec.width_subcarriers + 1, spec.freq_step)
    band = cf[:, f0 + spec.width_subcarriers] - cf[:, f0]             # (frames, nf)
    ct = np.concatenate([np.zeros((1, band.shape[1])), np.cumsum(band, axis=0)], axis=0)
    t0 = np.arange(0, power.shape[0] - spec.width_symbols + 1, spec.time_step)
    win = ct[t0 + spec.width_symbols] - ct[t0]
    return float(max(win.max(), 0.0))


# -- correlators ----------------------------------------------------------------

SSS_LAG = 2 * (NR_30KHZ.fft_size + NR_30KHZ.cp_short)  # PSS -> SSS useful-part distance

_FFT = 8192
_GROUP_BLOCKS = 3


@dataclass(frozen=True)
class CorrelatorSearchSpec:
    """Hypothesis set of the blind PSS/SSS correlator.

    ``freq_offsets`` are centered-bin positions of the first PSS subcarrier;
    ``None`` means every RB (12-bin step) across the band.
    """
    freq_offsets: tuple[int, ...] | None = None
    n_id_2: tuple[int, ...] = (0, 1, 2)
    n_id_1: tuple[int, ...] | None = None
    use_sss: bool = True
    top_k: int = 8
    block: int = 2048

    def __post_init__(self):
        if not self.n_id_2 or (self.freq_offsets is not None and not self.freq_offsets):
            raise ValueError("hypothesis sets must be nonempty")
        if self.n_id_1 is not None and not self.n_id_1:
            raise ValueError("hypothesis sets must be nonempty")
        if _GROUP_BLOCKS * self.block + NR_30KHZ.fft_size - 1 > _FFT:
            raise ValueError("block too large for the correlation FFT")

    def offsets(self, num: Numerology = NR_30KHZ) -> np.ndarray:
        if self.freq_offsets is None:
            return np.arange(0, num.fft_size - SEQ_LEN + 1, 12)
        return np.asarray(self.freq_offsets, dtype=int)

    def hypotheses(self, num: Numerology = NR_30KHZ) -> list[tuple[int, int]]:
        """(n_id_2, offset) pairs in search order."""
        return [(n2, int(k)) for n2 in self.n_id_2 for k in self.offsets(num)]

    def span(self, num: Numerology = NR_30KHZ) -> int:
        """Samples one hypothesis starting at t looks at."""
        return (SSS_LAG if self.use_sss else 0) + num.fft_size


def pss_reference(n_id_2: int, offset: int, num: Numerology = NR_30KHZ) -> np.ndarray:
    """One OFDM symbol (no CP) carrying only the PSS at ``offset``; energy 127."""
    spec = np.zeros(num.fft_size, dtype=np.complex128)
    spec[_bins(SEQ_LEN, offset, num)] = gen_pss(n_id_2)
    return np.fft.ifft(spec, norm="ortho")


@lru_cache(maxsize=16)
def _reference_spectra(hyps: tuple[tuple[int, int], ...], num: Numerology) -> np.ndarray:
    refs = np.stack([pss_reference(n2, k, num) for n2, k in hyps])
    return np.conj(sfft.fft(refs, n=_FFT, axis=-1)).astype(np.complex64)


def pss_correlation(samples: np.ndarray, t: int, offset: int, n_id_2: int,
                    num: Numerology = NR_30KHZ, noise_var: float = 1.0) -> np.ndarray:
    """Normalized PSS term |<x[t:t+512], ref>|^2 / (127 noise_var) per antenna."""
    x = np.atleast_2d(samples)[:, t:t + num.fft_size]
    c = x @ np.conj(pss_reference(n_id_2, offset, num))
    return np.abs(c) ** 2 / (SEQ_LEN * noise_var)


def _sss_terms(x: np.ndarray, cands, hyps, spec: CorrelatorSearchSpec, num: Numerology) -> np.ndarray:
    """Best normalized SSS correlation for each (port, hyp, t) candidate."""
    ports, hidx, ts = cands
    n = num.fft_size
    idx = ts[:, None] + SSS_LAG + np.arange(n)[None, :]
    w = x[ports[:, None], idx]
    Y = np.fft.fft(w, axis=-1, norm="ortho")
    out = np.empty(len(ts))
    n1 = None if spec.n_id_1 is None else np.asarray(spec.n_id_1)
    for j, h in enumerate(hidx):
        n2, k0 = hyps[h]
        table = sss_table(n2) if n1 is None else sss_table(n2)[:, n1]
        y = Y[j, _bins(SEQ_LEN, k0, num)]
        out[j] = np.max(np.abs(y @ table) ** 2) / SEQ_LEN
    return out


def n_correlator_blocks(n_samples: int, spec: CorrelatorSearchSpec,
                        num: Numerology = NR_30KHZ) -> int:
    n_t = n_samples - spec.span(num) + 1
    if n_t < 1:
        raise DetectorInputError("stream shorter than one correlator hypothesis")
    return -(-n_t // spec.block)


def correlator_blocks(samples: np.ndarray, spec: CorrelatorSearchSpec = CorrelatorSearchSpec(),
                      num: Numerology = NR_30KHZ, noise_var: float = 1.0,
                      groups=None, out: np.ndarray | None = None) -> np.ndarray:
    """Per-block correlator statistics.

    ``groups`` restricts work to the given groups of three consecutive blocks;
    other entries of ``out`` are left untouched.
    """
    x = np.atleast_2d(samples) / np.sqrt(noise_var)
    T = x.shape[1]
    B = spec.block
    n_blocks = n_correlator_blocks(T, spec, num)
    t_max = T - spec.span(num)
    hyps = tuple(spec.hypotheses(num))
    ref = _reference_spectra(hyps, num)
    G = _GROUP_BLOCKS * B
    if out is None:
        out = np.full(n_blocks, -np.inf)
    if groups is None:
        groups = range(-(-n_blocks // _GROUP_BLOCKS))
    ports = x.shape[0]
    H = len(hyps)
    for g in groups:
        t0 = g * G
        seg = np.zeros((ports, _FFT), dtype=np.complex64)
        chunk = x[:, t0:t0 + _FFT]
        seg[:, :chunk.shape[1]] = chunk
        X = sfft.fft(seg, axis=-1)
        valid = min(G, t_max - t0 + 1)
        bmax = np.full((ports, H, _GROUP_BLOCKS), -np.inf)
        barg = np.zeros((ports, H, _GROUP_BLOCKS), dtype=np.int64)
        for p in range(ports):
            c = sfft.ifft(X[p][None, :] * ref, axis=-1, overwrite_x=True)[:, :G]
            pw = (c.real ** 2 + c.imag ** 2) * (1.0 / SEQ_LEN)
            pw[:, valid:] = -np.inf
            pw = pw.reshape(H, _GROUP_BLOCKS, B)
            barg[p] = pw.argmax(axis=-1)
            bmax[p] = np.take_along_axis(pw, barg[p][..., None], axis=-1)[..., 0]
        for j in range(_GROUP_BLOCKS):
            b = g * _GROUP_BLOCKS + j
            if b >= n_blocks:
                break
            vals = bmax[:, :, j].ravel()
            k = min(spec.top_k, vals.size)
            top = np.argpartition(-vals, k - 1)[:k]
            top = top[np.isfinite(vals[top])]
            if top.size == 0:
                continue
            stat = vals[top].astype(np.float64)
            if spec.use_sss:
                pp, hh = np.unravel_index(top, (ports, H))
                tt = t0 + j * B + barg[pp, hh, j]
                stat = stat + _sss_terms(x, (pp, hh, tt), hyps, spec, num)
            out[b] = stat.max()
    return out


def groups_touching(intervals, n_samples: int, spec: CorrelatorSearchSpec,
                    num: Numerology = NR_30KHZ) -> list[int]:
    """Block groups whose FFT segment overlaps any [start, stop) sample interval.

    The segment is wider than the hypotheses of the group, so groups not
    listed here are bit-identical for any two streams that differ only
    inside the intervals.
    """
    n_groups = -(-n_correlator_blocks(n_samples, spec, num) // _GROUP_BLOCKS)
    G = _GROUP_BLOCKS * spec.block
    out = set()
    for a, b in intervals:
        if b <= a:
            continue
        lo = max(0, -(-(a - _FFT + 1) // G))
        hi = min(n_groups - 1, (b - 1) // G)
        out.update(range(lo, hi + 1))
    return sorted(out)


def correlator_statistic(stream: SampleStream, spec: CorrelatorSearchSpec = CorrelatorSearchSpec(),
                         num: Numerology = NR_30KHZ, noise_var: float = 1.0) -> float:
    """Blind PSS(+SSS) correlator: max over antennas, time, frequency and cell-ID hypotheses."""
    return float(max(correlator_blocks(stream.samples, spec, num, noise_var).max(), 0.0))


def ue_search_spec(known_offset: int, n_id_2=(0, 1, 2), n_id_1=None,
                   use_sss: bool = True) -> CorrelatorSearchSpec:
    return CorrelatorSearchSpec(freq_offsets=(int(known_offset),), n_id_2=tuple(n_id_2),
                                n_id_1=None if n_id_1 is None else tuple(n_id_1),
                                use_sss=use_sss)


def ue_correlator_statistic(stream: SampleStream, known_offset: int, num: Numerology = NR_30KHZ,
                            noise_var: float = 1.0, n_id_2=(0, 1, 2), n_id_1=None) -> float:
    """The correlator with the frequency hypothesis pinned to the SSB raster position."""
    return correlator_statistic(stream, ue_search_spec(known_offset, n_id_2, n_id_1), num, noise_var)



def coherent_gain_db(snr_re_db: float, n_draws: int, rng: np.random.Generator,
                     offset: int = 192, n_id_2: int = 0, num: Numerology = NR_30KHZ) -> float:
    """Measured PSS correlator processing gain on single-antenna AWGN.

    A clean PSS symbol with per-RE SNR ``snr_re_db`` is embedded in unit
    noise and the normalized correlation is read at the true hypothesis. The
    gain is the output signal-to-noise ratio (peak minus noise floor, over
    the noise floor) divided by the per-RE input SNR; it tends to 127.
    """
    a = 10 ** (snr_re_db / 20)
    ref = pss_reference(n_id_2, offset, num)
    n = num.fft_size
    peaks = np.empty(n_draws)
    floor = np.empty(n_draws)
    for i in range(n_draws):
        w = (rng.standard_normal((1, 2 * n)) + 1j * rng.standard_normal((1, 2 * n))) / np.sqrt(2)
        floor[i] = pss_correlation(w, n, offset, n_id_2, num)[0]
        w[0, :n] += a * ref
        peaks[i] = pss_correlation(w, 0, offset, n_id_2, num)[0]
    out_snr = (peaks.mean() - floor.mean()) / floor.mean()
    return float(10 * np.log10(out_snr) - snr_re_db)


# -- ROC ----------------------------------------------------------------------

@dataclass(frozen=True)
class RocCurve:
    pfa: np.ndarray
    pd: np.ndarray
    n_h0: int
    n_h1: int

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.pfa, self.pd])

    def __len__(self) -> int:
        return len(self.pfa)


def roc_curve(h0_stats, h1_stats) -> RocCurve:
    """Exact empirical ROC: one threshold per observed statistic value plus +inf."""
    h0 = np.sort(np.asarray(h0_stats, dtype=float))
    h1 = np.sort(np.asarray(h1_stats, dtype=float))
    if h0.size == 0 or h1.size == 0:
        raise ValueError("ROC needs nonempty H0 and H1 statistics")
    thr = np.unique(np.concatenate([h0, h1]))
    pfa = (h0.size - np.searchsorted(h0, thr, side="left")) / h0.size
    pd = (h1.size - np.searchsorted(h1, thr, side="left")) / h1.size
    pts = np.unique(np.column_stack([np.r_[0.0, pfa], np.r_[0.0, pd]]), axis=0)
    return RocCurve(pfa=pts[:, 0], pd=pts[:, 1], n_h0=int(h0.size), n_h1=int(h1.size))


def auc(curve: RocCurve) -> float:
    return float(np.trapezoid(curve.pd, curve.pfa))


def pd_at_pfa(curve: RocCurve, pfa: float) -> float:
    """Best PD among operating points whose PFA does not exceed ``pfa``."""
    ok = curve.pfa <= pfa + 1e-12
    return float(curve.pd[ok].max())
