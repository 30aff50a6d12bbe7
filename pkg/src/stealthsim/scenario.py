"""Monte Carlo campaigns: baseline grid-of-beams sweep vs UL-CSI eigenbeamformed SSB.

Every trial draws one UE/eavesdropper drop, the channels from the three
sectors of the site to both terminals, and one noise realization per
terminal. The noise-only (H0) statistics and the signal-present (H1)
statistics of all requested modes are computed from the same noise, and
the modes share drops, channels and burst timing, so baseline/csi
comparisons are paired.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import partial

import numpy as np

from .beamforming import (UplinkPilotConfig, dft_pilots, eigen_precoder, gob_codebook,
                          ls_estimate, receive_ul_pilot, select_sector, spatial_covariance)
from .channel import (ArrayGeometry, ChannelRealization, DropGeometry, draw_channel,
                      draw_clusters, draw_drop, downlink_of)
from .detection import (CorrelatorSearchSpec, EnergyWindowSpec, RocCurve, correlator_blocks,
                        energy_statistic, groups_touching, roc_curve)
from .nr_sync_signals import (SSB_SUBCARRIERS, SSB_SYMBOLS, CellIdentity, SyncConfigError,
                              build_burst_schedule, build_ssb_grid)
from .ofdm import NR_30KHZ, SampleStream, modulate

THERMAL_NOISE_DBM_HZ = -174.0
RSRP_FLOOR_DBM = -250.0
DEFAULT_TX_POWER_DBM = {"4x2x2": 28.0, "8x8x2": 19.0}
MODES = ("baseline", "csi")
OBSERVERS = ("ue", "eve")
DETECTORS = ("energy", "correlator")


class ConfigValidationError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    n_sectors: int = 3
    sector_width_deg: float = 120.0
    gnb_array: str = "4x2x2"
    ue_array: str = "2x1x2"
    eve_array: str = "2x1x2"
    scs_hz: float = 30e3
    ssb_period_ms: float = 20.0
    eve_bandwidth_hz: float = 15.36e6
    eve_obs_time_ms: float = 25.0
    tx_power_dbm: float | None = None
    fc_hz: float = 3.5e9
    isd_m: float = 200.0
    mode: str = "both"
    csi_source: str = "genie"
    detectors: tuple[str, ...] = DETECTORS
    noise_figure_db: float = 7.0
    n_trials: int = 200
    seed: int = 0
    pci: int = 0
    n_beams: int = 8
    ul_power_dbm: float = 23.0
    ssb_offset: int = 136
    min_distance_m: float = 10.0
    n_clusters: int = 6
    rice_k_db: float = 10.0
    delay_spread_ns: float = 100.0
    angle_spread_deg: float = 10.0
    sector_hpbw_deg: float = 70.0
    pss_only: bool = False
    ue_position: tuple[float, float] | None = None
    eve_position: tuple[float, float] | str | None = None  # "ue" co-locates the eve

    def __post_init__(self):
        def bad(key, msg):
            raise ConfigValidationError(key, msg)

        for key in ("gnb_array", "ue_array", "eve_array"):
            try:
                arr = ArrayGeometry.parse(getattr(self, key))
            except (TypeError, ValueError) as exc:
                bad(key, str(exc))
            object.__setattr__(self, key, arr.label())
        if self.gnb_array not in DEFAULT_TX_POWER_DBM:
            bad("gnb_array", f"must be one of {sorted(DEFAULT_TX_POWER_DBM)}")
        if self.tx_power_dbm is None:
            object.__setattr__(self, "tx_power_dbm", DEFAULT_TX_POWER_DBM[self.gnb_array])
        object.__setattr__(self, "detectors", tuple(self.detectors))
        object.__setattr__(self, "tx_power_dbm", float(self.tx_power_dbm))
        for key in ("ue_position", "eve_position"):
            v = getattr(self, key)
            if v is not None and v != "ue":
                try:
                    v = tuple(float(c) for c in v)
                except (TypeError, ValueError):
                    v = ()
                if len(v) != 2:
                    bad(key, "must be an (x, y) pair in meters" + (" or 'ue'" if key == "eve_position" else ""))
                object.__setattr__(self, key, v)
        if self.ue_position == "ue":
            bad("ue_position", "must be an (x, y) pair in meters")

        if isinstance(self.n_trials, bool) or not isinstance(self.n_trials, int) or self.n_trials < 1:
            bad("n_trials", f"must be a positive integer, got {self.n_trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            bad("seed", "must be an unsigned 64-bit integer")
        if self.n_sectors != 3:
            bad("n_sectors", "only the 3-sector site is modeled")
        if self.mode not in MODES + ("both",):
            bad("mode", f"must be baseline, csi or both, got {self.mode!r}")
        if self.csi_source not in ("genie", "ls"):
            bad("csi_source", f"must be genie or ls, got {self.csi_source!r}")
        if not self.detectors or any(d not in DETECTORS for d in self.detectors):
            bad("detectors", f"must be a nonempty subset of {DETECTORS}")
        if self.scs_hz != 30e3:
            bad("scs_hz", "only 30 kHz is supported")
        if self.eve_bandwidth_hz != NR_30KHZ.sample_rate_hz:
            bad("eve_bandwidth_hz", "must equal the 15.36 MHz sample rate")
        try:
            sched = build_burst_schedule("B", self.scs_hz, self.fc_hz, self.n_beams, self.ssb_period_ms)
        except SyncConfigError as exc:
            key = "n_beams" if "n_beams" in str(exc) else ("ssb_period_ms" if "period" in str(exc) else "fc_hz")
            bad(key, str(exc))
        burst_ms = NR_30KHZ.symbol_start(sched.ssb_start_symbols[-1] + SSB_SYMBOLS) / NR_30KHZ.samples_per_ms
        if self.eve_obs_time_ms < self.ssb_period_ms + burst_ms:
            bad("eve_obs_time_ms", f"must be >= ssb_period + burst duration "
                                   f"({self.ssb_period_ms + burst_ms:.3f} ms)")
        if not 0 <= self.pci <= 1007:
            bad("pci", "must be in [0, 1007]")
        if not 0 <= self.ssb_offset <= NR_30KHZ.fft_size - SSB_SUBCARRIERS:
            bad("ssb_offset", "SSB must fit inside the 512-bin band")
        if (self.ssb_offset + 56) % 12:
            bad("ssb_offset", "PSS must start on the 12-subcarrier raster")
        if not 1 <= self.min_distance_m < self.isd_m / 2:
            bad("min_distance_m", "must be in [1, isd/2)")
        for key in ("noise_figure_db", "tx_power_dbm", "ul_power_dbm", "fc_hz", "isd_m"):
            if not np.isfinite(getattr(self, key)):
                bad(key, "must be finite")
        if self.n_clusters < 1:
            bad("n_clusters", "must be >= 1")

    # -- derived ------------------------------------------------------------
    @property
    def modes(self) -> tuple[str, ...]:
        return MODES if self.mode == "both" else (self.mode,)

    @property
    def gnb(self) -> ArrayGeometry:
        return ArrayGeometry.parse(self.gnb_array)

    @property
    def ue(self) -> ArrayGeometry:
        return ArrayGeometry.parse(self.ue_array)

    @property
    def eve(self) -> ArrayGeometry:
        return ArrayGeometry.parse(self.eve_array)

    @property
    def n_samples(self) -> int:
        return int(round(self.eve_obs_time_ms * NR_30KHZ.samples_per_ms))

    @property
    def period_samples(self) -> int:
        return int(round(self.ssb_period_ms * NR_30KHZ.samples_per_ms))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["detectors"] = list(self.detectors)
        for key in ("ue_position", "eve_position"):
            if isinstance(d[key], tuple):
                d[key] = list(d[key])
        return d


# -- link budget / RSRP --------------------------------------------------------

def dbm_to_w(dbm):
    return 10 ** ((np.asarray(dbm, dtype=float) - 30) / 10)


def w_to_dbm(w):
    return 10 * np.log10(w) + 30


@dataclass(frozen=True)
class LinkBudget:
    rx_power_dbm: float
    noise_power_dbm: float
    re_scale: float      # per-RE amplitude (sqrt W) of the received SSB, unitary OFDM
    noise_var: float     # per-sample noise variance, W


def link_budget(tx_power_dbm: float, pathloss_db: float, noise_figure_db: float,
                bandwidth_hz: float, n_subcarriers: int = SSB_SUBCARRIERS,
                fft_size: int = NR_30KHZ.fft_size) -> LinkBudget:
    """Received SSB power and per-sample thermal noise at ``bandwidth_hz`` sampling.

    The transmit power is spread evenly over the SSB's occupied subcarriers,
    so a unitary IFFT turns per-RE power |a|^2 into sample power
    n_subcarriers |a|^2 / fft_size.
    """
    rx = tx_power_dbm - pathloss_db
    noise = THERMAL_NOISE_DBM_HZ + noise_figure_db + 10 * np.log10(bandwidth_hz)
    scale = np.sqrt(dbm_to_w(rx) * fft_size / n_subcarriers)
    return LinkBudget(float(rx), float(noise), float(scale), float(dbm_to_w(noise)))


def compute_ul_rsrp(h: ChannelRealization, eta: float) -> float:
    """eta * mean_n ||H[n]||_F^2 / (M K), in dBm."""
    H = h.h
    m, k = H.shape[1], H.shape[2]
    p = eta * float(np.mean(np.sum(np.abs(H) ** 2, axis=(1, 2)))) / (m * k)
    if p <= 0:
        return RSRP_FLOOR_DBM
    return float(max(w_to_dbm(p), RSRP_FLOOR_DBM))


# -- trial ----------------------------------------------------------------------

@dataclass(frozen=True)
class Transmission:
    sector: int
    label: str
    start: int       # first sample (CP included) within the observation window
    symbol: int      # half-frame symbol index of the SSB's first symbol
    burst: int
    cell: CellIdentity


@dataclass(frozen=True)
class TrialResult:
    index: int
    mode: str
    ue_stat_h1: float
    ue_stat_h0: float
    ue_energy_h1: float | None
    ue_energy_h0: float | None
    eve_energy_h1: float | None
    eve_energy_h0: float | None
    eve_corr_h1: float | None
    eve_corr_h0: float | None
    drop: DropGeometry
    sector: int | None        # chosen sector in csi mode
    precoder: str
    transmissions: tuple[Transmission, ...] = field(repr=False, default=())
    ul_rsrp_dbm: tuple[float, ...] = ()

    def transmissions_per_burst(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for t in self.transmissions:
            out[t.burst] = out.get(t.burst, 0) + 1
        return out


def trial_seeds(seed: int, index: int) -> dict[str, np.random.SeedSequence]:
    """Independent streams per trial: geometry/channel, noise, detector phase, pilots."""
    base = [int(seed), int(index)]
    return {name: np.random.SeedSequence(base + [k])
            for k, name in enumerate(("geometry", "noise", "detector", "pilot", "payload"))}


def _payload_rng(seed: int, index: int, mode: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index), 4, MODES.index(mode)]))


def sector_cell(cfg: ScenarioConfig, sector: int) -> CellIdentity:
    return CellIdentity.from_pci((cfg.pci + sector) % 1008)


@dataclass
class _Propagation:
    drop: DropGeometry
    ul_ue: list[ChannelRealization]
    ul_eve: list[ChannelRealization]
    phase: int

    @property
    def dl_ue(self):
        return [downlink_of(h) for h in self.ul_ue]

    @property
    def dl_eve(self):
        return [downlink_of(h) for h in self.ul_eve]


def draw_propagation(cfg: ScenarioConfig, rng: np.random.Generator) -> _Propagation:
    drop = draw_drop(rng, radius=cfg.isd_m / 2, min_dist=cfg.min_distance_m, n_sectors=cfg.n_sectors)
    ue = cfg.ue_position if cfg.ue_position is not None else drop.ue
    eve = drop.eve
    if cfg.eve_position == "ue":
        eve = ue
    elif cfg.eve_position is not None:
        eve = cfg.eve_position
    drop = replace(drop, ue=tuple(ue), eve=tuple(eve))
    kw = dict(fc_hz=cfg.fc_hz, n_clusters=cfg.n_clusters, rice_k_db=cfg.rice_k_db,
              delay_spread_s=cfg.delay_spread_ns * 1e-9, angle_spread_deg=cfg.angle_spread_deg)
    cl_ue = draw_clusters(drop, "ue", rng, **kw)
    cl_eve = draw_clusters(drop, "eve", rng, **kw)
    ch = partial(draw_channel, drop, arr_tx=cfg.gnb, n_subcarriers=SSB_SUBCARRIERS,
                 scs_hz=cfg.scs_hz, hpbw_deg=cfg.sector_hpbw_deg)
    ul_ue = [ch(s, "ue", arr_rx=cfg.ue, rng=rng, clusters=cl_ue) for s in range(cfg.n_sectors)]
    ul_eve = [ch(s, "eve", arr_rx=cfg.eve, rng=rng, clusters=cl_eve) for s in range(cfg.n_sectors)]
    if cfg.eve_position == "ue":
        ul_eve = ul_ue
    phase = int(rng.integers(0, cfg.period_samples))
    return _Propagation(drop, ul_ue, ul_eve, phase)


def plan_baseline(cfg: ScenarioConfig, phase: int) -> list[tuple[Transmission, np.ndarray]]:
    """Every sector sweeps the full codebook in every burst that starts in the window."""
    sched = build_burst_schedule("B", cfg.scs_hz, cfg.fc_hz, cfg.n_beams, cfg.ssb_period_ms)
    book = gob_codebook(cfg.gnb, cfg.sector_width_deg, cfg.n_beams)
    plan = []
    burst = 0
    while phase + burst * cfg.period_samples < cfg.n_samples:
        start0 = phase + burst * cfg.period_samples
        for b, sym in enumerate(sched.ssb_start_symbols):
            for s in range(cfg.n_sectors):
                tx = Transmission(s, book[b].label, start0 + NR_30KHZ.symbol_start(sym), sym,
                                  burst, sector_cell(cfg, s))
                plan.append((tx, book[b].p))
        burst += 1
    return plan


def csi_precoder(cfg: ScenarioConfig, ul: list[ChannelRealization], rng: np.random.Generator):
    """Best-RSRP sector and its eigen-precoder from genie or LS-estimated UL CSI."""
    eta = float(dbm_to_w(cfg.ul_power_dbm)) / SSB_SUBCARRIERS
    rsrp = tuple(compute_ul_rsrp(h, eta) for h in ul)
    sel = select_sector(rsrp)
    if cfg.csi_source == "genie":
        r = spatial_covariance(ul[sel].h)
    else:
        noise = float(dbm_to_w(THERMAL_NOISE_DBM_HZ + cfg.noise_figure_db + 10 * np.log10(cfg.scs_hz)))
        pcfg = UplinkPilotConfig(eta=eta, pilots=dft_pilots(ul[sel].h.shape[2], SSB_SUBCARRIERS),
                                 noise_variance=noise)
        r = spatial_covariance(ls_estimate(receive_ul_pilot(ul[sel], pcfg, rng), pcfg))
    return sel, eigen_precoder(r, rng=rng, max_iter=5000), rsrp


def plan_csi(cfg: ScenarioConfig, phase: int, sector: int, p: np.ndarray):
    """One eigenbeamformed SSB per period from the selected sector, at the first Case B position."""
    sched = build_burst_schedule("B", cfg.scs_hz, cfg.fc_hz, cfg.n_beams, cfg.ssb_period_ms)
    sym = sched.ssb_start_symbols[0]
    plan = []
    burst = 0
    while phase + burst * cfg.period_samples < cfg.n_samples:
        start = phase + burst * cfg.period_samples + NR_30KHZ.symbol_start(sym)
        plan.append((Transmission(sector, "eigen", start, sym, burst, sector_cell(cfg, sector)), p))
        burst += 1
    return plan


def synthesize_rx(plan, grids, dl: list[ChannelRealization], amplitude: float,
                  n_samples: int, ssb_offset: int):
    """Superpose all planned SSBs through the per-sector DL channels.

    Returns the noiseless (K, n_samples) stream and the occupied
    [start, stop) intervals.
    """
    k = dl[0].h.shape[1]
    out = np.zeros((k, n_samples), dtype=np.complex128)
    by_start: dict[int, list[int]] = {}
    for i, (tx, _) in enumerate(plan):
        by_start.setdefault(tx.start, []).append(i)
    intervals = []
    for start, idx in sorted(by_start.items()):
        y = np.zeros((k, SSB_SUBCARRIERS, SSB_SYMBOLS), dtype=np.complex128)
        for i in idx:
            tx, p = plan[i]
            eff = dl[tx.sector].h @ p                     # (N, K)
            y += amplitude * eff.T[:, :, None] * grids[i][None]
        sym = plan[idx[0]][0].symbol
        samples = modulate(y, ssb_offset, NR_30KHZ, first_symbol=sym).samples
        stop = min(start + samples.shape[1], n_samples)
        if stop > start:
            out[:, start:stop] += samples[:, :stop - start]
            intervals.append((start, stop))
    return out, intervals


def _noise(rng, k, n, var):
    w = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
    return np.sqrt(var / 2) * w


def _specs(cfg: ScenarioConfig):
    eve = CorrelatorSearchSpec(use_sss=not cfg.pss_only)
    ue = CorrelatorSearchSpec(freq_offsets=(cfg.ssb_offset + 56,), use_sss=not cfg.pss_only)
    return eve, ue


_H0_CACHE: dict = {}
_H0_CACHE_MAX = 4096


def _h0_statistics(cfg: ScenarioConfig, index: int, noise_eve, noise_ue, noise_var, offsets):
    """Noise-only statistics; they depend on the noise stream only, so campaigns
    that differ in gNB array or mode reuse them."""
    key = (cfg.seed, index, cfg.n_samples, cfg.eve_array, cfg.ue_array, noise_var,
           cfg.detectors, cfg.pss_only, cfg.ssb_offset)
    hit = _H0_CACHE.get(key)
    if hit is not None:
        return hit
    eve_spec, ue_spec = _specs(cfg)
    res = {}
    if "energy" in cfg.detectors:
        res["eve_energy"] = energy_statistic(SampleStream(noise_eve), start_offset=offsets[0]) / noise_var
        res["ue_energy"] = energy_statistic(SampleStream(noise_ue), start_offset=offsets[1]) / noise_var
    if "correlator" in cfg.detectors:
        res["eve_corr"] = correlator_blocks(noise_eve, eve_spec, noise_var=noise_var)
    res["ue_corr"] = correlator_blocks(noise_ue, ue_spec, noise_var=noise_var)
    if len(_H0_CACHE) >= _H0_CACHE_MAX:
        _H0_CACHE.clear()
    _H0_CACHE[key] = res
    return res


def _stat(blocks) -> float:
    return float(max(np.max(blocks), 0.0))


def simulate_trial(cfg: ScenarioConfig, index: int, modes=None) -> dict[str, TrialResult]:
    """All requested modes of one trial, sharing drop, channels, timing and noise."""
    modes = cfg.modes if modes is None else tuple(modes)
    seeds = trial_seeds(cfg.seed, index)
    prop = draw_propagation(cfg, np.random.default_rng(seeds["geometry"]))
    n = cfg.n_samples
    budget = link_budget(cfg.tx_power_dbm, 0.0, cfg.noise_figure_db, cfg.eve_bandwidth_hz)
    nv = budget.noise_var
    nrng = np.random.default_rng(seeds["noise"])
    noise_eve = _noise(nrng, cfg.eve.n_ports, n, nv)
    noise_ue = _noise(nrng, cfg.ue.n_ports, n, nv)
    drng = np.random.default_rng(seeds["detector"])
    offsets = tuple(int(v) for v in drng.integers(0, EnergyWindowSpec().hop, size=2))
    h0 = _h0_statistics(cfg, index, noise_eve, noise_ue, nv, offsets)
    eve_spec, ue_spec = _specs(cfg)
    dl_ue, dl_eve = prop.dl_ue, prop.dl_eve

    results = {}
    for mode in modes:
        sector, rsrp = None, ()
        if mode == "baseline":
            plan = plan_baseline(cfg, prop.phase)
            label = "gob"
        else:
            prng = np.random.default_rng(seeds["pilot"])
            sector, pre, rsrp = csi_precoder(cfg, prop.ul_ue, prng)
            plan = plan_csi(cfg, prop.phase, sector, pre.p)
            label = pre.label
        payload = _payload_rng(cfg.seed, index, mode)
        grids = [build_ssb_grid(tx.cell, payload).grid for tx, _ in plan]

        stats = {}
        for obs, dl, noise, spec, off in (("eve", dl_eve, noise_eve, eve_spec, offsets[0]),
                                          ("ue", dl_ue, noise_ue, ue_spec, offsets[1])):
            sig, intervals = synthesize_rx(plan, grids, dl, budget.re_scale, n, cfg.ssb_offset)
            rx = noise + sig
            if "energy" in cfg.detectors:
                stats[f"{obs}_energy"] = energy_statistic(SampleStream(rx), start_offset=off) / nv
            if obs == "ue" or "correlator" in cfg.detectors:
                blocks = h0[f"{obs}_corr"].copy()
                groups = groups_touching(intervals, n, spec)
                correlator_blocks(rx, spec, noise_var=nv, groups=groups, out=blocks)
                stats[f"{obs}_corr"] = _stat(blocks)

        results[mode] = TrialResult(
            index=index, mode=mode,
            ue_stat_h1=stats["ue_corr"], ue_stat_h0=_stat(h0["ue_corr"]),
            ue_energy_h1=stats.get("ue_energy"), ue_energy_h0=h0.get("ue_energy"),
            eve_energy_h1=stats.get("eve_energy"), eve_energy_h0=h0.get("eve_energy"),
            eve_corr_h1=stats.get("eve_corr"),
            eve_corr_h0=_stat(h0["eve_corr"]) if "eve_corr" in h0 else None,
            drop=prop.drop, sector=sector, precoder=label,
            transmissions=tuple(tx for tx, _ in plan), ul_rsrp_dbm=rsrp,
        )
    return results


def run_trial(cfg: ScenarioConfig, index: int = 0, mode: str | None = None) -> TrialResult:
    """One trial of a single transmission mode; deterministic in (cfg.seed, index)."""
    mode = mode or cfg.mode
    if mode not in MODES:
        raise ConfigValidationError("mode", "run_trial needs baseline or csi")
    return simulate_trial(cfg, index, (mode,))[mode]


# -- campaign -------------------------------------------------------------------

@dataclass
class CampaignResult:
    config: ScenarioConfig
    curves: dict[tuple[str, str, str], RocCurve]
    trials: list[dict[str, TrialResult]]

    @property
    def antennas(self) -> int:
        return self.config.gnb.n_ports

    def pooled(self, observer: str, detector: str, mode: str) -> tuple[np.ndarray, np.ndarray]:
        return _pool(self.trials, observer, detector, mode)


_FIELDS = {("ue", "correlator"): ("ue_stat_h0", "ue_stat_h1"),
           ("ue", "energy"): ("ue_energy_h0", "ue_energy_h1"),
           ("eve", "correlator"): ("eve_corr_h0", "eve_corr_h1"),
           ("eve", "energy"): ("eve_energy_h0", "eve_energy_h1")}


def _pool(trials, observer, detector, mode):
    f0, f1 = _FIELDS[(observer, detector)]
    h0 = np.array([getattr(t[mode], f0) for t in trials], dtype=float)
    h1 = np.array([getattr(t[mode], f1) for t in trials], dtype=float)
    return h0, h1


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("STEALTHSIM_THREADS", "1")))
    except ValueError:
        return 1


def run_campaign(cfg: ScenarioConfig, workers: int | None = None, progress=None) -> CampaignResult:
    """Run ``cfg.n_trials`` trials and build one pooled ROC per (observer, detector, mode).

    Trials are reduced in index order, so the result does not depend on the
    number of workers.
    """
    if cfg.n_trials < 2:
        raise ConfigValidationError("n_trials", "a campaign needs at least 2 trials")
    workers = worker_count() if workers is None else max(1, int(workers))
    job = partial(simulate_trial, cfg)
    if workers == 1:
        trials = []
        for i in range(cfg.n_trials):
            trials.append(job(i))
            if progress:
                progress(i + 1, cfg.n_trials)
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            trials = list(ex.map(job, range(cfg.n_trials), chunksize=4))
    curves = {}
    for mode in cfg.modes:
        for (obs, det) in _FIELDS:
            if det not in cfg.detectors and not (obs == "ue" and det == "correlator"):
                continue
            h0, h1 = _pool(trials, obs, det, mode)
            curves[(obs, det, mode)] = roc_curve(h0, h1)
    return CampaignResult(cfg, curves, trials)


def config_fields() -> list[str]:
    return [f.name for f in fields(ScenarioConfig)]
