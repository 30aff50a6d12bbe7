"""Clustered-ray MIMO channel between a 3-sector gNB site and terminals.

A reduced stand-in for TR 38.901 UMi: UMi street-canyon LOS path loss, six
clusters (one LOS ray with a 10 dB Rice factor plus five Laplacian-spread
scattered rays with exponential delays), a cosine sector pattern and two
polarization ports per element with independent per-cluster phases.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class ArrayGeometry:
    rows: int
    cols: int
    pols: int = 2
    spacing: float = 0.5  # wavelengths

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.pols not in (1, 2):
            raise ValueError(f"invalid array {self.rows}x{self.cols}x{self.pols}")

    @property
    def n_ports(self) -> int:
        return self.rows * self.cols * self.pols

    @classmethod
    def parse(cls, spec) -> "ArrayGeometry":
        """Accept ``"8x8x2"``, ``[8, 8, 2]`` or an ArrayGeometry."""
        if isinstance(spec, cls):
            return spec
        if isinstance(spec, str):
            parts = spec.lower().replace("×", "x").split("x")
        else:
            parts = list(spec)
        if len(parts) != 3:
            raise ValueError(f"array must be rows x cols x pols, got {spec!r}")
        r, c, p = (int(v) for v in parts)
        return cls(r, c, p)

    def label(self) -> str:
        return f"{self.rows}x{self.cols}x{self.pols}"


def steering_vector(arr: ArrayGeometry, azimuth: float, elevation: float = 0.0) -> np.ndarray:
    """Uniform planar array response, port order (pol, row, col).

    Rows stack vertically (elevation phase), columns horizontally (azimuth
    phase). Every entry has unit modulus.
    """
    r = np.arange(arr.rows)[:, None]
    c = np.arange(arr.cols)[None, :]
    phase = 2 * np.pi * arr.spacing * (r * np.sin(elevation)
                                       + c * np.cos(elevation) * np.sin(azimuth))
    spatial = np.exp(1j * phase).ravel()
    return np.tile(spatial, arr.pols)


def pathloss_db(d_m: float, fc_ghz: float) -> float:
    """UMi street-canyon LOS: 32.4 + 21 log10(d) + 20 log10(fc)."""
    if d_m < 1.0:
        raise ValueError(f"distance must be >= 1 m, got {d_m}")
    return 32.4 + 21.0 * np.log10(d_m) + 20.0 * np.log10(fc_ghz)


def sector_gain(rel_azimuth, hpbw_deg: float = 70.0):
    """Cosine power pattern cos^n(phi) with half-power beamwidth ``hpbw_deg``.

    Zero outside +-90 degrees of boresight.
    """
    n = np.log(0.5) / np.log(np.cos(np.deg2rad(hpbw_deg / 2)))
    phi = np.angle(np.exp(1j * np.asarray(rel_azimuth, dtype=float)))
    c = np.clip(np.cos(phi), 0.0, None)
    return c ** n


def wrap_angle(a):
    return np.angle(np.exp(1j * np.asarray(a, dtype=float)))


@dataclass(frozen=True)
class DropGeometry:
    ue: tuple[float, float]
    eve: tuple[float, float]
    gnb: tuple[float, float] = (0.0, 0.0)
    boresights: tuple[float, ...] = (0.0, 2 * np.pi / 3, 4 * np.pi / 3)

    def position(self, terminal: str) -> np.ndarray:
        if terminal not in ("ue", "eve"):
            raise ValueError(f"unknown terminal {terminal!r}")
        return np.asarray(getattr(self, terminal), dtype=float)

    def distance(self, terminal: str) -> float:
        return float(np.hypot(*(self.position(terminal) - np.asarray(self.gnb))))

    def azimuth(self, terminal: str) -> float:
        d = self.position(terminal) - np.asarray(self.gnb)
        return float(np.arctan2(d[1], d[0]))

    def sector_of(self, terminal: str) -> int:
        rel = wrap_angle(self.azimuth(terminal) - np.asarray(self.boresights))
        return int(np.argmin(np.abs(rel)))


def draw_drop(rng: np.random.Generator, radius: float = 100.0, min_dist: float = 10.0,
              n_sectors: int = 3) -> DropGeometry:
    """UE and eve uniform over the annulus min_dist <= r <= radius."""
    pts = []
    for _ in range(2):
        r = np.sqrt(rng.uniform(min_dist ** 2, radius ** 2))
        th = rng.uniform(-np.pi, np.pi)
        pts.append((float(r * np.cos(th)), float(r * np.sin(th))))
    bores = tuple(2 * np.pi * s / n_sectors for s in range(n_sectors))
    return DropGeometry(ue=pts[0], eve=pts[1], boresights=bores)


@dataclass(frozen=True)
class ClusterSet:
    """Large-scale ray parameters of one site-to-terminal link (all sectors)."""
    delays: np.ndarray     # seconds
    aod: np.ndarray        # global departure azimuth at the gNB
    zod: np.ndarray        # departure elevation
    aoa: np.ndarray        # arrival azimuth at the terminal
    zoa: np.ndarray
    powers: np.ndarray     # sum to 1
    pathloss_db: float

    @property
    def n_clusters(self) -> int:
        return len(self.delays)


def draw_clusters(geom: DropGeometry, terminal: str, rng: np.random.Generator,
                  fc_hz: float = 3.5e9, n_clusters: int = 6, rice_k_db: float = 10.0,
                  delay_spread_s: float = 100e-9, angle_spread_deg: float = 10.0) -> ClusterSet:
    los_az = geom.azimuth(terminal)
    pl = pathloss_db(max(geom.distance(terminal), 1.0), fc_hz / 1e9)
    n_nlos = n_clusters - 1
    # Laplacian with standard deviation angle_spread_deg
    b = np.deg2rad(angle_spread_deg) / np.sqrt(2)
    tau = np.sort(rng.exponential(delay_spread_s, size=n_nlos))
    d_aod = rng.laplace(0.0, b, size=n_nlos)
    d_zod = rng.laplace(0.0, b, size=n_nlos)
    d_aoa = rng.laplace(0.0, b, size=n_nlos)
    d_zoa = rng.laplace(0.0, b, size=n_nlos)
    k = 10 ** (rice_k_db / 10)
    p_nlos = np.exp(-tau / delay_spread_s) if delay_spread_s > 0 else np.ones(n_nlos)
    if n_nlos:
        p_nlos = p_nlos / p_nlos.sum() / (k + 1)
        p_los = k / (k + 1)
    else:
        p_los = 1.0
    return ClusterSet(
        delays=np.concatenate([[0.0], tau]),
        aod=np.concatenate([[los_az], los_az + d_aod]),
        zod=np.concatenate([[0.0], d_zod]),
        aoa=np.concatenate([[los_az + np.pi], los_az + np.pi + d_aoa]),
        zoa=np.concatenate([[0.0], d_zoa]),
        powers=np.concatenate([[p_los], p_nlos]),
        pathloss_db=float(pl),
    )


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray          # (N, M, K) for uplink: gNB ports x terminal ports
    pathloss_db: float
    clusters: ClusterSet | None = None

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.h.shape

    @property
    def pathloss_lin(self) -> float:
        return 10 ** (-self.pathloss_db / 10)


def draw_channel(geom: DropGeometry, sector: int, terminal: str, arr_tx: ArrayGeometry,
                 arr_rx: ArrayGeometry, n_subcarriers: int, rng: np.random.Generator,
                 clusters: ClusterSet | None = None, scs_hz: float = 30e3,
                 hpbw_deg: float = 70.0, **cluster_kw) -> ChannelRealization:
    """Uplink channel H[n] (gNB sector ``sector`` ports x terminal ports).

    Cluster geometry is drawn here unless ``clusters`` is given, which lets
    the three sectors of a site share the same scatterers towards one
    terminal. Small-scale gains and polarization phases are always drawn
    from ``rng`` and never depend on the array sizes, so two campaigns that
    differ only in the gNB array see the same propagation.
    """
    if clusters is None:
        clusters = draw_clusters(geom, terminal, rng, **cluster_kw)
    L = clusters.n_clusters
    phase_los = rng.uniform(0, 2 * np.pi)
    g_nlos = (rng.standard_normal(L - 1) + 1j * rng.standard_normal(L - 1)) / np.sqrt(2)
    gains = np.sqrt(clusters.powers) * np.concatenate([[np.exp(1j * phase_los)], g_nlos])
    pol_tx = np.exp(2j * np.pi * rng.uniform(size=(L, arr_tx.pols)))
    pol_rx = np.exp(2j * np.pi * rng.uniform(size=(L, arr_rx.pols)))

    rel = wrap_angle(clusters.aod - geom.boresights[sector])
    gains = gains * np.sqrt(sector_gain(rel, hpbw_deg))

    n_tx_sp = arr_tx.rows * arr_tx.cols
    n_rx_sp = arr_rx.rows * arr_rx.cols
    a_tx = np.empty((L, arr_tx.n_ports), dtype=np.complex128)
    a_rx = np.empty((L, arr_rx.n_ports), dtype=np.complex128)
    for l in range(L):
        a_tx[l] = steering_vector(arr_tx, rel[l], clusters.zod[l]) * np.repeat(pol_tx[l], n_tx_sp)
        # terminal arrays face the site; only the relative arrival angle matters
        rel_rx = wrap_angle(clusters.aoa[l] - (clusters.aod[0] + np.pi))
        a_rx[l] = steering_vector(arr_rx, rel_rx, clusters.zoa[l]) * np.repeat(pol_rx[l], n_rx_sp)

    n = np.arange(n_subcarriers)
    freq = gains[None, :] * np.exp(-2j * np.pi * scs_hz * n[:, None] * clusters.delays[None, :])
    outer = a_tx[:, :, None] * a_rx.conj()[:, None, :]
    h = np.sqrt(10 ** (-clusters.pathloss_db / 10)) * np.einsum("nl,lmk->nmk", freq, outer)
    return ChannelRealization(h=h, pathloss_db=clusters.pathloss_db, clusters=clusters)


def downlink_of(ul: ChannelRealization) -> ChannelRealization:
    """TDD reciprocity: H_dl[n] = H_ul[n]^T."""
    return ChannelRealization(h=np.swapaxes(ul.h, 1, 2).copy(), pathloss_db=ul.pathloss_db,
                              clusters=ul.clusters)


# -- debug serialization ---------------------------------------------------------

_MAGIC = b"SSCH"


def write_channel(path, ch: ChannelRealization) -> None:
    """Header: magic, three uint32 dims, float64 path loss; payload complex64."""
    n, m, k = ch.h.shape
    head = _MAGIC + struct.pack("<IIId", n, m, k, ch.pathloss_db)
    Path(path).write_bytes(head + ch.h.astype("<c8").tobytes())


def read_channel(path) -> ChannelRealization:
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise ValueError("not a channel dump")
    n, m, k, pl = struct.unpack("<IIId", raw[4:24])
    h = np.frombuffer(raw[24:], dtype="<c8").reshape(n, m, k).astype(np.complex128)
    return ChannelRealization(h=h, pathloss_db=pl)
