"""UL pilot reception, LS channel estimation and eigenbeamforming.

Also holds the grid-of-beams codebook used by the baseline sweep and the
best-RSRP sector choice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ArrayGeometry, ChannelRealization, steering_vector


class DegenerateCovarianceError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f"power iteration did not converge after {iterations} "
                         f"iterations (relative residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


def dft_pilots(k: int, n_subcarriers: int) -> np.ndarray:
    """K x K unitary DFT pilot matrix, identical on every subcarrier."""
    s = np.fft.fft(np.eye(k), norm="ortho")
    return np.broadcast_to(s, (n_subcarriers, k, k)).copy()


@dataclass(frozen=True)
class UplinkPilotConfig:
    eta: float               # pilot power per subcarrier, W
    pilots: np.ndarray       # (N, K, K) unitary
    noise_variance: float    # per received element, W

    def __post_init__(self):
        s = self.pilots
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise ValueError("pilots must be (N, K, K)")
        gram = np.einsum("nij,nik->njk", s.conj(), s)
        if not np.allclose(gram, np.eye(s.shape[1]), atol=1e-12, rtol=0):
            raise ValueError("pilot matrices must be unitary")
        if self.eta < 0 or self.noise_variance < 0:
            raise ValueError("eta and noise_variance must be nonnegative")

    @property
    def n_subcarriers(self) -> int:
        return self.pilots.shape[0]


def receive_ul_pilot(h: ChannelRealization, cfg: UplinkPilotConfig,
                     rng: np.random.Generator) -> np.ndarray:
    """Y[n] = sqrt(eta) H[n] S[n] + W[n]."""
    H = h.h
    if H.shape[0] != cfg.n_subcarriers or H.shape[2] != cfg.pilots.shape[1]:
        raise ValueError(f"channel {H.shape} does not match pilots {cfg.pilots.shape}")
    y = np.sqrt(cfg.eta) * H @ cfg.pilots
    if cfg.noise_variance > 0:
        w = rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        y = y + np.sqrt(cfg.noise_variance / 2) * w
    return y


def ls_estimate(y: np.ndarray, cfg: UplinkPilotConfig) -> np.ndarray:
    """H_hat[n] = Y[n] S[n]^H / sqrt(eta)."""
    if cfg.eta <= 0:
        raise ValueError("LS estimation needs eta > 0")
    return y @ np.swapaxes(cfg.pilots.conj(), 1, 2) / np.sqrt(cfg.eta)


@dataclass(frozen=True)
class SpatialCovariance:
    r: np.ndarray

    def __post_init__(self):
        r = self.r
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("covariance must be square")
        scale = max(np.abs(r).max(), 1e-300)
        if np.abs(r - r.conj().T).max() > 1e-10 * scale:
            raise ValueError("covariance is not Hermitian")


def spatial_covariance(h_hat) -> SpatialCovariance:
    """R = (1/N) sum_n H_hat[n] H_hat[n]^H."""
    h = np.asarray(h_hat)
    if h.ndim != 3 or h.shape[0] == 0:
        raise ValueError("need at least one M x K channel matrix")
    r = np.einsum("nmk,npk->mp", h, h.conj()) / h.shape[0]
    # exact Hermitian symmetry regardless of summation order
    r = 0.5 * (r + r.conj().T)
    return SpatialCovariance(r)


def _canonical_phase(u: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(u)))
    return u * np.exp(-1j * np.angle(u[i]))


def principal_eigvec(r: SpatialCovariance | np.ndarray, tol: float = 1e-9,
                     max_iter: int = 1000, rng: np.random.Generator | None = None
                     ) -> tuple[np.ndarray, float]:
    """Dominant eigenpair (u1, lambda1) of a Hermitian PSD matrix by power iteration.

    Starts from e1; if the iterate collapses (start orthogonal to the
    dominant subspace) it restarts from a random vector drawn from ``rng``.
    The returned vector has unit norm and its largest-magnitude entry is
    real and nonnegative.
    """
    R = r.r if isinstance(r, SpatialCovariance) else np.asarray(r)
    m = R.shape[0]
    scale = np.abs(np.trace(R))
    if scale == 0 or not np.any(R):
        raise DegenerateCovarianceError("covariance is the zero matrix")
    if rng is None:
        rng = np.random.default_rng(0)
    u = np.zeros(m, dtype=np.complex128)
    u[0] = 1.0
    lam, res = 0.0, np.inf
    for it in range(1, max_iter + 1):
        v = R @ u
        nv = np.linalg.norm(v)
        if nv <= 1e-14 * scale:
            u = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            u /= np.linalg.norm(u)
            continue
        u = v / nv
        Ru = R @ u
        lam = float(np.real(np.vdot(u, Ru)))
        res = np.linalg.norm(Ru - lam * u)
        if res <= tol * lam:
            return _canonical_phase(u), lam
    raise ConvergenceError(max_iter, res / lam if lam > 0 else np.inf)


@dataclass(frozen=True)
class Precoder:
    p: np.ndarray
    label: str

    def __post_init__(self):
        if abs(np.linalg.norm(self.p) - 1.0) > 1e-12:
            raise ValueError("precoder must have unit norm")


def eigen_precoder(r: SpatialCovariance, **kw) -> Precoder:
    """p = conj(u1)."""
    u1, _ = principal_eigvec(r, **kw)
    p = np.conj(u1)
    return Precoder(p / np.linalg.norm(p), "eigen")


def beam_azimuths(sector_width_deg: float = 120.0, n_beams: int = 8) -> np.ndarray:
    """Beam centers in degrees, uniformly tiling +-sector_width/2."""
    if n_beams < 1:
        raise ValueError("n_beams must be >= 1")
    step = sector_width_deg / n_beams
    return -sector_width_deg / 2 + step * (np.arange(n_beams) + 0.5)


def gob_codebook(arr: ArrayGeometry, sector_width_deg: float = 120.0,
                 n_beams: int = 8) -> list[Precoder]:
    out = []
    for b, az in enumerate(beam_azimuths(sector_width_deg, n_beams)):
        a = steering_vector(arr, np.deg2rad(az), 0.0)
        out.append(Precoder(np.conj(a) / np.linalg.norm(a), f"gob{b}"))
    return out


def select_sector(ul_rsrp_dbm) -> int:
    """Index of the highest UL RSRP; ties go to the lowest index."""
    v = np.asarray(ul_rsrp_dbm, dtype=float)
    if np.isnan(v).any():
        raise ValueError("RSRP contains NaN")
    return int(np.argmax(v))
