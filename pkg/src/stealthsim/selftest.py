"""Fast numerical self-checks run by ``stealthsim selftest``.

Each check compares a component against an independent computation and
returns the worst error seen.
"""
from __future__ import annotations

import numpy as np
from scipy.stats import norm

from .beamforming import (UplinkPilotConfig, dft_pilots, ls_estimate, principal_eigvec,
                          receive_ul_pilot, spatial_covariance)
from .channel import ChannelRealization
from .detection import pd_at_pfa, roc_curve
from .nr_sync_signals import CellIdentity, build_ssb_grid, gen_pss
from .ofdm import demodulate, modulate


def check_m_sequence() -> float:
    d = gen_pss(0).astype(float)
    ac = np.array([d @ np.roll(d, s) for s in range(127)])
    return float(abs(ac[0] - 127) + np.abs(ac[1:] + 1).max())


def check_ofdm_round_trip() -> float:
    rng = np.random.default_rng(1)
    grid = build_ssb_grid(CellIdentity(17, 2), rng).grid
    back = demodulate(modulate(grid, 136, first_symbol=4), symbol_count=4, first_symbol=4,
                      subcarrier_offset=136, n_subcarriers=240)[0]
    return float(np.abs(back - grid).max())


def check_ls_exact() -> float:
    rng = np.random.default_rng(2)
    h = rng.standard_normal((12, 16, 4)) + 1j * rng.standard_normal((12, 16, 4))
    cfg = UplinkPilotConfig(eta=0.3, pilots=dft_pilots(4, 12), noise_variance=0.0)
    est = ls_estimate(receive_ul_pilot(ChannelRealization(h, 0.0), cfg, rng), cfg)
    return float(np.abs(est - h).max() / np.abs(h).max())


def check_eigenpair() -> float:
    rng = np.random.default_rng(3)
    worst = 0.0
    for m in (4, 16):
        a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        a[:, 0] *= 3  # keep a clear eigengap
        r = spatial_covariance(a[None])
        u, lam = principal_eigvec(r)
        w, v = np.linalg.eigh(r.r)
        worst = max(worst, abs(lam - w[-1]) / w[-1], 1 - abs(np.vdot(v[:, -1], u)))
    return float(worst)


def check_gaussian_roc() -> float:
    rng = np.random.default_rng(4)
    c = roc_curve(rng.standard_normal(20000), rng.standard_normal(20000) + 2)
    return float(abs(pd_at_pfa(c, 0.1) - norm.sf(norm.isf(0.1) - 2)))


CHECKS = (
    ("m-sequence two-level autocorrelation", check_m_sequence, 0.0),
    ("OFDM round trip", check_ofdm_round_trip, 1e-10),
    ("noiseless LS estimate", check_ls_exact, 1e-12),
    ("power iteration vs eigh", check_eigenpair, 1e-6),
    ("Gaussian ROC point", check_gaussian_roc, 0.02),
)


def run_selftest(verbose: bool = False) -> bool:
    ok = True
    for name, fn, tol in CHECKS:
        err = fn()
        passed = err <= tol
        ok &= passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}: error {err:.3g} (tol {tol:g})")
    return ok
