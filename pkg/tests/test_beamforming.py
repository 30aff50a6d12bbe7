import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from stealthsim.beamforming import (ConvergenceError, DegenerateCovarianceError, Precoder,
                                    SpatialCovariance, UplinkPilotConfig, beam_azimuths, dft_pilots,
                                    eigen_precoder, gob_codebook, ls_estimate, principal_eigvec,
                                    receive_ul_pilot, select_sector, spatial_covariance)
from stealthsim.channel import ArrayGeometry, ChannelRealization, steering_vector


def cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_psd(rng, m, rank=None):
    a = cgauss(rng, m, rank or m)
    return a @ a.conj().T


def chan(h):
    return ChannelRealization(np.asarray(h), 0.0)


# -- UL pilots and LS -------------------------------------------------------------

def test_dft_pilots_unitary():
    s = dft_pilots(4, 3)
    for n in range(3):
        np.testing.assert_allclose(s[n].conj().T @ s[n], np.eye(4), atol=1e-14)


def test_pilot_config_rejects_non_unitary():
    with pytest.raises(ValueError):
        UplinkPilotConfig(1.0, 2 * dft_pilots(2, 4), 0.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(1, 4), eta=st.floats(1e-6, 1e3))
def test_ls_noiseless_exact_any_unitary_pilot(seed, k, eta):
    rng = np.random.default_rng(seed)
    n, m = 6, 8
    h = cgauss(rng, n, m, k)
    s = np.stack([unitary_group.rvs(k, random_state=rng) if k > 1 else np.exp(1j * rng.uniform(0, 6.3, (1, 1)))
                  for _ in range(n)])
    cfg = UplinkPilotConfig(eta, s, 0.0)
    est = ls_estimate(receive_ul_pilot(chan(h), cfg, rng), cfg)
    assert np.abs(est - h).max() <= 1e-12 * max(1.0, np.abs(h).max())


def test_noiseless_pilot_is_exact_product():
    rng = np.random.default_rng(0)
    h = cgauss(rng, 5, 3, 2)
    cfg = UplinkPilotConfig(2.0, dft_pilots(2, 5), 0.0)
    np.testing.assert_allclose(receive_ul_pilot(chan(h), cfg, rng), np.sqrt(2) * h @ cfg.pilots, atol=1e-15)


def test_identity_pilot_ls_is_scaled_y():
    rng = np.random.default_rng(1)
    s = np.broadcast_to(np.eye(2), (4, 2, 2)).copy()
    cfg = UplinkPilotConfig(4.0, s, 0.1)
    y = cgauss(rng, 4, 3, 2)
    np.testing.assert_allclose(ls_estimate(y, cfg), y / 2.0)


def test_zero_eta_signal_vanishes_and_ls_rejects():
    rng = np.random.default_rng(2)
    cfg = UplinkPilotConfig(0.0, dft_pilots(2, 3), 0.0)
    assert np.all(receive_ul_pilot(chan(cgauss(rng, 3, 4, 2)), cfg, rng) == 0)
    with pytest.raises(ValueError):
        ls_estimate(np.zeros((3, 4, 2)), cfg)


def test_pilot_dimension_mismatch():
    cfg = UplinkPilotConfig(1.0, dft_pilots(2, 3), 0.0)
    with pytest.raises(ValueError):
        receive_ul_pilot(chan(np.zeros((3, 4, 3))), cfg, np.random.default_rng(0))


def test_noise_only_variance():
    rng = np.random.default_rng(3)
    cfg = UplinkPilotConfig(1.0, dft_pilots(4, 240), 0.37)
    y = receive_ul_pilot(chan(np.zeros((240, 16, 4))), cfg, rng)
    assert np.var(y) == pytest.approx(0.37, rel=0.05)


def test_ls_error_variance():
    rng = np.random.default_rng(4)
    h = cgauss(rng, 240, 16, 4)
    cfg = UplinkPilotConfig(0.5, dft_pilots(4, 240), 0.2)
    err = ls_estimate(receive_ul_pilot(chan(h), cfg, rng), cfg) - h
    assert np.mean(np.abs(err) ** 2) == pytest.approx(0.2 / 0.5, rel=0.05)


# -- covariance ----------------------------------------------------------------------

def test_covariance_rank_one():
    rng = np.random.default_rng(5)
    a, b = cgauss(rng, 6), cgauss(rng, 3)
    r = spatial_covariance(np.outer(a, b.conj())[None]).r
    np.testing.assert_allclose(r, np.vdot(b, b).real * np.outer(a, a.conj()), atol=1e-12)


def test_covariance_of_white_noise_tends_to_k_identity():
    rng = np.random.default_rng(6)
    r = spatial_covariance(cgauss(rng, 2000, 8, 4)).r
    assert np.linalg.norm(r - 4 * np.eye(8)) / np.linalg.norm(4 * np.eye(8)) < 0.1


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 12), m=st.integers(1, 10), k=st.integers(1, 4))
def test_covariance_hermitian_psd_and_trace(seed, n, m, k):
    rng = np.random.default_rng(seed)
    h = cgauss(rng, n, m, k) * 10 ** rng.uniform(-6, 3)
    r = spatial_covariance(h).r
    assert np.abs(r - r.conj().T).max() == 0.0
    tr = np.trace(r).real
    assert np.linalg.eigvalsh(r).min() >= -1e-9 * tr
    assert tr == pytest.approx(np.sum(np.abs(h) ** 2) / n, rel=1e-10)


def test_covariance_order_invariant():
    rng = np.random.default_rng(7)
    h = cgauss(rng, 50, 8, 2)
    r1 = spatial_covariance(h).r
    r2 = spatial_covariance(h[rng.permutation(50)]).r
    assert np.abs(r1 - r2).max() <= 1e-10 * np.abs(r1).max()
    assert np.abs(r2 - r2.conj().T).max() <= 1e-10


def test_covariance_errors():
    with pytest.raises(ValueError):
        spatial_covariance(np.zeros((0, 4, 2)))
    with pytest.raises(ValueError):
        SpatialCovariance(np.array([[1, 1j], [1j, 1]]))


# -- eigenvector -----------------------------------------------------------------------

def test_eig_diagonal():
    u, lam = principal_eigvec(np.diag([3.0, 1.0]).astype(complex))
    np.testing.assert_allclose(u, [1, 0])
    assert lam == pytest.approx(3.0)


def test_eig_rank_one_alignment():
    rng = np.random.default_rng(8)
    a = cgauss(rng, 8)
    a /= np.linalg.norm(a)
    u, lam = principal_eigvec(np.outer(a, a.conj()))
    assert abs(np.vdot(u, a)) > 1 - 1e-8
    assert lam == pytest.approx(1.0)


@pytest.mark.parametrize("m", [4, 16])
@pytest.mark.parametrize("seed", range(5))
def test_eig_matches_dense_solver(m, seed):
    rng = np.random.default_rng(seed)
    r = random_psd(rng, m)
    u, lam = principal_eigvec(r, max_iter=20000)
    w, v = np.linalg.eigh(r)
    assert lam == pytest.approx(w[-1], rel=1e-6)
    assert abs(np.vdot(v[:, -1], u)) == pytest.approx(1.0, abs=1e-6)
    assert np.linalg.norm(r @ u - lam * u) <= 1e-9 * lam


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), m=st.integers(2, 12))
def test_eig_residual_and_phase_convention(seed, m):
    rng = np.random.default_rng(seed)
    r = random_psd(rng, m, rank=2)
    u, lam = principal_eigvec(r, max_iter=100000)
    assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(r @ u - lam * u) <= 1e-9 * lam
    i = np.argmax(np.abs(u))
    assert abs(u[i].imag) < 1e-12 and u[i].real >= 0


def test_eig_restarts_when_start_is_orthogonal():
    r = np.diag([0.0, 2.0, 1.0]).astype(complex)
    u, lam = principal_eigvec(r, rng=np.random.default_rng(0))
    assert lam == pytest.approx(2.0)
    assert abs(u[1]) == pytest.approx(1.0)


def test_eig_errors():
    with pytest.raises(DegenerateCovarianceError):
        principal_eigvec(np.zeros((3, 3)))
    with pytest.raises(ConvergenceError) as ei:
        principal_eigvec(np.diag([1.0, 0.9999999]) + 1e-4 * np.ones((2, 2)), max_iter=3)
    assert ei.value.iterations == 3


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), c=st.floats(1e-6, 1e6))
def test_precoder_scale_invariant(seed, c):
    rng = np.random.default_rng(seed)
    r = random_psd(rng, 6, rank=1) + 0.01 * np.eye(6)
    p1 = eigen_precoder(SpatialCovariance(r)).p
    p2 = eigen_precoder(SpatialCovariance(c * r)).p
    np.testing.assert_allclose(p1, p2, atol=1e-9)


def test_precoder_real_covariance():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((5, 5))
    r = a @ a.T
    u, _ = principal_eigvec(r.astype(complex))
    p = eigen_precoder(SpatialCovariance(r.astype(complex))).p
    np.testing.assert_allclose(p, u, atol=1e-12)
    assert np.linalg.norm(p) == pytest.approx(1.0, abs=1e-12)


def test_precoder_requires_unit_norm():
    with pytest.raises(ValueError):
        Precoder(np.array([1.0, 1.0]), "x")


def test_eigen_array_gain_is_m():
    rng = np.random.default_rng(10)
    m = 16
    a = steering_vector(ArrayGeometry(4, 2, 2), 0.3, 0.1)
    b = cgauss(rng, 4)
    h_ul = np.outer(a, b.conj())[None]
    h_dl = h_ul[0].T
    p = eigen_precoder(spatial_covariance(h_ul)).p
    gain = np.linalg.norm(h_dl @ p) ** 2
    rand = [np.linalg.norm(h_dl @ (q / np.linalg.norm(q))) ** 2 for q in cgauss(rng, 500, m)]
    assert gain / np.mean(rand) == pytest.approx(m, rel=0.1)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), az=st.floats(-1.2, 1.2))
def test_genie_eigen_beats_every_gob_beam(seed, az):
    rng = np.random.default_rng(seed)
    arr = ArrayGeometry(4, 2, 2)
    a = steering_vector(arr, az, 0.0) * np.repeat(np.exp(1j * rng.uniform(0, 6.3, 2)), 8)
    b = cgauss(rng, 4)
    h_ul = np.outer(a, b.conj())[None]
    p = eigen_precoder(spatial_covariance(h_ul)).p
    eig = np.linalg.norm(h_ul[0].T @ p) ** 2
    for beam in gob_codebook(arr):
        assert eig >= np.linalg.norm(h_ul[0].T @ beam.p) ** 2 * (1 - 1e-9)


# -- GoB and sector choice ------------------------------------------------------------------

def test_beam_centers():
    np.testing.assert_allclose(beam_azimuths(), [-52.5, -37.5, -22.5, -7.5, 7.5, 22.5, 37.5, 52.5])


@pytest.mark.parametrize("arr", ["4x2x2", "8x8x2"])
def test_codebook_unit_norm_and_labels(arr):
    book = gob_codebook(ArrayGeometry.parse(arr))
    assert len(book) == 8
    assert [b.label for b in book] == [f"gob{i}" for i in range(8)]
    for b in book:
        assert np.linalg.norm(b.p) == pytest.approx(1.0, abs=1e-12)


def test_codebook_crossover_within_6db():
    arr = ArrayGeometry(4, 2, 2)
    book = gob_codebook(arr)
    grid = np.deg2rad(np.arange(-52.5, 52.5 + 1e-9, 0.1))
    gains = np.array([[abs(steering_vector(arr, phi) @ b.p) ** 2 for b in book] for phi in grid])
    peak = arr.n_ports
    assert gains.max() == pytest.approx(peak)
    assert 10 * np.log10(gains.max(axis=1).min() / peak) >= -6.0


@pytest.mark.parametrize("rsrp,expect", [((-80, -90, -100), 0), ((-90, -80, -100), 1),
                                         ((-80, -80, -100), 0), ((-250, -250, -250), 0)])
def test_select_sector(rsrp, expect):
    assert select_sector(rsrp) == expect


def test_select_sector_nan():
    with pytest.raises(ValueError):
        select_sector([-80, np.nan, -90])
