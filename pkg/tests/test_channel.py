import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stealthsim.channel import (ArrayGeometry, DropGeometry, downlink_of, draw_channel,
                                draw_clusters, draw_drop, pathloss_db, read_channel,
                                sector_gain, steering_vector, write_channel)

M16 = ArrayGeometry(4, 2, 2)
M128 = ArrayGeometry(8, 8, 2)
TERM = ArrayGeometry(2, 1, 2)


@pytest.mark.parametrize("spec,ports", [("4x2x2", 16), ("8x8x2", 128), ([2, 1, 2], 4), ("8×8×2", 128)])
def test_array_parse(spec, ports):
    assert ArrayGeometry.parse(spec).n_ports == ports


@pytest.mark.parametrize("spec", ["4x2", "0x2x2", "4x2x3", "axbxc"])
def test_array_parse_rejects(spec):
    with pytest.raises(ValueError):
        ArrayGeometry.parse(spec)


def test_pathloss_reference_value():
    # 32.4 + 21 log10(100) + 20 log10(3.5)
    assert pathloss_db(100.0, 3.5) == pytest.approx(85.281, abs=1e-3)


def test_pathloss_below_one_meter():
    with pytest.raises(ValueError):
        pathloss_db(0.5, 3.5)


@given(st.floats(1, 1e4), st.floats(1, 1e4))
def test_pathloss_monotone(a, b):
    if a < b:
        assert pathloss_db(a, 3.5) <= pathloss_db(b, 3.5)


def test_sector_gain_shape():
    assert sector_gain(0.0) == pytest.approx(1.0)
    assert sector_gain(np.deg2rad(35.0)) == pytest.approx(0.5, abs=1e-12)
    assert sector_gain(np.deg2rad(-35.0)) == pytest.approx(0.5, abs=1e-12)
    assert sector_gain(np.deg2rad(120.0)) == 0.0
    assert sector_gain(np.deg2rad(360.0)) == pytest.approx(1.0)


@given(st.floats(-np.pi / 2, np.pi / 2), st.floats(-np.pi / 3, np.pi / 3))
def test_steering_unit_modulus(az, el):
    a = steering_vector(M128, az, el)
    assert a.shape == (128,)
    np.testing.assert_allclose(np.abs(a), 1.0)


def test_steering_broadside_is_flat():
    np.testing.assert_allclose(steering_vector(M16, 0.0), np.ones(16))


def test_steering_column_phase_progression():
    a = steering_vector(ArrayGeometry(1, 4, 1), np.deg2rad(30.0))
    np.testing.assert_allclose(a, np.exp(1j * np.pi * 0.5 * np.arange(4)), atol=1e-12)


def test_drop_sector_assignment():
    d = DropGeometry(ue=(50.0, 0.0), eve=(-50.0, 30.0))
    assert d.sector_of("ue") == 0
    assert d.sector_of("eve") == 1
    assert d.distance("ue") == pytest.approx(50.0)
    with pytest.raises(ValueError):
        d.position("gnb2")


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=30)
def test_drop_inside_annulus(seed):
    d = draw_drop(np.random.default_rng(seed), radius=100, min_dist=10)
    for t in ("ue", "eve"):
        assert 10 - 1e-9 <= d.distance(t) <= 100 + 1e-9


def test_clusters_power_and_los():
    d = DropGeometry(ue=(40.0, 30.0), eve=(0.0, 60.0))
    cl = draw_clusters(d, "ue", np.random.default_rng(0))
    assert cl.n_clusters == 6
    assert cl.powers.sum() == pytest.approx(1.0)
    assert cl.powers[0] == pytest.approx(10 / 11)
    assert cl.aod[0] == pytest.approx(np.arctan2(30, 40))
    assert cl.delays[0] == 0 and np.all(np.diff(cl.delays) >= 0)


def test_clusters_zero_delay_spread():
    d = DropGeometry(ue=(40.0, 30.0), eve=(0.0, 60.0))
    cl = draw_clusters(d, "ue", np.random.default_rng(0), delay_spread_s=0.0)
    assert np.all(np.isfinite(cl.powers)) and cl.powers.sum() == pytest.approx(1.0)


def test_los_only_channel_norm():
    # single LOS ray: ||H[n]||_F^2 = PL_lin * g(rel) * M * K on every subcarrier
    d = DropGeometry(ue=(30.0, 40.0), eve=(0.0, 60.0))
    h = draw_channel(d, 0, "ue", M16, TERM, 24, np.random.default_rng(1), n_clusters=1)
    rel = np.arctan2(40, 30)
    expect = h.pathloss_lin * sector_gain(rel) * 16 * 4
    np.testing.assert_allclose(np.sum(np.abs(h.h) ** 2, axis=(1, 2)), expect, rtol=1e-12)
    assert np.linalg.matrix_rank(h.h[0]) == 1


def test_back_sector_is_silent():
    d = DropGeometry(ue=(-50.0, 0.5), eve=(0.0, 60.0))
    h = draw_channel(d, 0, "ue", M16, TERM, 12, np.random.default_rng(2), angle_spread_deg=1.0)
    assert np.abs(h.h).max() == 0.0


def test_channel_shape_and_reciprocity():
    d = DropGeometry(ue=(30.0, 10.0), eve=(0.0, 60.0))
    ul = draw_channel(d, 0, "ue", M128, TERM, 240, np.random.default_rng(3))
    assert ul.shape == (240, 128, 4)
    dl = downlink_of(ul)
    assert dl.shape == (240, 4, 128)
    np.testing.assert_array_equal(dl.h[17], ul.h[17].T)


def test_small_scale_draws_independent_of_array():
    d = DropGeometry(ue=(30.0, 10.0), eve=(0.0, 60.0))
    rng_a, rng_b = np.random.default_rng(9), np.random.default_rng(9)
    draw_channel(d, 0, "ue", M16, TERM, 12, rng_a)
    draw_channel(d, 0, "ue", M128, TERM, 12, rng_b)
    assert rng_a.random() == rng_b.random()


def test_mean_gain_matches_cluster_powers():
    # E ||H[n]||_F^2 = PL_lin M K sum_l p_l g(aod_l) (unit-modulus steering, unit-power gains)
    d = DropGeometry(ue=(60.0, 20.0), eve=(0.0, 60.0))
    cl = draw_clusters(d, "ue", np.random.default_rng(4))
    rng = np.random.default_rng(5)
    p = [np.mean(np.sum(np.abs(draw_channel(d, 0, "ue", M16, TERM, 1, rng, clusters=cl).h) ** 2))
         for _ in range(3000)]
    expect = 10 ** (-cl.pathloss_db / 10) * 64 * np.sum(cl.powers * sector_gain(cl.aod))
    assert np.mean(p) == pytest.approx(expect, rel=0.03)


def test_channel_dump_round_trip(tmp_path):
    d = DropGeometry(ue=(30.0, 10.0), eve=(0.0, 60.0))
    h = draw_channel(d, 0, "ue", M16, TERM, 8, np.random.default_rng(6))
    write_channel(tmp_path / "h.bin", h)
    back = read_channel(tmp_path / "h.bin")
    assert back.shape == h.shape and back.pathloss_db == h.pathloss_db
    np.testing.assert_allclose(back.h, h.h, rtol=1e-6, atol=1e-6 * np.abs(h.h).max())
    (tmp_path / "bad.bin").write_bytes(b"XXXX" + bytes(20))
    with pytest.raises(ValueError):
        read_channel(tmp_path / "bad.bin")
