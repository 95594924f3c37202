import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfrobust.channel import (ChannelRealization, ClusterMask, LargeScaleFading, cluster_aps,
                              compose_channel, dump_channel, generate_lsf,
                              generate_small_scale, mask_channel)
from cfrobust.errors import DomainError, InvalidMaskError
from cfrobust.model import NetworkConfig


def test_constant_beta_threshold():
    lsf = LargeScaleFading.from_beta(np.full((4, 3), 2.5))
    assert lsf.lambda_lsf == 2.5


def test_threshold_is_mean():
    lsf = LargeScaleFading.from_beta([[2.0, 0.5], [0.5, 2.0]])
    assert lsf.lambda_lsf == pytest.approx(1.25)


def test_nonpositive_beta_rejected():
    with pytest.raises(ValueError):
        LargeScaleFading.from_beta([[1.0, 0.0]])


def test_lsf_determinism_and_shape():
    net = NetworkConfig(num_aps=5, antennas_per_ap=3, num_ues=7, num_scheduled=2)
    a, b = generate_lsf(net, 11), generate_lsf(net, 11)
    assert np.array_equal(a.beta, b.beta)
    assert a.shape == (15, 7)
    assert not np.array_equal(a.beta, generate_lsf(net, 12).beta)
    # antennas of one AP share the AP's gain
    blocks = a.beta.reshape(5, 3, 7)
    assert np.all(blocks == blocks[:, :1, :])
    assert np.all(a.beta > 0)


def test_lsf_pathloss_law():
    # no shadowing: gain in dB is linear in log10(distance) with slope -10*gamma
    net = NetworkConfig(num_aps=4, antennas_per_ap=1, num_ues=30, num_scheduled=1,
                        shadowing_sigma_db=0.0, min_distance=0.0)
    lsf = generate_lsf(net, 3)
    from cfrobust.channel import substream
    place = substream(3, "placement")
    ap = place.uniform(0, net.area_side, size=(4, 2))
    ue = place.uniform(0, net.area_side, size=(30, 2))
    dist = np.linalg.norm(ap[:, None] - ue[None], axis=-1)
    expected = -net.pathloss_ref_db - 10 * net.pathloss_exponent * np.log10(dist)
    assert np.allclose(10 * np.log10(lsf.beta), expected)


def test_small_scale_statistics():
    H, He = generate_small_scale(100, 1000, 5)
    assert abs(np.mean(np.abs(H) ** 2) - 1.0) < 0.02
    assert abs(np.mean(np.abs(He) ** 2) - 1.0) < 0.02
    corr = np.vdot(H.ravel(), He.ravel()) / H.size
    assert abs(corr) < 0.02
    assert abs(np.mean(H)) < 0.02


def test_small_scale_determinism():
    a = generate_small_scale(4, 3, 9)
    b = generate_small_scale(4, 3, 9)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def _instance(seed=0, M=6, K=4):
    rng = np.random.default_rng(seed)
    lsf = LargeScaleFading.from_beta(rng.uniform(0.1, 3.0, size=(M, K)))
    H, He = generate_small_scale(M, K, seed)
    return lsf, H, He


def test_compose_endpoints():
    lsf, H, He = _instance()
    c0 = compose_channel(lsf, H, He, 0.0)
    assert np.all(c0.G_err == 0) and np.allclose(c0.G, c0.V)
    c1 = compose_channel(lsf, H, He, 1.0)
    assert np.all(c1.G_hat == 0) and np.allclose(c1.G, c1.V_err)


def test_compose_identity():
    lsf, H, He = _instance()
    c = compose_channel(lsf, H, He, 0.15)
    b = lsf.beta
    expected = np.sqrt(0.85) * np.sqrt(b) * H + np.sqrt(0.15) * np.sqrt(b) * He
    assert np.max(np.abs(c.G - expected)) < 1e-14
    assert np.array_equal(c.V, np.sqrt(b) * H)


def test_compose_domain():
    lsf, H, He = _instance()
    for alpha in (-0.01, 1.2):
        with pytest.raises(DomainError):
            compose_channel(lsf, H, He, alpha)


def test_error_variance_matches_alpha_beta():
    M, K, alpha = 2, 3, 0.2
    lsf = LargeScaleFading.from_beta([[1.0, 2.0, 0.5], [4.0, 0.25, 1.0]])
    draws = np.array([compose_channel(lsf, *generate_small_scale(M, K, s), alpha).G_err
                      for s in range(3000)])
    var = np.mean(np.abs(draws) ** 2, axis=0)
    se = np.std(np.abs(draws) ** 2, axis=0) / np.sqrt(len(draws))
    assert np.all(np.abs(var - alpha * lsf.beta) < 3 * se + 1e-12)


def test_cluster_example_column():
    beta = np.array([[0.1, 3.4], [0.2, 3.4], [9.9, 3.4]])
    # lambda = mean of all entries = 3.4 when the second column is 3.4
    lsf = LargeScaleFading.from_beta(beta)
    assert lsf.lambda_lsf == pytest.approx(3.4)
    mask = cluster_aps(lsf).mask
    assert mask[:, 0].tolist() == [False, False, True]


def test_cluster_fallback_single_argmax():
    beta = np.array([[0.1, 10.0], [0.2, 10.0], [0.2, 10.0]])
    mask = cluster_aps(LargeScaleFading.from_beta(beta)).mask
    # column 0 is below the mean everywhere: only the first maximizer serves it
    assert mask[:, 0].tolist() == [False, True, False]


def test_cluster_all_equal_full_mask():
    mask = cluster_aps(LargeScaleFading.from_beta(np.ones((3, 4)))).mask
    assert mask.all()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 1e6))
def test_cluster_scale_invariant(seed, c):
    beta = np.random.default_rng(seed).lognormal(0, 2, size=(6, 5))
    a = cluster_aps(LargeScaleFading.from_beta(beta)).mask
    b = cluster_aps(LargeScaleFading.from_beta(c * beta)).mask
    assert np.array_equal(a, b)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cluster_invariants(seed):
    beta = np.random.default_rng(seed).lognormal(0, 3, size=(8, 6))
    lsf = LargeScaleFading.from_beta(beta)
    mask = cluster_aps(lsf).mask
    assert mask.any(axis=0).all()
    assert np.all(mask[beta >= lsf.lambda_lsf])


def test_mask_rejects_empty_column():
    m = np.ones((3, 2), dtype=bool)
    m[:, 1] = False
    with pytest.raises(InvalidMaskError):
        ClusterMask(m)
    lsf, H, He = _instance(M=3, K=2)
    chan = compose_channel(lsf, H, He, 0.1)
    with pytest.raises(InvalidMaskError):
        mask_channel(chan, m, [0, 1])


def test_mask_channel_identity_and_zeroing():
    lsf, H, He = _instance()
    chan = compose_channel(lsf, H, He, 0.2)
    full = ClusterMask(np.ones(chan.shape, dtype=bool))
    uc = mask_channel(chan, full, [2, 0])
    assert np.allclose(uc.G, chan.G[:, [2, 0]])

    m = np.ones(chan.shape, dtype=bool)
    m[1:, 0] = False
    uc = mask_channel(chan, ClusterMask(m), [0])
    assert np.count_nonzero(uc.G) == 1 and uc.G[0, 0] != 0
    # masking commutes with the decomposition
    uc = mask_channel(chan, cluster_aps(lsf), [0, 1, 3])
    assert np.allclose(uc.G_hat + uc.G_err, uc.G)


def test_mask_channel_index_errors():
    lsf, H, He = _instance()
    chan = compose_channel(lsf, H, He, 0.2)
    mask = cluster_aps(lsf)
    for S in ([], [0, 0], [7]):
        with pytest.raises(IndexError):
            mask_channel(chan, mask, S)


def test_realization_views():
    rng = np.random.default_rng(0)
    V, Ve = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
    c = ChannelRealization(V, Ve, 0.3)
    assert np.allclose(c.G, np.sqrt(0.7) * V + np.sqrt(0.3) * Ve)


def test_dump_channel(tmp_path):
    lsf, H, He = _instance()
    chan = compose_channel(lsf, H, He, 0.1)
    mask = cluster_aps(lsf)
    path = tmp_path / "snap.npz"
    dump_channel(path, lsf, chan, mask)
    data = np.load(path)
    assert np.array_equal(data["beta"], lsf.beta)
    assert np.array_equal(data["V_err"], chan.V_err)
    assert np.array_equal(data["mask"], mask.mask)
    assert float(data["alpha"]) == 0.1


def test_arrays_read_only():
    lsf, H, He = _instance()
    with pytest.raises(ValueError):
        lsf.beta[0, 0] = 1.0
    chan = compose_channel(lsf, H, He, 0.1)
    with pytest.raises(ValueError):
        chan.V[0, 0] = 1.0
