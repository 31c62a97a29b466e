import math

import numpy as np
import pytest

from polarwiretap.channel import (
    ChannelError,
    ChannelParams,
    DiscreteChannel,
    NotSymmetricError,
    bhattacharyya,
    capacity,
    cascade,
    channel_from_config,
    channel_from_pairs,
    classify,
    h2,
    involution,
    is_symmetric,
    known_degraded,
    make_bec,
    make_bsc,
    pair_representation,
    secrecy_capacity,
)

from conftest import bhattacharyya_by_definition, capacity_by_definition


def test_bsc_table():
    W = make_bsc(0.1)
    assert np.allclose(W.transitions, [[0.9, 0.1], [0.1, 0.9]])
    assert W.labels == (0, 1)


def test_bec_table_and_labels():
    W = make_bec(0.3)
    assert np.allclose(W.transitions, [[0.7, 0.3, 0.0], [0.0, 0.3, 0.7]])
    assert W.labels == (0, "e", 1)


@pytest.mark.parametrize("bad", [[[0.5, 0.6], [0.5, 0.5]], [[-0.1, 1.1], [0.5, 0.5]],
                                 [[np.nan, 1.0], [0.5, 0.5]]])
def test_invalid_tables(bad):
    with pytest.raises(ChannelError):
        DiscreteChannel(np.array(bad))


def test_params_validation():
    with pytest.raises(ChannelError):
        ChannelParams("bsc", p=0.7)
    with pytest.raises(ChannelError):
        ChannelParams("bec", eps=1.5)
    with pytest.raises(ChannelError):
        ChannelParams("awgn")


def test_config_roundtrip():
    for cfg in ({"kind": "bsc", "p": 0.11}, {"kind": "bec", "eps": 0.4},
                {"kind": "generic", "transitions": [[0.6, 0.3, 0.1], [0.1, 0.3, 0.6]]}):
        W = channel_from_config(cfg)
        assert W.to_config() == cfg


@pytest.mark.parametrize("p", [0.0, 0.02, 0.11, 0.25, 0.5])
def test_bsc_measures(p):
    W = make_bsc(p)
    assert capacity(W) == pytest.approx(capacity_by_definition(W.transitions), abs=1e-12)
    hp = 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    assert capacity(W) == pytest.approx(1 - hp, abs=1e-12)
    assert bhattacharyya(W) == pytest.approx(2 * math.sqrt(p * (1 - p)), abs=1e-12)


def test_reference_values():
    W = make_bsc(0.11)
    assert capacity(W) == pytest.approx(0.5001, abs=1e-4)
    assert bhattacharyya(W) == pytest.approx(0.6258, abs=1e-4)


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.5, 1.0])
def test_bec_measures(eps):
    W = make_bec(eps)
    assert capacity(W) == pytest.approx(1 - eps, abs=1e-12)
    assert bhattacharyya(W) == pytest.approx(eps, abs=1e-12)


def test_generic_measures_match_definition():
    T = np.array([[0.5, 0.3, 0.15, 0.05], [0.05, 0.15, 0.3, 0.5]])
    W = DiscreteChannel(T)
    assert capacity(W) == pytest.approx(capacity_by_definition(T), abs=1e-12)
    assert bhattacharyya(W) == pytest.approx(bhattacharyya_by_definition(T), abs=1e-12)


def test_h2_edges():
    assert h2(0.0) == 0.0 and h2(1.0) == 0.0
    assert h2(0.5) == pytest.approx(1.0)


def test_symmetry_witness():
    w = is_symmetric(make_bsc(0.2))
    assert w and w.partition == [(0, 1)]
    w = is_symmetric(make_bec(0.3))
    assert w and sorted(w.partition) == [(0, 2), (1,)]
    z = DiscreteChannel(np.array([[0.9, 0.1], [0.3, 0.7]]))
    assert not is_symmetric(z)
    assert involution(z) is None


def test_involution_maps_rows():
    W = DiscreteChannel(np.array([[0.5, 0.2, 0.2, 0.1], [0.1, 0.2, 0.2, 0.5]]))
    pi = involution(W)
    assert np.array_equal(pi[pi], np.arange(4))
    assert np.allclose(W.transitions[0], W.transitions[1][pi])


def test_cascade_of_bscs():
    W = cascade(make_bsc(0.05), make_bsc(1 / 6))
    c = classify(W)
    assert c.kind == "bsc" and c.p == pytest.approx(0.2, abs=1e-15)
    assert W.transitions[0, 1] == pytest.approx(0.2, abs=1e-15)


def test_cascade_shape_checked():
    with pytest.raises(ChannelError):
        cascade(make_bsc(0.1), np.eye(3))


def test_secrecy_capacity_values():
    cs = secrecy_capacity(make_bsc(0.001), make_bsc(0.45))
    assert cs == pytest.approx(h2(0.45) - h2(0.001), abs=1e-12)
    assert cs == pytest.approx(0.9814, abs=1e-4)
    assert secrecy_capacity(make_bec(0.1), make_bec(0.5)) == pytest.approx(0.4)


def test_secrecy_capacity_non_degraded_warns():
    with pytest.warns(UserWarning):
        secrecy_capacity(make_bsc(0.3), make_bsc(0.1))
    assert known_degraded(make_bsc(0.1), make_bec(0.2)) is None


def test_secrecy_capacity_requires_symmetry():
    z = DiscreteChannel(np.array([[0.9, 0.1], [0.3, 0.7]]))
    with pytest.raises(NotSymmetricError):
        secrecy_capacity(make_bsc(0.1), z)


def test_pair_representation_roundtrip():
    for W in (make_bsc(0.2), make_bec(0.4)):
        a, b = pair_representation(W)
        V = channel_from_pairs(a, b)
        assert capacity(V) == pytest.approx(capacity(W), abs=1e-12)
        assert bhattacharyya(V) == pytest.approx(bhattacharyya(W), abs=1e-12)


def test_llr_and_sampling(rng):
    W = make_bec(0.3)
    L = W.llr()
    assert L[1] == 0 and L[0] == np.inf and L[2] == -np.inf
    x = np.zeros(200_000, dtype=np.int64)
    y = W.sample(x, rng)
    assert set(np.unique(y)) <= {0, 1}
    assert np.mean(y == 1) == pytest.approx(0.3, abs=0.005)
    y1 = make_bsc(0.1).sample(np.ones(200_000, dtype=np.int64), rng)
    assert np.mean(y1 == 0) == pytest.approx(0.1, abs=0.003)
