import csv
import itertools
import math

import numpy as np
import pytest

from polarwiretap.channel import DiscreteChannel, capacity, h2, make_bec, make_bsc
from polarwiretap.construction import bec_evolve, brute_force_stats, poor_set
from polarwiretap.security import (
    SymmetryViolation,
    attach_exact,
    bec_exact_leakage,
    bitchannel_mi_check,
    chain_rule_check,
    induced_capacity_check,
    induced_channel,
    lemma12_check,
    strong_leakage_bound,
    symmetry_certificate,
    weak_leakage_bound,
)
from polarwiretap.wiretap import DeltaWindowWarning, WiretapCode, build_strong, build_weak

from conftest import dense_polar_matrix


def leakage_by_enumeration(code, eps, randomized=True):
    """``I(U; Z)`` from the dense joint of message and erasure-channel output."""
    n = code.n
    G = dense_polar_matrix(n.bit_length() - 1)
    T = make_bec(eps).transitions
    us = list(itertools.product((0, 1), repeat=code.k))
    es = list(itertools.product((0, 1), repeat=code.r)) if randomized else [(0,) * code.r]
    joint = np.zeros((len(us), 3 ** n))
    for a, u in enumerate(us):
        for e in es:
            v = np.zeros(n, dtype=np.int64)
            v[code.A] = u
            v[code.R] = e
            x = v @ G % 2
            row = np.ones(1)
            for j in range(n):
                row = np.outer(row, T[x[j]]).ravel()
            joint[a] += row / (len(us) * len(es))
    pu = joint.sum(axis=1, keepdims=True)
    pz = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log2(joint[mask] / (pu @ pz)[mask])))


def toy_codes(n):
    """A few weak-mode partitions of ``[n]``."""
    out = []
    rng = np.random.default_rng(n)
    for _ in range(6):
        roles = rng.integers(0, 3, n)
        roles[rng.integers(n)] = 1
        out.append(WiretapCode(n=n, mode="weak", R=np.flatnonzero(roles == 0),
                               A=np.flatnonzero(roles == 1), B=np.flatnonzero(roles == 2),
                               X=[], Y=[], beta=0.3))
    return out


class TestWeakBound:
    def test_pure_noise_eavesdropper(self):
        bob, eve = bec_evolve(0.0, 8), bec_evolve(1.0, 8)
        code = build_weak(bob, eve, 0.3)
        assert code.r == 0
        rep = weak_leakage_bound(code, eve)
        lam = 2.0 ** -(code.n ** 0.3)
        assert rep.components["n_epsilon_n"] == 0.0
        assert rep.components["h2_lambda"] == pytest.approx(h2(lam), rel=1e-12)
        assert rep.bound_bits == pytest.approx(h2(lam) + (code.n - code.k) * lam, rel=1e-12)

    def test_components_and_decreasing_normalized_bound(self):
        previous = math.inf
        for m in range(8, 15):
            bob, eve = bec_evolve(0.0, m), bec_evolve(0.5, m)
            code = build_weak(bob, eve, 0.3)
            rep = weak_leakage_bound(code, eve)
            c = rep.components
            assert set(c) >= {"n_epsilon_n", "h2_lambda", "n_minus_k_lambda"}
            assert rep.bound_bits == pytest.approx(
                c["n_epsilon_n"] + c["h2_lambda"] + c["n_minus_k_lambda"], rel=1e-12)
            assert rep.normalized < previous
            previous = rep.normalized

    def test_mode_mismatch(self):
        bob, eve = bec_evolve(0.0, 6), bec_evolve(0.5, 6)
        with pytest.raises(ValueError):
            weak_leakage_bound(build_strong(bob, eve, 0.3), eve)
        with pytest.raises(ValueError):
            strong_leakage_bound(build_weak(bob, eve, 0.3), eve)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_exact_never_exceeds_bound(self, m):
        bob, eve = bec_evolve(0.0, m), bec_evolve(0.5, m)
        code = build_weak(bob, eve, 0.3)
        rep = attach_exact(weak_leakage_bound(code, eve), code, 0.5)
        assert rep.exact_method in ("exhaustive", "trivial")
        assert rep.exact_bits <= rep.bound_bits + 1e-9


class TestStrongBound:
    def test_log_domain_bound(self):
        eve = bec_evolve(0.5, 12)
        code = build_strong(bec_evolve(0.1, 12), eve, 0.3)
        rep = strong_leakage_bound(code, eve)
        size = poor_set(eve, delta_log2=code.delta_log2).size
        assert rep.components["poor_size"] == size
        assert rep.bound_log2 == pytest.approx(code.delta_log2 + math.log2(size))
        assert rep.bound_bits <= code.n * 2.0 ** -(code.n ** 0.3)
        assert rep.flags["delta_n_times_n_below_one"]

    def test_tiny_delta_stays_representable(self):
        eve = bec_evolve(0.5, 10)
        with pytest.warns(DeltaWindowWarning):
            code = build_strong(bec_evolve(0.1, 10), eve, 0.3, delta_log2=-100.0)
        rep = strong_leakage_bound(code, eve)
        assert rep.components["poor_size"] == 77
        assert rep.bound_log2 == pytest.approx(-100 + math.log2(77))
        assert 0.0 < rep.bound_bits < 1e-27

    def test_bound_decreases_with_length(self):
        values = []
        for m in range(8, 15):
            eve = bec_evolve(0.5, m)
            values.append(strong_leakage_bound(build_strong(bec_evolve(0.1, m), eve, 0.3),
                                               eve).bound_log2)
        assert all(b < a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_exact_below_bound(self, m):
        bob, eve = bec_evolve(0.05, m), bec_evolve(0.6, m)
        code = build_strong(bob, eve, 0.3)
        rep = attach_exact(strong_leakage_bound(code, eve), code, 0.6)
        assert rep.exact_bits <= rep.bound_bits + 1e-9


class TestExactLeakage:
    def test_trivial_erasure_levels(self):
        code = build_weak(bec_evolve(0.0, 6), bec_evolve(0.5, 6), 0.3)
        assert bec_exact_leakage(code, 1.0)[0] == 0.0
        assert bec_exact_leakage(code, 0.0)[0] == code.k

    @pytest.mark.parametrize("n", [2, 4])
    @pytest.mark.parametrize("eps", [0.3, 0.5, 0.8])
    def test_matches_dense_mutual_information(self, n, eps):
        for code in toy_codes(n):
            for randomized in (True, False):
                bits, se, method = bec_exact_leakage(code, eps, randomized=randomized)
                assert method == "exhaustive" and se == 0.0
                assert bits == pytest.approx(leakage_by_enumeration(code, eps, randomized),
                                             abs=1e-9)

    def test_monte_carlo_agrees_with_exhaustive(self):
        code = build_weak(bec_evolve(0.0, 4), bec_evolve(0.5, 4), 0.3)
        exact, _, _ = bec_exact_leakage(code, 0.5)
        mc, se, method = bec_exact_leakage(code, 0.5, pattern_budget=1, samples=40000, seed=3)
        assert method == "monte-carlo" and se > 0
        assert abs(mc - exact) < 4 * se

    def test_fixed_randomness_leaks_at_least_k_capacity(self):
        for m in (2, 3, 4):
            code = build_weak(bec_evolve(0.0, m), bec_evolve(0.5, m), 0.3)
            bits, _, _ = bec_exact_leakage(code, 0.5, randomized=False)
            assert bits >= code.k * 0.5 - 1e-9

    def test_rejects_large_lengths(self):
        code = WiretapCode(n=1 << 13, mode="weak", R=[], A=[0], B=np.arange(1, 1 << 13),
                           X=[], Y=[], beta=0.3)
        with pytest.raises(ValueError):
            bec_exact_leakage(code, 0.5)

    def test_report_json(self):
        code = build_weak(bec_evolve(0.0, 4), bec_evolve(0.5, 4), 0.3)
        rep = attach_exact(weak_leakage_bound(code, bec_evolve(0.5, 4)), code, 0.5)
        text = rep.to_json()
        assert '"n_epsilon_n"' in text and '"exact_bits"' in text


class TestInducedChannel:
    def test_no_randomness_is_product_channel(self):
        W = make_bsc(0.25)
        ic = induced_channel(W, 2, [])
        G = dense_polar_matrix(1)
        for x in itertools.product((0, 1), repeat=2):
            c = np.array(x) @ G % 2
            row = np.outer(W.transitions[c[0]], W.transitions[c[1]]).ravel()
            assert np.allclose(ic.table[2 * x[0] + x[1]], row)

    def test_all_random_has_one_row(self):
        ic = induced_channel(make_bec(0.5), 4, range(4))
        assert ic.table.shape == (1, 81)
        rep = induced_capacity_check(make_bec(0.5), 4, range(4))
        assert rep["capacity_Q"] == 0.0 and rep["sum_bit_capacities"] == 0.0

    @pytest.mark.parametrize("W", [make_bsc(0.25), make_bec(0.5)], ids=["bsc", "bec"])
    @pytest.mark.parametrize("n", [2, 4])
    def test_rows_sum_to_one_and_symmetric(self, W, n):
        for r in range(n + 1):
            for R in itertools.combinations(range(n), r):
                ic = induced_channel(W, n, R)
                assert np.allclose(ic.table.sum(axis=1), 1.0, atol=1e-10)
                partition = symmetry_certificate(ic, samples=None if n == 2 else 3000)
                covered = sorted(z for group in partition for z in group)
                assert covered == list(range(ic.table.shape[1]))

    def test_bec_capacity_example(self):
        rep = induced_capacity_check(make_bec(0.5), 2, [1])
        assert rep["sum_bit_capacities"] == pytest.approx(0.25, abs=1e-12)
        assert rep["holds"]
        assert rep["capacity_Q"] <= 0.25 + 1e-9

    @pytest.mark.parametrize("W", [make_bsc(0.25), make_bec(0.5)], ids=["bsc", "bec"])
    def test_capacity_inequality_all_subsets(self, W):
        stats = brute_force_stats(W, 4)
        for r in range(5):
            for R in itertools.combinations(range(4), r):
                rep = induced_capacity_check(W, 4, R)
                assert rep["holds"]
                assert rep["identity_gap"] < 1e-9
                with_stats = induced_capacity_check(W, 4, R, stats)
                assert with_stats["sum_bit_capacities"] == pytest.approx(
                    rep["sum_bit_capacities"], abs=1e-9)

    def test_chain_rule_and_bitchannel_identity(self):
        for W in (make_bsc(0.25), make_bec(0.5)):
            assert bitchannel_mi_check(W, 4)["max_gap"] < 1e-10
            for R in ([], [0], [1, 3]):
                assert chain_rule_check(W, 4, R)["gap"] < 1e-10

    def test_guard(self):
        with pytest.raises(ValueError):
            induced_channel(make_bsc(0.1), 8, [])
        with pytest.raises(ValueError):
            induced_channel(make_bsc(0.1), 2, [2])

    def test_csv_export(self, tmp_path):
        ic = induced_channel(make_bsc(0.25), 2, [0])
        ic.to_csv(tmp_path / "q.csv")
        rows = list(csv.reader(open(tmp_path / "q.csv")))
        assert rows[0] == ["x", "z0", "z1", "z2", "z3"]
        assert [r[0] for r in rows[1:]] == ["0", "1"]
        assert np.allclose(np.array(rows[1:])[:, 1:].astype(float), ic.table)


class TestSymmetryIdentity:
    @pytest.mark.parametrize("W,count", [(make_bsc(0.25), 64), (make_bec(0.5), 144)],
                             ids=["bsc", "bec"])
    def test_exhaustive_at_n2(self, W, count):
        assert lemma12_check(W, 2) == {"checked": count, "holds": True}

    def test_sampled_at_n4(self):
        assert lemma12_check(make_bec(0.3), 4, samples=5000)["holds"]

    def test_asymmetric_channel_rejected(self):
        Z = DiscreteChannel([[0.9, 0.1], [0.3, 0.7]])
        with pytest.raises(SymmetryViolation):
            symmetry_certificate(Z)

    def test_plain_channel_certificate(self):
        partition = symmetry_certificate(make_bec(0.2))
        assert sorted(map(sorted, partition)) == [[0, 2], [1]]
        assert capacity(make_bec(0.2)) == pytest.approx(0.8)
