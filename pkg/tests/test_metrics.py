import numpy as np
import pytest

from lspsim.arraychannel import half_wavelength_ula, steering_sw
from lspsim.metrics import (
    LinkMetrics,
    compute_link_metrics,
    linr,
    per_user_secrecy_rates,
    secrecy_rate,
    secrecy_sum_rate,
    served_count,
    sinr,
)
from lspsim.precoding import waterfilling
from lspsim.scenario import Collusion, default_scenario_config, generate

GEO = half_wavelength_ula(32)


def random_state(seed, n_users=3, n_eves=4, M=8):
    rng = np.random.default_rng(seed)
    chans = [rng.normal(size=M) + 1j * rng.normal(size=M) for _ in range(n_users)]
    eves = [rng.normal(size=M) + 1j * rng.normal(size=M) for _ in range(n_eves)]
    precoders = []
    for _ in range(n_users):
        w = rng.normal(size=M) + 1j * rng.normal(size=M)
        precoders.append(w / np.linalg.norm(w))
    powers = rng.uniform(0.0, 2.0, size=n_users)
    return chans, eves, precoders, powers


# --------------------------------------------------------------------- sinr

def test_sinr_exact_zf_reduces_to_snr():
    a1 = np.array([1.0, 0.0], dtype=complex)
    a2 = np.array([0.0, 1.0], dtype=complex)
    w = [a1, a2]  # zero cross terms by construction
    assert sinr(0, w, [2.0, 1.0], [a1, a2], 0.5) == pytest.approx(2.0 / 0.5)


def test_sinr_zero_power_is_zero():
    a = np.array([1.0, 0.0], dtype=complex)
    assert sinr(0, [a], [0.0], [a], 1.0) == 0.0


def test_sinr_two_user_hand_case():
    # matched filters on orthonormal channels, unit powers and noise
    a1 = np.array([1.0, 0.0], dtype=complex)
    a2 = np.array([0.0, 1.0], dtype=complex)
    got = sinr(0, [a1, a2], [1.0, 1.0], [a1, a2], 1.0)
    assert got == pytest.approx(1.0, rel=1e-15)


def test_sinr_counts_only_scheduled_interferers():
    rng = np.random.default_rng(3)
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    w1 = rng.normal(size=4) + 1j * rng.normal(size=4)
    w1 /= np.linalg.norm(w1)
    full = sinr(0, [w1], [1.5], [a], 1.0)
    assert full == pytest.approx(1.5 * abs(np.vdot(w1, a)) ** 2, rel=1e-12)


# --------------------------------------------------------------------- linr

def test_linr_empty_set_is_zero():
    w = np.array([1.0, 0.0], dtype=complex)
    assert linr(0, (), w, 1.0, [], 1.0) == 0.0


def test_linr_orthogonal_eve_is_zero():
    w = np.array([1.0, 0.0], dtype=complex)
    ev = np.array([0.0, 1.0], dtype=complex)
    assert linr(0, (0,), w, 3.0, [ev], 1.0) == 0.0


def test_linr_partial_never_exceeds_total():
    cfg = default_scenario_config(GEO, 4, 3, Collusion.PC, seed=11)
    inst = generate(cfg)
    rng = np.random.default_rng(0)
    eves = [steering_sw(e, GEO).entries for e in inst.eves]
    for k in range(4):
        w = rng.normal(size=GEO.num_elements) + 1j * rng.normal(size=GEO.num_elements)
        w /= np.linalg.norm(w)
        all_idx = inst.eve_indices_for(k, Collusion.TC)
        own_idx = inst.eve_indices_for(k, Collusion.PC)
        assert linr(k, own_idx, w, 1.0, eves, 1.0) <= linr(k, all_idx, w, 1.0, eves, 1.0)


# ------------------------------------------------------------ secrecy rates

def test_secrecy_rate_clamp_boundary():
    assert secrecy_rate(2.7, 2.7) == 0.0
    assert secrecy_rate(1.0, 3.0) == 0.0


def test_secrecy_rate_leak_free():
    assert secrecy_rate(3.0, 0.0) == pytest.approx(2.0)


def test_secrecy_sum_rate_mixed_pair():
    # per-user clamping: log2(4/2) + max(0, log2(2/4)) = 1
    rates = [secrecy_rate(3.0, 1.0), secrecy_rate(1.0, 3.0)]
    assert sum(rates) == pytest.approx(1.0)


def test_sum_rate_equals_capacity_when_no_leakage():
    chans, _, precoders, powers = random_state(7)
    leak_sets = [(), (), ()]
    got = secrecy_sum_rate(precoders, powers, chans, [], leak_sets, 1.0)
    want = sum(
        np.log2(1.0 + sinr(k, precoders, powers, chans, 1.0)) for k in range(3)
    )
    assert got == pytest.approx(want, rel=1e-12)


def test_straight_line_recomputation_oracle():
    # independent loop-level evaluation of the SINR/LINR/rate formulas
    for seed in range(100):
        chans, eves, precoders, powers = random_state(seed)
        leak_sets = [(0, 1), (1, 2, 3), ()]
        noise = 0.7
        got = per_user_secrecy_rates(precoders, powers, chans, eves, leak_sets, noise)
        for k in range(3):
            sig = powers[k] * abs(np.conj(precoders[k]) @ chans[k]) ** 2
            interf = 0.0
            for j in range(3):
                if j != k:
                    interf += powers[j] * abs(np.conj(precoders[j]) @ chans[k]) ** 2
            s = sig / (noise + interf)
            leak = 0.0
            for v in leak_sets[k]:
                leak += powers[k] * abs(np.conj(precoders[k]) @ eves[v]) ** 2
            l = leak / noise
            want = max(0.0, np.log2((1 + s) / (1 + l)))
            assert got[k] == pytest.approx(want, abs=1e-12)


def test_rate_monotone_in_power_under_exact_nulling():
    # orthonormal channels, matched filters, no eavesdroppers: rate grows with
    # the budget when waterfilling is re-run
    M = 8
    chans = [np.eye(M, dtype=complex)[i] * (1.0 + 0.3 * i) for i in range(4)]
    precoders = [c / np.linalg.norm(c) for c in chans]
    gains = np.array([abs(np.vdot(w, a)) ** 2 for w, a in zip(precoders, chans)])
    last = -1.0
    for p_tx in [0.1, 0.5, 1.0, 5.0, 25.0, 125.0]:
        powers, _ = waterfilling(gains, p_tx)
        rate = secrecy_sum_rate(precoders, powers, chans, [], [()] * 4, 1.0)
        assert rate >= last
        last = rate


# ------------------------------------------------------------------- served

def test_served_count_threshold():
    p_tx = 4.0
    powers = [1.0, 0.0, 1e-12 * p_tx, 1.1e-12 * p_tx]
    assert served_count(powers, p_tx) == 2  # strict inequality at the guard


def test_compute_link_metrics_bundles():
    chans, eves, precoders, powers = random_state(5)
    lm = compute_link_metrics(precoders, powers, chans, eves,
                              [(0,), (1,), (2,)], 1.0, float(np.sum(powers)))
    assert isinstance(lm, LinkMetrics)
    assert lm.secrecy_rate.shape == (3,)
    assert lm.sum_rate == pytest.approx(float(lm.secrecy_rate.sum()))
    assert 0 <= lm.served_count <= 3
    assert np.all(lm.secrecy_rate >= 0)
