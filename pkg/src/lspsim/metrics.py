"""Link-quality metrics: SINR, leakage-to-noise ratio, secrecy rates.

Conventions: precoders w_k are unit-norm columns, powers p_k are the
per-stream transmit powers, channels are the raw (unnormalized) steering
vectors.  All inner products are w^H a, i.e. np.vdot(w, a).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# waterfilling can return exact zeros; guard round-off when counting
SERVED_POWER_FRACTION = 1e-12


def _entries(v) -> np.ndarray:
    return np.asarray(getattr(v, "entries", v), dtype=complex)


def sinr(k: int, precoders, powers, bob_channels, noise_power: float) -> float:
    """p_k |w_k^H a_k|^2 / (sigma^2 + sum_{j != k} p_j |w_j^H a_k|^2).

    Index k and the interference sum run over the scheduled users only.
    """
    a_k = _entries(bob_channels[k])
    signal = powers[k] * np.abs(np.vdot(_entries(precoders[k]), a_k)) ** 2
    interference = sum(
        powers[j] * np.abs(np.vdot(_entries(precoders[j]), a_k)) ** 2
        for j in range(len(precoders)) if j != k
    )
    return float(signal / (noise_power + interference))


def linr(k: int, v_set, precoder, power: float, eve_channels,
         noise_power: float) -> float:
    """sum_{v in v_set} p_k |w_k^H a_v|^2 / sigma^2.

    Additive over the eavesdropper set: colluders combine non-coherently.
    v_set indexes into eve_channels (all eavesdroppers under total collusion,
    the user's own cluster under partial collusion).
    """
    w_k = _entries(precoder)
    total = sum(np.abs(np.vdot(w_k, _entries(eve_channels[v]))) ** 2 for v in v_set)
    return float(power * total / noise_power)


def secrecy_rate(sinr_k: float, linr_k: float) -> float:
    """max(0, log2((1 + SINR) / (1 + LINR))), clamped per user."""
    return max(0.0, float(np.log2((1.0 + sinr_k) / (1.0 + linr_k))))


def per_user_secrecy_rates(precoders, powers, bob_channels, eve_channels,
                           leak_sets, noise_power: float) -> np.ndarray:
    """Clamped secrecy rate of each scheduled user.

    leak_sets[k] lists the eavesdropper indices whose combined leakage counts
    against user k.
    """
    rates = np.empty(len(precoders))
    for k in range(len(precoders)):
        s = sinr(k, precoders, powers, bob_channels, noise_power)
        l = linr(k, leak_sets[k], precoders[k], powers[k], eve_channels,
                 noise_power)
        rates[k] = secrecy_rate(s, l)
    return rates


def secrecy_sum_rate(precoders, powers, bob_channels, eve_channels,
                     leak_sets, noise_power: float) -> float:
    return float(np.sum(per_user_secrecy_rates(
        precoders, powers, bob_channels, eve_channels, leak_sets, noise_power)))


def served_count(powers, total_power: float) -> int:
    """Number of users with nonvanishing allocated power."""
    p = np.asarray(powers, dtype=float)
    return int(np.sum(p > SERVED_POWER_FRACTION * total_power))


@dataclass(frozen=True)
class LinkMetrics:
    sinr: np.ndarray
    linr: np.ndarray
    secrecy_rate: np.ndarray
    served_count: int

    @property
    def sum_rate(self) -> float:
        return float(self.secrecy_rate.sum())


def compute_link_metrics(precoders, powers, bob_channels, eve_channels,
                         leak_sets, noise_power: float,
                         total_power: float) -> LinkMetrics:
    n = len(precoders)
    sinrs = np.array([sinr(k, precoders, powers, bob_channels, noise_power)
                      for k in range(n)])
    linrs = np.array([linr(k, leak_sets[k], precoders[k], powers[k],
                           eve_channels, noise_power) for k in range(n)])
    rates = np.array([secrecy_rate(s, l) for s, l in zip(sinrs, linrs)])
    return LinkMetrics(sinrs, linrs, rates, served_count(powers, total_power))
