"""Leakage-subspace precoding: projectors, ZF construction, greedy scheduling.

The transmitter never puts signal energy into the span of the eavesdropper
channels.  Under total collusion (TC) one global leakage subspace collects
every eavesdropper; under partial collusion (PC) each user only needs to
avoid its own cluster.  Precoders are zero-forcing inside the remaining
space; users enter the schedule greedily by projected-channel priority, and
a candidate is kept only if the waterfilled secrecy sum-rate strictly
improves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from lspsim.metrics import per_user_secrecy_rates, served_count
from lspsim.scenario import Collusion

# a candidate set whose Gram matrix is worse-conditioned than this cannot be
# inverted reliably and is treated as a rejected candidate
CONDITION_LIMIT = 1e12

# priorities below this fraction of the channel norm mean the channel lies in
# the leakage subspace; such users are never proposed
ZERO_PRIORITY_FRACTION = 1e-10


class InfeasibleCandidateSet(Exception):
    """Raised when the requested nulling constraints are (numerically) rank
    deficient; the scheduler treats this as a rejected candidate."""


def _entries(v) -> np.ndarray:
    return np.asarray(getattr(v, "entries", v), dtype=complex)


def _channel_list(channels) -> list[np.ndarray]:
    return [_entries(c) for c in channels]


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector onto the complement of a leakage subspace."""

    matrix: np.ndarray
    rank_deficit: int  # dimension projected out

    def apply(self, v) -> np.ndarray:
        return self.matrix @ _entries(v)


def orthogonal_projector(generators, dim: int | None = None) -> Projector:
    """Pi = I - Q Q^H with Q an orthonormal basis (SVD, rank-revealing) of
    span(generators).  Empty generator sets give the identity."""
    vecs = _channel_list(generators)
    if not vecs:
        if dim is None:
            raise ValueError("dim required for an empty generator set")
        return Projector(np.eye(dim, dtype=complex), 0)
    A = np.stack(vecs, axis=1)  # M x n
    if dim is not None and A.shape[0] != dim:
        raise ValueError("generator length mismatch")
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    tol = max(A.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    Q = U[:, :rank]
    return Projector(np.eye(A.shape[0], dtype=complex) - Q @ Q.conj().T, rank)


def tc_zf_precoders(selected_channels, proj: Projector) -> list[np.ndarray]:
    """Unnormalized ZF precoders restricted to the leakage-free subspace.

    With H the stack of conjugated selected channels (rows a_k^H), the
    precoders are the columns of Pi H^H (H Pi H^H)^{-1}: unit response to the
    own channel, zero to co-scheduled channels, zero into the leakage span.
    """
    A = np.stack(_channel_list(selected_channels), axis=1)  # M x k
    H = A.conj().T
    PiAH = proj.matrix @ A  # = Pi H^H
    G = H @ PiAH
    # a channel with no projected energy left cannot meet a unit-response
    # constraint (cond() alone misses this when k=1)
    norms = np.linalg.norm(A, axis=0)
    if np.any(np.linalg.norm(PiAH, axis=0) <= ZERO_PRIORITY_FRACTION * norms):
        raise InfeasibleCandidateSet("channel lies in the leakage subspace")
    if not np.all(np.isfinite(G)) or np.linalg.cond(G) > CONDITION_LIMIT:
        raise InfeasibleCandidateSet("projected channels are rank deficient")
    W = PiAH @ np.linalg.inv(G)
    return [W[:, i] for i in range(W.shape[1])]


def pc_zf_precoder(user_channel, co_scheduled_channels, cluster_channels) -> np.ndarray:
    """Per-user ZF under partial collusion.

    B stacks the conjugated channels of the user, its co-scheduled users and
    the user's cluster eavesdroppers; the precoder is the first column of
    B^H (B B^H)^{-1} (unit own response, zeros elsewhere).
    """
    rows = [_entries(user_channel)]
    rows += _channel_list(co_scheduled_channels)
    rows += _channel_list(cluster_channels)
    B = np.stack(rows, axis=0).conj()
    G = B @ B.conj().T
    if not np.all(np.isfinite(G)) or np.linalg.cond(G) > CONDITION_LIMIT:
        raise InfeasibleCandidateSet("stacked constraints are rank deficient")
    return (B.conj().T @ np.linalg.inv(G))[:, 0]


def _per_user_projectors(proj) -> list[Projector] | None:
    # accept one shared projector or one per user
    if isinstance(proj, Projector):
        return None
    return list(proj)


def initial_priorities(bob_channels, projectors) -> np.ndarray:
    """q_k = ||Pi a_k|| (shared projector) or ||Pi_k a_k|| (one per user)."""
    chans = _channel_list(bob_channels)
    per_user = _per_user_projectors(projectors)
    out = np.empty(len(chans))
    for k, a in enumerate(chans):
        p = projectors if per_user is None else per_user[k]
        out[k] = np.linalg.norm(p.apply(a))
    return out


def update_priorities(accepted_precoders, bob_channels, projectors) -> np.ndarray:
    """q_k = ||(Pi - sum_j w_j w_j^H) a_k|| over the remaining users.

    Accepted precoders must be unit-norm.  With none accepted this reduces to
    initial_priorities.
    """
    chans = _channel_list(bob_channels)
    per_user = _per_user_projectors(projectors)
    W = _channel_list(accepted_precoders)
    out = np.empty(len(chans))
    for k, a in enumerate(chans):
        p = projectors if per_user is None else per_user[k]
        v = p.apply(a)
        for w in W:
            v = v - w * np.vdot(w, a)
        out[k] = np.linalg.norm(v)
    return out


class WaterfillResult(NamedTuple):
    powers: np.ndarray
    mu: float  # threshold: p_k = max(0, 1/mu - 1/g_k)


def waterfilling(effective_gains, total_power: float) -> WaterfillResult:
    """Allocate p_k = [1/mu - 1/g_k]^+ with sum p_k = total_power.

    Maximizes sum log2(1 + g_k p_k).  Gains must be positive (filter
    zero-gain users beforehand).  Standard sort-and-deactivate: admit users
    in decreasing gain order while the weakest admitted user still gets
    positive power.
    """
    g = np.asarray(effective_gains, dtype=float)
    if g.size == 0:
        raise ValueError("no gains to allocate over")
    if np.any(g <= 0) or not np.all(np.isfinite(g)):
        raise ValueError("gains must be positive and finite")
    if not total_power > 0:
        raise ValueError("total power must be positive")
    order = np.argsort(-g, kind="stable")
    g_sorted = g[order]
    inv_cum = np.cumsum(1.0 / g_sorted)
    active = g.size
    while active > 1:
        level = (total_power + inv_cum[active - 1]) / active  # candidate 1/mu
        if level - 1.0 / g_sorted[active - 1] > 0:
            break
        active -= 1
    level = (total_power + inv_cum[active - 1]) / active
    p = np.zeros_like(g)
    p[order[:active]] = level - 1.0 / g_sorted[:active]
    # absorb rounding so the budget holds exactly
    p *= total_power / p.sum()
    return WaterfillResult(p, 1.0 / level)


@dataclass(frozen=True)
class ScheduleResult:
    """Outcome of a scheduling pass.

    selected holds user indices in acceptance order; precoders are unit-norm;
    iterations records (candidate, accepted, tentative sum-rate) per greedy
    step.
    """

    selected: tuple[int, ...]
    precoders: tuple[np.ndarray, ...]
    powers: np.ndarray
    per_user_secrecy_rate: np.ndarray
    sum_rate: float
    served: int
    iterations: tuple[tuple[int, bool, float], ...]


def _leak_channels(eve_channels, clusters, collusion, num_bobs):
    """Per-bob eavesdropper index sets for nulling and leakage accounting."""
    if collusion is Collusion.TC:
        return [tuple(range(len(eve_channels)))] * num_bobs
    if clusters is None:
        raise ValueError("partial collusion requires clusters")
    return [tuple(c) for c in clusters]


def _build_precoders(selected, bob_channels, eve_channels, leak_sets,
                     collusion, proj):
    if collusion is Collusion.TC:
        return tc_zf_precoders([bob_channels[k] for k in selected], proj)
    precoders = []
    for k in selected:
        co = [bob_channels[j] for j in selected if j != k]
        cluster = [eve_channels[v] for v in leak_sets[k]]
        precoders.append(pc_zf_precoder(bob_channels[k], co, cluster))
    return precoders


def evaluate_selection(selected, bob_channels, eve_channels, clusters,
                       collusion: Collusion, total_power: float,
                       noise_power: float, proj: Projector | None = None):
    """Precoders, waterfilled powers and secrecy rates for a fixed user set.

    Returns (precoders, powers, per-user rates) with entries aligned to
    `selected`.  Raises InfeasibleCandidateSet when the nulling constraints
    are rank deficient.
    """
    bob_channels = _channel_list(bob_channels)
    eve_channels = _channel_list(eve_channels)
    leak_sets = _leak_channels(eve_channels, clusters, collusion,
                               len(bob_channels))
    if collusion is Collusion.TC and proj is None:
        proj = orthogonal_projector(eve_channels, dim=len(bob_channels[0]))
    raw = _build_precoders(selected, bob_channels, eve_channels, leak_sets,
                           collusion, proj)
    precoders = [w / np.linalg.norm(w) for w in raw]
    gains = np.array([
        np.abs(np.vdot(w, bob_channels[k])) ** 2 / noise_power
        for w, k in zip(precoders, selected)
    ])
    powers, _ = waterfilling(gains, total_power)
    rates = per_user_secrecy_rates(
        precoders, powers,
        [bob_channels[k] for k in selected],
        eve_channels,
        [leak_sets[k] for k in selected],
        noise_power,
    )
    return precoders, powers, rates


def _empty_result() -> ScheduleResult:
    return ScheduleResult((), (), np.zeros(0), np.zeros(0), 0.0, 0, ())


def lsp_schedule(bob_channels, eve_channels, clusters, collusion: Collusion,
                 total_power: float, noise_power: float) -> ScheduleResult:
    """Greedy leakage-subspace scheduling.

    Users are proposed in order of projected-channel priority (ties: lowest
    index).  A candidate is accepted only if the waterfilled secrecy sum-rate
    strictly improves; the first rejection or infeasible candidate set ends
    the loop.  Users whose channel lies in the leakage subspace are never
    proposed.
    """
    bob_channels = _channel_list(bob_channels)
    eve_channels = _channel_list(eve_channels)
    if not bob_channels:
        return _empty_result()
    M = len(bob_channels[0])
    leak_sets = _leak_channels(eve_channels, clusters, collusion,
                               len(bob_channels))
    if collusion is Collusion.TC:
        shared = orthogonal_projector(eve_channels, dim=M)
        projs = shared
    else:
        projs = [orthogonal_projector([eve_channels[v] for v in leak_sets[k]],
                                      dim=M)
                 for k in range(len(bob_channels))]
        shared = None

    norms = np.array([np.linalg.norm(a) for a in bob_channels])
    q = initial_priorities(bob_channels, projs)
    candidates = set(range(len(bob_channels)))

    selected: list[int] = []
    best: tuple[list[np.ndarray], np.ndarray, np.ndarray] | None = None
    best_rate = 0.0
    trail: list[tuple[int, bool, float]] = []

    while candidates:
        viable = [k for k in sorted(candidates)
                  if q[k] > ZERO_PRIORITY_FRACTION * norms[k]]
        if not viable:
            break
        cand = max(viable, key=lambda k: (q[k], -k))
        try:
            precoders, powers, rates = evaluate_selection(
                selected + [cand], bob_channels, eve_channels, clusters,
                collusion, total_power, noise_power, proj=shared)
        except InfeasibleCandidateSet:
            trail.append((cand, False, float("nan")))
            break
        rate = float(rates.sum())
        if rate <= best_rate:
            trail.append((cand, False, rate))
            break
        trail.append((cand, True, rate))
        selected.append(cand)
        candidates.discard(cand)
        best = (precoders, powers, rates)
        best_rate = rate
        if candidates:
            remaining = sorted(candidates)
            q_rem = update_priorities(
                precoders, [bob_channels[k] for k in remaining],
                projs if shared is not None else [projs[k] for k in remaining])
            for k, val in zip(remaining, q_rem):
                q[k] = val

    if best is None:
        return _empty_result()
    precoders, powers, rates = best
    return ScheduleResult(
        selected=tuple(selected),
        precoders=tuple(precoders),
        powers=powers,
        per_user_secrecy_rate=rates,
        sum_rate=best_rate,
        served=served_count(powers, total_power),
        iterations=tuple(trail),
    )


def zf_baseline(bob_channels, eve_channels, clusters, collusion: Collusion,
                total_power: float, noise_power: float) -> ScheduleResult:
    """Conventional ZF: no scheduling, every user gets nulling constraints
    for all other users plus the eavesdroppers, then waterfilling.

    Rank-deficient constraint stacks are handled by including users greedily
    in index order; excluded users get a zero precoder and no power.
    """
    bob_channels = _channel_list(bob_channels)
    eve_channels = _channel_list(eve_channels)
    if not bob_channels:
        return _empty_result()
    M = len(bob_channels[0])
    K = len(bob_channels)
    leak_sets = _leak_channels(eve_channels, clusters, collusion, K)

    included: list[int] = []
    if collusion is Collusion.TC:
        proj = orthogonal_projector(eve_channels, dim=M)
        kept_precoders: list[np.ndarray] = []
        for k in range(K):
            try:
                trial = tc_zf_precoders([bob_channels[j] for j in included + [k]],
                                        proj)
            except InfeasibleCandidateSet:
                continue
            included.append(k)
            kept_precoders = trial
    else:
        kept_precoders = []
        for k in range(K):
            co = [bob_channels[j] for j in range(K) if j != k]
            cluster = [eve_channels[v] for v in leak_sets[k]]
            try:
                kept_precoders.append(pc_zf_precoder(bob_channels[k], co, cluster))
            except InfeasibleCandidateSet:
                continue
            included.append(k)

    if not included:
        return _empty_result()
    precoders = [w / np.linalg.norm(w) for w in kept_precoders]
    gains = np.array([
        np.abs(np.vdot(w, bob_channels[k])) ** 2 / noise_power
        for w, k in zip(precoders, included)
    ])
    powers, _ = waterfilling(gains, total_power)
    rates = per_user_secrecy_rates(
        precoders, powers,
        [bob_channels[k] for k in included],
        eve_channels,
        [leak_sets[k] for k in included],
        noise_power,
    )
    return ScheduleResult(
        selected=tuple(included),
        precoders=tuple(precoders),
        powers=powers,
        per_user_secrecy_rate=rates,
        sum_rate=float(rates.sum()),
        served=served_count(powers, total_power),
        iterations=(),
    )
