"""Seeded random user drops: legitimate users, clustered eavesdroppers.

Each legitimate user (bob) gets one eavesdropper placed approximately in its
angular direction but closer to the base station, plus a ring of further
eavesdroppers at fixed Euclidean distance from the bob.  Randomness is
derived per entity as SeedSequence(seed, spawn_key=(kind, index)), so drops
are independent of evaluation order and bob k's entities are identical
across runs that only change the number of bobs or eavesdroppers.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, replace

import numpy as np

from lspsim.arraychannel import (
    ArrayGeometry,
    PolarPosition,
    critical_distance,
    rayleigh_distance,
)


class Collusion(enum.Enum):
    TC = "TC"  # total collusion: every eavesdropper combines
    PC = "PC"  # partial collusion: only each bob's own cluster combines


# spawn_key kinds for per-entity substreams
_BOBS, _ALIGNED, _RING = 0, 1, 2


def _stream(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=key)


def _child(seq: np.random.SeedSequence, index: int) -> np.random.SeedSequence:
    # non-mutating equivalent of seq.spawn(): child depends only on (entropy, key)
    return np.random.SeedSequence(entropy=seq.entropy,
                                  spawn_key=tuple(seq.spawn_key) + (index,))


def _generator(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class ScenarioConfig:
    num_bobs: int
    eves_per_bob: int
    collusion: Collusion
    angle_range: tuple[float, float]
    range_bounds: tuple[float, float]
    protected_radius: float
    radial_offset: float
    angular_jitter: float
    ring_radius: float
    seed: int

    def validate(self) -> None:
        if self.num_bobs < 1:
            raise ValueError("need at least one legitimate user")
        if self.eves_per_bob < 0:
            raise ValueError("eavesdroppers per user must be nonnegative")
        if not isinstance(self.collusion, Collusion):
            raise ValueError("collusion must be a Collusion value")
        lo, hi = self.angle_range
        if not (-np.pi / 2 < lo <= hi < np.pi / 2):
            raise ValueError("angle range must lie within (-pi/2, pi/2)")
        rlo, rhi = self.range_bounds
        if not (0 < rlo <= rhi):
            raise ValueError("range bounds must be positive and ordered")
        if rlo <= self.radial_offset:
            raise ValueError("lower range bound must exceed the radial offset")
        for name in ("protected_radius", "radial_offset", "ring_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.angular_jitter < 0:
            raise ValueError("angular jitter must be nonnegative")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)


def default_scenario_config(geometry: ArrayGeometry,
                            num_bobs: int,
                            eves_per_bob: int,
                            collusion: Collusion,
                            seed: int = 0) -> ScenarioConfig:
    """Deployment defaults tied to the array scale.

    Users fall in [3 r_crit, r_rayleigh] over a +-45 degree sector; the
    protected radius is r_crit; the aligned eavesdropper sits 2 r_crit closer
    to the base station; ring eavesdroppers sit at r_crit (TC) or r_crit/2
    (PC) from their bob.
    """
    r_crit = critical_distance(geometry)
    r_rayl = rayleigh_distance(geometry)
    ring = r_crit if collusion is Collusion.TC else r_crit / 2.0
    return ScenarioConfig(
        num_bobs=num_bobs,
        eves_per_bob=eves_per_bob,
        collusion=collusion,
        angle_range=(-np.pi / 4, np.pi / 4),
        range_bounds=(3.0 * r_crit, r_rayl),
        protected_radius=r_crit,
        radial_offset=2.0 * r_crit,
        angular_jitter=np.deg2rad(0.1),
        ring_radius=ring,
        seed=seed,
    )


@dataclass(frozen=True)
class ScenarioInstance:
    """One random drop.  clusters[k] holds the eve indices owned by bob k."""

    bobs: tuple[PolarPosition, ...]
    eves: tuple[PolarPosition, ...]
    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.clusters) != len(self.bobs):
            raise ValueError("one cluster per bob required")
        flat = [i for cluster in self.clusters for i in cluster]
        if sorted(flat) != list(range(len(self.eves))):
            raise ValueError("clusters must partition the eavesdropper indices")

    def eve_indices_for(self, k: int, collusion: Collusion) -> tuple[int, ...]:
        """Eavesdroppers that can combine against bob k's message."""
        if collusion is Collusion.TC:
            return tuple(range(len(self.eves)))
        return self.clusters[k]


def sample_bobs(config: ScenarioConfig,
                rng_stream: np.random.SeedSequence) -> list[PolarPosition]:
    """num_bobs independent draws: theta ~ U(angle_range), r ~ U(range_bounds)."""
    out = []
    for k in range(config.num_bobs):
        g = _generator(_child(rng_stream, k))
        theta = g.uniform(*config.angle_range)
        r = g.uniform(*config.range_bounds)
        out.append(PolarPosition(r, theta))
    return out


def place_aligned_eve(bob: PolarPosition,
                      config: ScenarioConfig,
                      rng_stream: np.random.SeedSequence) -> PolarPosition:
    """Eavesdropper radial_offset meters closer to the BS, jittered in angle."""
    if bob.range_m <= config.radial_offset:
        raise ValueError("user too close to the BS for the radial offset")
    g = _generator(rng_stream)
    delta = g.uniform(-config.angular_jitter, config.angular_jitter)
    return PolarPosition(bob.range_m - config.radial_offset,
                         bob.azimuth_rad + delta)


def place_ring_eves(bob: PolarPosition,
                    count: int,
                    radius: float,
                    rng_stream: np.random.SeedSequence) -> list[PolarPosition]:
    """count eavesdroppers at Euclidean distance radius from the bob,
    ring angles uniform in [0, 2 pi)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if not (0 < radius < bob.range_m):
        raise ValueError("ring must be positive and must not reach the BS")
    g = _generator(rng_stream)
    bx, by = bob.cartesian()
    out = []
    for phi in g.uniform(0.0, 2.0 * np.pi, size=count):
        ex, ey = bx + radius * np.cos(phi), by + radius * np.sin(phi)
        out.append(PolarPosition(float(np.hypot(ex, ey)),
                                 float(np.arctan2(ey, ex))))
    return out


def generate(config: ScenarioConfig) -> ScenarioInstance:
    """Full drop: per bob, one aligned eve plus (eves_per_bob - 1) ring eves.

    eves_per_bob = 0 is an explicit degenerate with no eavesdroppers at all,
    useful for single-user pipeline identities.
    """
    config.validate()
    bobs = sample_bobs(config, _stream(config.seed, _BOBS))
    eves: list[PolarPosition] = []
    clusters: list[tuple[int, ...]] = []
    for k, bob in enumerate(bobs):
        if config.eves_per_bob == 0:
            clusters.append(())
            continue
        members = [len(eves)]
        eves.append(place_aligned_eve(bob, config, _stream(config.seed, _ALIGNED, k)))
        for eve in place_ring_eves(bob, config.eves_per_bob - 1,
                                   config.ring_radius,
                                   _stream(config.seed, _RING, k)):
            members.append(len(eves))
            eves.append(eve)
        clusters.append(tuple(members))
    return ScenarioInstance(tuple(bobs), tuple(eves), tuple(clusters))


# ------------------------------------------------------------------ fixtures
# plain-text dump: one entity per line, "role bob_index range azimuth".
# repr() round-trips floats exactly, so load(dump(x)) == x.

def scenario_to_text(instance: ScenarioInstance) -> str:
    buf = io.StringIO()
    for k, bob in enumerate(instance.bobs):
        buf.write(f"bob {k} {bob.range_m!r} {bob.azimuth_rad!r}\n")
    for k, cluster in enumerate(instance.clusters):
        for i in cluster:
            eve = instance.eves[i]
            buf.write(f"eve {k} {eve.range_m!r} {eve.azimuth_rad!r}\n")
    return buf.getvalue()


def scenario_from_text(text: str) -> ScenarioInstance:
    bobs: dict[int, PolarPosition] = {}
    eve_rows: list[tuple[int, PolarPosition]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("bob", "eve"):
            raise ValueError(f"malformed scenario line {lineno}: {raw!r}")
        role, owner, r, theta = parts[0], int(parts[1]), float(parts[2]), float(parts[3])
        pos = PolarPosition(r, theta)
        if role == "bob":
            if owner in bobs:
                raise ValueError(f"duplicate bob index {owner} at line {lineno}")
            bobs[owner] = pos
        else:
            eve_rows.append((owner, pos))
    if sorted(bobs) != list(range(len(bobs))):
        raise ValueError("bob indices must be 0..K-1")
    ordered_bobs = tuple(bobs[k] for k in range(len(bobs)))
    eves: list[PolarPosition] = []
    clusters: list[tuple[int, ...]] = []
    for k in range(len(ordered_bobs)):
        members = []
        for owner, pos in eve_rows:
            if owner == k:
                members.append(len(eves))
                eves.append(pos)
        clusters.append(tuple(members))
    if len(eves) != len(eve_rows):
        raise ValueError("eavesdropper rows reference unknown bobs")
    return ScenarioInstance(ordered_bobs, tuple(eves), tuple(clusters))


def dump_scenario(instance: ScenarioInstance, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(scenario_to_text(instance))


def load_scenario(path) -> ScenarioInstance:
    with open(path, "r", encoding="ascii") as fh:
        return scenario_from_text(fh.read())
