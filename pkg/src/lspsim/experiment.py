"""Seeded Monte Carlo sweeps over SNR, scheme and channel model.

Transmit SNR is defined as P_TX / sigma^2 with sigma^2 = 1 and unit
reference channel power, so absolute rates carry an arbitrary scale; only
orderings and trends across curves are meaningful.  Scenario realizations
depend only on (master_seed, realization index), never on the swept axes, so
every curve is evaluated on the same drops (common random numbers).
"""

from __future__ import annotations

import enum
import math
import os
import tempfile
from dataclasses import dataclass, replace

import numpy as np

from lspsim.arraychannel import (
    ArrayGeometry,
    PropagationModel,
    steering_pw,
    steering_sw,
)
from lspsim.precoding import lsp_schedule, zf_baseline
from lspsim.scenario import Collusion, ScenarioConfig, generate

NOISE_POWER = 1.0

CSV_HEADER = ("scheme,model,collusion,K_B,k_e,snr_db,mean_secrecy_rate,"
              "stderr_rate,mean_served_users,stderr_served,num_realizations,"
              "failures,master_seed")


class Scheme(enum.Enum):
    LSP = "LSP"
    ZF = "ZF"


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: ArrayGeometry
    scenario: ScenarioConfig
    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
    num_realizations: int = 1000
    schemes: tuple[Scheme, ...] = (Scheme.LSP, Scheme.ZF)
    models: tuple[PropagationModel, ...] = (PropagationModel.SW,
                                            PropagationModel.PW)
    master_seed: int = 0
    output_path: str = "results.csv"

    def validate(self) -> None:
        if not self.snr_grid_db:
            raise ValueError("SNR grid must be nonempty")
        if self.num_realizations < 1:
            raise ValueError("need at least one realization")
        if not self.schemes or not self.models:
            raise ValueError("schemes and models must be nonempty")
        if not (0 <= self.master_seed < 2**64):
            raise ValueError("master seed must fit in 64 unsigned bits")
        self.scenario.validate()


@dataclass(frozen=True)
class ResultRow:
    scheme: Scheme
    model: PropagationModel
    collusion: Collusion
    K_B: int
    k_e: int
    snr_db: float
    mean_secrecy_rate: float
    stderr_rate: float
    mean_served_users: float
    stderr_served: float
    num_realizations: int
    failures: int
    master_seed: int

    def sort_key(self):
        return (self.scheme.value, self.model.value, self.collusion.value,
                self.K_B, self.snr_db)

    def to_csv_line(self) -> str:
        return ",".join([
            self.scheme.value,
            self.model.value,
            self.collusion.value,
            str(self.K_B),
            str(self.k_e),
            repr(float(self.snr_db)),
            repr(float(self.mean_secrecy_rate)),
            repr(float(self.stderr_rate)),
            repr(float(self.mean_served_users)),
            repr(float(self.stderr_served)),
            str(self.num_realizations),
            str(self.failures),
            str(self.master_seed),
        ])


def realization_seed(master_seed: int, index: int) -> int:
    """Per-realization scenario seed, independent of the swept axes."""
    ss = np.random.SeedSequence([master_seed, index])
    return int(ss.generate_state(1, np.uint64)[0])


def _run_one(scenario_cfg: ScenarioConfig, model: PropagationModel,
             geometry: ArrayGeometry, scheme: Scheme, collusion: Collusion,
             total_power: float) -> tuple[float, float, bool]:
    """One realization: (secrecy sum-rate, served users, failed)."""
    steer = steering_sw if model is PropagationModel.SW else steering_pw
    try:
        inst = generate(scenario_cfg)
        bobs = [steer(b, geometry).entries for b in inst.bobs]
        eves = [steer(e, geometry).entries for e in inst.eves]
        run = lsp_schedule if scheme is Scheme.LSP else zf_baseline
        res = run(bobs, eves, inst.clusters, collusion, total_power,
                  NOISE_POWER)
        return res.sum_rate, float(res.served), False
    except np.linalg.LinAlgError:
        return 0.0, 0.0, True


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(values.size))


def run_point(config: ExperimentConfig, scheme: Scheme,
              model: PropagationModel, collusion: Collusion,
              snr_db: float, mapper=map) -> ResultRow:
    """Monte Carlo estimate of one curve point.

    mapper must be an order-preserving map (builtin map, or executor.map for
    concurrent realizations); results are merged by realization index, so the
    outcome does not depend on execution order.
    """
    config.validate()
    total_power = NOISE_POWER * 10.0 ** (snr_db / 10.0)
    scenario_cfg = replace(config.scenario, collusion=collusion)

    def one(index: int) -> tuple[float, float, bool]:
        cfg_i = scenario_cfg.with_seed(
            realization_seed(config.master_seed, index))
        return _run_one(cfg_i, model, config.geometry, scheme, collusion,
                        total_power)

    outcomes = list(mapper(one, range(config.num_realizations)))
    rates = np.array([r for r, _, _ in outcomes])
    served = np.array([s for _, s, _ in outcomes])
    failures = sum(1 for _, _, failed in outcomes if failed)
    mean_rate, se_rate = _mean_stderr(rates)
    mean_served, se_served = _mean_stderr(served)
    return ResultRow(
        scheme=scheme,
        model=model,
        collusion=collusion,
        K_B=config.scenario.num_bobs,
        k_e=config.scenario.eves_per_bob,
        snr_db=float(snr_db),
        mean_secrecy_rate=mean_rate,
        stderr_rate=se_rate,
        mean_served_users=mean_served,
        stderr_served=se_served,
        num_realizations=config.num_realizations,
        failures=failures,
        master_seed=config.master_seed,
    )


def run_sweep(config: ExperimentConfig, mapper=map,
              write: bool = True) -> list[ResultRow]:
    """All (scheme, model, SNR) combinations for the configured scenario;
    rows sorted canonically and written atomically as CSV."""
    config.validate()
    rows = [
        run_point(config, scheme, model, config.scenario.collusion, snr_db,
                  mapper=mapper)
        for scheme in config.schemes
        for model in config.models
        for snr_db in config.snr_grid_db
    ]
    rows.sort(key=ResultRow.sort_key)
    if write:
        write_csv(rows, config.output_path)
    return rows


def write_csv(rows, path) -> None:
    """Canonically sorted CSV, written via temp file + rename so readers
    never observe a partial file."""
    ordered = sorted(rows, key=ResultRow.sort_key)
    text = CSV_HEADER + "\n" + "".join(r.to_csv_line() + "\n" for r in ordered)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------- config files
# flat key=value text; dotted keys address the geometry/scenario subobjects.

_CONFIG_KEYS = frozenset([
    "geometry.num_elements", "geometry.spacing", "geometry.wavelength",
    "geometry.ref_power",
    "scenario.num_bobs", "scenario.eves_per_bob", "scenario.collusion",
    "scenario.angle_range", "scenario.range_bounds",
    "scenario.protected_radius", "scenario.radial_offset",
    "scenario.angular_jitter", "scenario.ring_radius", "scenario.seed",
    "snr_grid_db", "num_realizations", "schemes", "models", "master_seed",
    "output_path",
])


def parse_kv_text(text: str) -> dict[str, str]:
    """KEY=VALUE per line; blank lines and # comments are skipped."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line {lineno}: {raw!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def _parse_pair(value: str) -> tuple[float, float]:
    parts = [float(p) for p in value.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {value!r}")
    return (parts[0], parts[1])


def _parse_enum_list(value: str, enum_cls):
    out = []
    for name in value.split(","):
        name = name.strip()
        try:
            out.append(enum_cls(name))
        except ValueError:
            valid = ",".join(e.value for e in enum_cls)
            raise ValueError(f"unknown {enum_cls.__name__} {name!r} "
                             f"(valid: {valid})") from None
    return tuple(out)


def build_config(pairs: dict[str, str]) -> ExperimentConfig:
    """ExperimentConfig from key=value pairs; unknown keys are an error and
    omitted keys take the deployment defaults."""
    from lspsim.arraychannel import DEFAULT_WAVELENGTH
    from lspsim.scenario import default_scenario_config

    unknown = set(pairs) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")

    def get(key, parse, default):
        return parse(pairs[key]) if key in pairs else default

    wavelength = get("geometry.wavelength", float, DEFAULT_WAVELENGTH)
    geometry = ArrayGeometry(
        num_elements=get("geometry.num_elements", int, 100),
        spacing=get("geometry.spacing", float, wavelength / 2.0),
        wavelength=wavelength,
        ref_power=get("geometry.ref_power", float, 1.0),
    )
    collusion = get("scenario.collusion", Collusion, Collusion.TC)
    scenario = default_scenario_config(
        geometry,
        num_bobs=get("scenario.num_bobs", int, 10),
        eves_per_bob=get("scenario.eves_per_bob", int,
                         2 if collusion is Collusion.TC else 6),
        collusion=collusion,
        seed=get("scenario.seed", int, 0),
    )
    scenario = replace(
        scenario,
        angle_range=get("scenario.angle_range", _parse_pair,
                        scenario.angle_range),
        range_bounds=get("scenario.range_bounds", _parse_pair,
                         scenario.range_bounds),
        protected_radius=get("scenario.protected_radius", float,
                             scenario.protected_radius),
        radial_offset=get("scenario.radial_offset", float,
                          scenario.radial_offset),
        angular_jitter=get("scenario.angular_jitter", float,
                           scenario.angular_jitter),
        ring_radius=get("scenario.ring_radius", float, scenario.ring_radius),
    )
    config = ExperimentConfig(
        geometry=geometry,
        scenario=scenario,
        snr_grid_db=get("snr_grid_db",
                        lambda v: tuple(float(x) for x in v.split(",")),
                        (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)),
        num_realizations=get("num_realizations", int, 1000),
        schemes=get("schemes", lambda v: _parse_enum_list(v, Scheme),
                    (Scheme.LSP, Scheme.ZF)),
        models=get("models",
                   lambda v: _parse_enum_list(v, PropagationModel),
                   (PropagationModel.SW, PropagationModel.PW)),
        master_seed=get("master_seed", int, 0),
        output_path=get("output_path", str, "results.csv"),
    )
    config.validate()
    return config


def describe_config(config: ExperimentConfig) -> str:
    """Resolved parameter table, including the derived array distances."""
    from lspsim.arraychannel import critical_distance, rayleigh_distance
    g, s = config.geometry, config.scenario
    lines = [
        f"geometry.num_elements = {g.num_elements}",
        f"geometry.spacing = {g.spacing!r}",
        f"geometry.wavelength = {g.wavelength!r}",
        f"geometry.ref_power = {g.ref_power!r}",
        f"derived.aperture = {g.aperture()!r}",
        f"derived.rayleigh_distance = {rayleigh_distance(g)!r}",
        f"derived.critical_distance = {critical_distance(g)!r}",
        f"scenario.num_bobs = {s.num_bobs}",
        f"scenario.eves_per_bob = {s.eves_per_bob}",
        f"scenario.collusion = {s.collusion.value}",
        f"scenario.angle_range = {s.angle_range[0]!r},{s.angle_range[1]!r}",
        f"scenario.range_bounds = {s.range_bounds[0]!r},{s.range_bounds[1]!r}",
        f"scenario.protected_radius = {s.protected_radius!r}",
        f"scenario.radial_offset = {s.radial_offset!r}",
        f"scenario.angular_jitter = {s.angular_jitter!r}",
        f"scenario.ring_radius = {s.ring_radius!r}",
        f"scenario.seed = {s.seed}",
        f"snr_grid_db = {','.join(repr(x) for x in config.snr_grid_db)}",
        f"num_realizations = {config.num_realizations}",
        f"schemes = {','.join(x.value for x in config.schemes)}",
        f"models = {','.join(x.value for x in config.models)}",
        f"master_seed = {config.master_seed}",
        f"output_path = {config.output_path}",
    ]
    return "\n".join(lines)
