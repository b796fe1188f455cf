"""Command-line front end: run sweeps, validate configs, self-check, dump drops.

Exit codes: 0 success, 1 usage error (bad flags, unreadable or invalid
config), 2 runtime failure (I/O or numerical breakdown while running).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from lspsim.experiment import (
    ExperimentConfig,
    build_config,
    describe_config,
    parse_kv_text,
    realization_seed,
    run_sweep,
)
from lspsim.scenario import dump_scenario, generate


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through _UsageError so
    # usage problems uniformly exit 1
    def error(self, message):
        raise _UsageError(message)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH",
                   help="flat key=value config file")
    p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                   dest="overrides",
                   help="override a config key (repeatable, last wins)")
    p.add_argument("--out", metavar="DIR", default=".",
                   help="directory for output files")
    p.add_argument("--seed", metavar="N", type=int,
                   help="master seed override")
    p.add_argument("--quiet", action="store_true",
                   help="suppress progress output")
    p.add_argument("-v", "--verbose", action="store_true",
                   help="extra diagnostics")


def _build_parser() -> _Parser:
    parser = _Parser(prog="lspsim",
                     description="Leakage-subspace precoding simulator")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="{run,validate,check,dump-scenario}")
    for name, help_text in [
        ("run", "run the configured Monte Carlo sweep and write CSV"),
        ("validate", "parse the config and print the resolved parameters"),
        ("check", "run the numerical invariant suites"),
        ("dump-scenario", "write one scenario drop as a text fixture"),
    ]:
        _add_common_flags(sub.add_parser(name, help=help_text))
    return parser


def _load_config(args) -> ExperimentConfig:
    pairs: dict[str, str] = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise _UsageError(f"cannot read config file: {exc}") from exc
        pairs.update(parse_kv_text(text))
    for item in args.overrides:
        if "=" not in item:
            raise _UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        pairs[key.strip()] = value.strip()
    if args.seed is not None:
        pairs["master_seed"] = str(args.seed)
    try:
        config = build_config(pairs)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    out_path = os.path.join(args.out, os.path.basename(config.output_path))
    return replace(config, output_path=out_path), pairs


def _cmd_run(args) -> int:
    config, _ = _load_config(args)
    rows = run_sweep(config)
    if not args.quiet:
        print(f"wrote {len(rows)} rows to {config.output_path}")
        if args.verbose:
            for row in rows:
                print(" ", row.to_csv_line())
    return 0


def _cmd_validate(args) -> int:
    config, _ = _load_config(args)
    print(describe_config(config))
    return 0


def _cmd_dump_scenario(args) -> int:
    config, pairs = _load_config(args)
    scen = config.scenario
    if "scenario.seed" not in pairs:
        # default to the drop a sweep would see as realization 0
        scen = scen.with_seed(realization_seed(config.master_seed, 0))
    instance = generate(scen)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"scenario_seed{scen.seed}.txt")
    dump_scenario(instance, path)
    if not args.quiet:
        print(f"wrote {len(instance.bobs)} bobs / {len(instance.eves)} eves "
              f"to {path}")
    return 0


# ------------------------------------------------------------- self checks

def _check_projectors() -> bool:
    from lspsim.precoding import orthogonal_projector
    rng = np.random.default_rng(1)
    for _ in range(20):
        M = 16
        n = int(rng.integers(0, 2 * M))
        vecs = [rng.normal(size=M) + 1j * rng.normal(size=M) for _ in range(n)]
        p = orthogonal_projector(vecs, dim=M)
        scale = max(np.linalg.norm(p.matrix), 1.0)
        if np.linalg.norm(p.matrix - p.matrix.conj().T) > 1e-10 * scale:
            return False
        if np.linalg.norm(p.matrix @ p.matrix - p.matrix) > 1e-10 * scale:
            return False
        for v in vecs:
            if np.linalg.norm(p.matrix @ v) > 1e-10 * np.linalg.norm(v):
                return False
    return True


def _check_waterfilling() -> bool:
    from lspsim.precoding import waterfilling
    rng = np.random.default_rng(2)
    for _ in range(50):
        g = rng.uniform(1e-3, 1e3, size=int(rng.integers(1, 10)))
        p_tx = rng.uniform(1e-2, 1e2)
        p, mu = waterfilling(g, p_tx)
        if abs(p.sum() - p_tx) > 1e-12 * p_tx or np.any(p < 0):
            return False
        for gi, pi in zip(g, p):
            if pi > 0 and abs(pi - (1 / mu - 1 / gi)) > 1e-9:
                return False
            if pi == 0 and gi > mu * (1 + 1e-9):
                return False
    return True


def _random_drop(seed, num_bobs, eves_per_bob, collusion, M=32):
    from lspsim.arraychannel import half_wavelength_ula, steering_sw
    from lspsim.scenario import default_scenario_config
    geo = half_wavelength_ula(M)
    cfg = default_scenario_config(geo, num_bobs, eves_per_bob, collusion,
                                  seed)
    inst = generate(cfg)
    bobs = [steering_sw(b, geo).entries for b in inst.bobs]
    eves = [steering_sw(e, geo).entries for e in inst.eves]
    return bobs, eves, inst.clusters


def _check_nulling() -> bool:
    from lspsim.precoding import lsp_schedule
    from lspsim.scenario import Collusion
    for seed in range(5):
        for collusion, k_e in ((Collusion.TC, 2), (Collusion.PC, 3)):
            bobs, eves, clusters = _random_drop(seed, 5, k_e, collusion)
            res = lsp_schedule(bobs, eves, clusters, collusion, 10.0, 1.0)
            for i, k in enumerate(res.selected):
                w, p = res.precoders[i], res.powers[i]
                if p <= 0:
                    continue
                sig = p * abs(np.vdot(w, bobs[k])) ** 2
                idx = (range(len(eves)) if collusion is Collusion.TC
                       else clusters[k])
                leak = sum(p * abs(np.vdot(w, eves[v])) ** 2 for v in idx)
                if leak > 1e-10 * sig:
                    return False
    return True


def _check_greedy() -> bool:
    from lspsim.precoding import evaluate_selection, lsp_schedule
    from lspsim.scenario import Collusion
    for seed in range(3):
        bobs, eves, clusters = _random_drop(100 + seed, 6, 2, Collusion.TC)
        res = lsp_schedule(bobs, eves, clusters, Collusion.TC, 10.0, 1.0)
        accepted = [r for _, ok, r in res.iterations if ok]
        if any(b <= a for a, b in zip(accepted, accepted[1:])):
            return False
        if res.selected:
            _, _, rates = evaluate_selection(
                list(res.selected), bobs, eves, clusters, Collusion.TC,
                10.0, 1.0)
            if abs(res.sum_rate - float(rates.sum())) > 1e-9:
                return False
    return True


def _check_scenario_bounds() -> bool:
    from lspsim.arraychannel import half_wavelength_ula
    from lspsim.scenario import Collusion, default_scenario_config
    geo = half_wavelength_ula(64)
    for seed in range(50):
        cfg = default_scenario_config(geo, 4, 2, Collusion.TC, seed)
        inst = generate(cfg)
        if inst != generate(cfg):
            return False
        for k, bob in enumerate(inst.bobs):
            if not (cfg.range_bounds[0] <= bob.range_m <= cfg.range_bounds[1]):
                return False
            bx, by = bob.cartesian()
            for i in inst.clusters[k]:
                ex, ey = inst.eves[i].cartesian()
                if np.hypot(ex - bx, ey - by) < cfg.ring_radius - 1e-9:
                    return False
    return True


def _check_experiment_determinism() -> bool:
    from lspsim.arraychannel import PropagationModel, half_wavelength_ula
    from lspsim.experiment import Scheme, run_point
    from lspsim.scenario import Collusion, default_scenario_config
    geo = half_wavelength_ula(32)
    scen = default_scenario_config(geo, 2, 2, Collusion.TC, 0)
    cfg = ExperimentConfig(geometry=geo, scenario=scen, snr_grid_db=(10.0,),
                           num_realizations=3, master_seed=9,
                           output_path="unused.csv")
    a = run_point(cfg, Scheme.LSP, PropagationModel.SW, Collusion.TC, 10.0)
    b = run_point(cfg, Scheme.LSP, PropagationModel.SW, Collusion.TC, 10.0)
    return a == b


_CHECKS = [
    ("projector invariants", _check_projectors),
    ("waterfilling budget and threshold conditions", _check_waterfilling),
    ("scheduled-user leakage nulling", _check_nulling),
    ("greedy monotonicity and rate reproduction", _check_greedy),
    ("scenario bounds and determinism", _check_scenario_bounds),
    ("experiment determinism", _check_experiment_determinism),
]


def _cmd_check(args) -> int:
    failures = 0
    for name, check in _CHECKS:
        ok = check()
        if not ok:
            failures += 1
        if not args.quiet or not ok:
            print(f"{'PASS' if ok else 'FAIL'}  {name}")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 2
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "validate": _cmd_validate,
    "check": _cmd_check,
    "dump-scenario": _cmd_dump_scenario,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure: I/O, numerics
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
