"""Command-line front end: ``run``, ``stage1``, ``stage2`` and ``footprint``."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .core import SteeringWeights, WorldBounds
from .engine import ScenarioKind, SimConfig, run_simulation, write_trace
from .experiments import EffectRow, run_stage1, run_stage2
from .render import render_footprints


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CliConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    replicates: int = 10
    master_seed: int = 0
    output_dir: Path = Path("results")
    capture_trajectory: bool = False
    workers: int = 1


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _scenario(s: str) -> ScenarioKind:
    v = s.strip().lower()
    for kind in ScenarioKind:
        if v in (kind.name.lower(), str(kind.value)):
            return kind
    raise ValueError(f"unknown scenario {s!r}; expected one of {[k.name.lower() for k in ScenarioKind]}")


def _in(lo: float, hi: float) -> Callable[[float], bool]:
    return lambda x: lo <= x <= hi


def _pos(x: float) -> bool:
    return x > 0


# key -> (parser, range check, range description)
_KEYS: dict[str, tuple[Callable[[str], object], Callable[[object], bool], str]] = {
    "n_blue": (int, lambda x: x >= 1, ">= 1"),
    "width": (float, _pos, "> 0"),
    "length": (float, _pos, "> 0"),
    "w_c": (float, _in(0, 1), "[0, 1]"),
    "w_a": (float, _in(0, 1), "[0, 1]"),
    "w_s": (float, _in(0, 1), "[0, 1]"),
    "graph_p": (float, _in(0, 1), "[0, 1]"),
    "connected_graph": (_bool, lambda x: True, "true/false"),
    "eta": (float, _in(0, 1), "[0, 1]"),
    "tau_blue_leader": (float, _in(-1, 1), "[-1, 1]"),
    "tau_red": (float, _in(-1, 1), "[-1, 1]"),
    "trust_dynamics_enabled": (_bool, lambda x: True, "true/false"),
    "scenario": (_scenario, lambda x: True, "velocity_noise/network_changes/both"),
    "iterations": (int, lambda x: x >= 2, ">= 2"),
    "delta": (float, _pos, "> 0"),
    "r_sep": (float, _pos, "> 0"),
    "v_max": (float, _pos, "> 0"),
    "leader_speed": (float, _pos, "> 0"),
    "max_steps_per_iteration": (int, lambda x: x >= 1, ">= 1"),
    "replicates": (int, lambda x: x >= 2, ">= 2"),
    "master_seed": (int, lambda x: x >= 0, ">= 0"),
    "output_dir": (Path, lambda x: True, "a path"),
    "capture_trajectory": (_bool, lambda x: True, "true/false"),
    "workers": (int, lambda x: x >= 1, ">= 1"),
}
_CLI_ONLY = {"replicates", "master_seed", "output_dir", "capture_trajectory", "workers"}


def parse_config(text: str) -> CliConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unset keys keep their defaults."""
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        parse, ok, desc = _KEYS[key]
        try:
            parsed = parse(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: cannot parse {key} = {value!r}: {exc}") from None
        if not ok(parsed):
            raise ConfigError(f"line {lineno}: {key} = {value} is out of range; {key} must be {desc}")
        values[key] = parsed
        lines[key] = lineno

    sim_kw = {k: v for k, v in values.items() if k not in _CLI_ONLY and k not in ("width", "length", "w_c", "w_a", "w_s")}
    defaults = SimConfig()
    try:
        bounds = WorldBounds(values.get("width", defaults.bounds.width), values.get("length", defaults.bounds.length))
        weights = SteeringWeights(
            values.get("w_c", defaults.weights.w_c),
            values.get("w_a", defaults.weights.w_a),
            values.get("w_s", defaults.weights.w_s),
        )
        sim = SimConfig(bounds=bounds, weights=weights, **sim_kw)
    except ValueError as exc:
        where = ", ".join(f"line {n}" for n in sorted(lines.values()))
        raise ConfigError(f"invalid configuration ({where or 'defaults'}): {exc}") from None
    cli_kw = {k: v for k, v in values.items() if k in _CLI_ONLY}
    return CliConfig(sim=sim, **cli_kw)


def format_config(cfg: CliConfig) -> str:
    """Inverse of :func:`parse_config`: every key written out explicitly."""
    s = cfg.sim
    items: dict[str, object] = {
        f.name: getattr(s, f.name) for f in dataclasses.fields(SimConfig) if f.name not in ("bounds", "weights")
    }
    items.update(width=s.bounds.width, length=s.bounds.length, w_c=s.weights.w_c, w_a=s.weights.w_a, w_s=s.weights.w_s)
    items.update(
        replicates=cfg.replicates,
        master_seed=cfg.master_seed,
        output_dir=cfg.output_dir,
        capture_trajectory=cfg.capture_trajectory,
        workers=cfg.workers,
    )

    def fmt(v: object) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, ScenarioKind):
            return v.name.lower()
        if isinstance(v, float):
            return repr(v)
        return str(v)

    return "".join(f"{k} = {fmt(items[k])}\n" for k in _KEYS)


def _scenario_label(kind: ScenarioKind) -> str:
    return kind.name.lower()


def emit_results_csv(rows: Sequence[EffectRow], destination) -> Path:
    """Write rows with 2-decimal values plus a full-precision ``*.raw.csv`` sibling."""
    if not rows:
        raise ValueError("no rows to write")
    path = Path(destination)
    n = len(rows[0].per_replicate)
    header = ["scenario", "effect"] + [f"R{i + 1}" for i in range(n)] + ["avg", "std", "conf"]
    raw_path = path.with_suffix(".raw.csv")
    with path.open("w", newline="") as fh, raw_path.open("w", newline="") as raw:
        pretty = csv.writer(fh, lineterminator="\n")
        full = csv.writer(raw, lineterminator="\n")
        pretty.writerow(header)
        full.writerow(header)
        for row in rows:
            nums = list(row.per_replicate) + [row.stats.mean, row.stats.std, row.stats.ci_halfwidth]
            label = [_scenario_label(row.scenario), row.effect_name]
            pretty.writerow(label + [f"{x:.2f}" for x in nums])
            full.writerow(label + [repr(x) for x in nums])
    return path


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--seed", type=int, help="run seed (run/footprint) or master seed (stage1/stage2)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--trace", action="store_true", help="also write the per-tick trajectory trace CSV")
    common.add_argument("--workers", type=int, help="worker processes for stage runs")

    parser = argparse.ArgumentParser(prog="trustswarm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="one simulation; prints d_bar")
    sub.add_parser("stage1", parents=[common], help="noise-only design; writes stage1.csv")
    sub.add_parser("stage2", parents=[common], help="trust x noise design; writes stage2.csv")
    fp = sub.add_parser("footprint", parents=[common], help="one traced run rendered to footprint.svg")
    fp.add_argument("--every", type=int, default=1, help="draw every N-th tick")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = parse_config(args.config.read_text()) if args.config else CliConfig()
        seed = args.seed if args.seed is not None else cfg.master_seed
        out = args.out if args.out is not None else cfg.output_dir
        workers = args.workers if args.workers is not None else cfg.workers
        trace = args.trace or cfg.capture_trajectory

        if args.command in ("run", "footprint"):
            capture = trace or args.command == "footprint"
            result = run_simulation(cfg.sim, seed, capture_trajectory=capture)
            if capture:
                out.mkdir(parents=True, exist_ok=True)
            if trace:
                with (out / "trace.csv").open("w", newline="") as fh:
                    write_trace(result.trajectory, fh)
            if args.command == "footprint":
                path = render_footprints(result.trajectory, cfg.sim.bounds, out / "footprint.svg", result.goals, args.every)
                print(f"wrote {path}")
            print(f"d_bar = {result.d_bar:.6f}")
        else:
            stage = run_stage1 if args.command == "stage1" else run_stage2
            rows = stage(cfg.sim, cfg.replicates, seed, workers=workers)
            out.mkdir(parents=True, exist_ok=True)
            path = emit_results_csv(rows, out / f"{args.command}.csv")
            print(f"wrote {path}")
    except (ConfigError, OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
