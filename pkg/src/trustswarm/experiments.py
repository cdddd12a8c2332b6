"""Two-stage 2^k factorial study over the three red-agent scenarios.

Stage 1 freezes every trust at 1 and varies only the noise level. Stage 2
enables trust dynamics and crosses leader trust, red trust and noise. Within
one (scenario, replicate) cell every factor combination reuses the same
derived seed, so the runs being contrasted start from identical agents,
network and goal sequence. Replicate ``r`` also uses the same seed in all three
scenarios, so scenario rows are paired column by column as well.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .engine import ScenarioKind, SimConfig, run_simulation

FACTORS = ("tauB", "tauR", "eta")
LEVELS = ("-", "+")


@dataclass(frozen=True)
class FactorLevels:
    eta_low: float = 0.1
    eta_high: float = 0.9
    tau_B_low: float = 0.2
    tau_B_high: float = 1.0
    tau_R_low: float = -0.2
    tau_R_high: float = -1.0

    def value(self, factor: str, level: str) -> float:
        attr = {"tauB": "tau_B", "tauR": "tau_R", "eta": "eta"}[factor]
        return getattr(self, f"{attr}_{'high' if level == '+' else 'low'}")


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    ci_halfwidth: float


@dataclass(frozen=True)
class EffectRow:
    scenario: ScenarioKind
    effect_name: str
    per_replicate: tuple[float, ...]
    stats: SummaryStats


def summary_stats(values: Sequence[float], alpha: float = 0.05, ddof: int = 0) -> SummaryStats:
    """Mean, standard deviation and Student-t CI half-width.

    The half-width is ``t(1 - alpha/2, n - 1) * std / sqrt(n)``. ``std`` uses
    divisor ``n - ddof``: the noise-only tables are laid out with the
    population value (``ddof=0``), the trust tables with the sample value
    (``ddof=1``).
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError(f"need at least 2 values, got {n}")
    std = float(x.std(ddof=ddof))
    half = float(stats.t.ppf(1.0 - alpha / 2.0, n - 1)) * std / math.sqrt(n)
    return SummaryStats(float(x.mean()), std, half)


STAGE1_DDOF = 0
STAGE2_DDOF = 1


def make_row(scenario: ScenarioKind, name: str, values: Iterable[float], ddof: int = STAGE1_DDOF) -> EffectRow:
    values = tuple(float(v) for v in values)
    return EffectRow(scenario, name, values, summary_stats(values, ddof=ddof))


def stage1_effect(d_low: float, d_high: float) -> float:
    return d_high - d_low


def derive_seed(master_seed: int, replicate: int) -> int:
    """Seed shared by every run of one replicate, across scenarios and factor levels."""
    ss = np.random.SeedSequence([master_seed, replicate])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def main_effect(d_by_combination: Mapping[tuple[str, str, str], float], factor: str) -> float:
    """Mean response at the factor's ``+`` level minus mean at its ``-`` level.

    Keys are ``(tauB, tauR, eta)`` level tuples drawn from ``{"-", "+"}``.
    """
    if factor not in FACTORS:
        raise ValueError(f"unknown factor {factor!r}; expected one of {FACTORS}")
    missing = [c for c in itertools.product(LEVELS, repeat=3) if c not in d_by_combination]
    if missing:
        raise ValueError(f"missing factor combinations: {missing}")
    k = FACTORS.index(factor)
    hi = [d_by_combination[c] for c in itertools.product(LEVELS, repeat=3) if c[k] == "+"]
    lo = [d_by_combination[c] for c in itertools.product(LEVELS, repeat=3) if c[k] == "-"]
    return sum(hi) / 4.0 - sum(lo) / 4.0


def _run_d_bar(job: tuple[SimConfig, int]) -> float:
    config, seed = job
    return run_simulation(config, seed).d_bar


def _execute(jobs: list[tuple[SimConfig, int]], labels: list[str], workers: int) -> list[float]:
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(_run_d_bar, jobs, chunksize=4))
        out = []
        for job, label in zip(jobs, labels):
            try:
                out.append(_run_d_bar(job))
            except Exception as exc:
                raise RuntimeError(f"run failed at {label}: {exc}") from exc
        return out
    except RuntimeError:
        raise
    except Exception as exc:
        raise RuntimeError(f"stage execution failed: {exc}") from exc


def stage1_jobs(config_base: SimConfig, replicates: int, master_seed: int, levels: FactorLevels = FactorLevels()):
    jobs, labels = [], []
    for scenario in ScenarioKind:
        for r in range(replicates):
            seed = derive_seed(master_seed, r)
            for eta in (levels.eta_low, levels.eta_high):
                cfg = replace(
                    config_base,
                    scenario=scenario,
                    eta=eta,
                    tau_blue_leader=1.0,
                    tau_red=1.0,
                    trust_dynamics_enabled=False,
                )
                jobs.append((cfg, seed))
                labels.append(f"scenario={scenario.name} replicate={r} eta={eta}")
    return jobs, labels


def run_stage1(
    config_base: SimConfig,
    replicates: int = 10,
    master_seed: int = 0,
    levels: FactorLevels = FactorLevels(),
    workers: int = 1,
) -> list[EffectRow]:
    """Noise-only design with all trusts frozen at 1.

    Emits, per scenario, the low-noise and high-noise d-bar rows and their
    per-replicate difference ``e_eta``.
    """
    if replicates < 2:
        raise ValueError(f"replicates must be >= 2, got {replicates}")
    jobs, labels = stage1_jobs(config_base, replicates, master_seed, levels)
    d = iter(_execute(jobs, labels, workers))
    rows = []
    for scenario in ScenarioKind:
        low, high = [], []
        for _ in range(replicates):
            low.append(next(d))
            high.append(next(d))
        rows.append(make_row(scenario, f"eta={levels.eta_low:g}", low))
        rows.append(make_row(scenario, f"eta={levels.eta_high:g}", high))
        rows.append(make_row(scenario, "e_eta", [stage1_effect(a, b) for a, b in zip(low, high)]))
    return rows


def stage2_jobs(config_base: SimConfig, replicates: int, master_seed: int, levels: FactorLevels = FactorLevels()):
    jobs, labels = [], []
    for scenario in ScenarioKind:
        for r in range(replicates):
            seed = derive_seed(master_seed, r)
            for combo in itertools.product(LEVELS, repeat=3):
                cfg = replace(
                    config_base,
                    scenario=scenario,
                    tau_blue_leader=levels.value("tauB", combo[0]),
                    tau_red=levels.value("tauR", combo[1]),
                    eta=levels.value("eta", combo[2]),
                    trust_dynamics_enabled=True,
                )
                jobs.append((cfg, seed))
                labels.append(f"scenario={scenario.name} replicate={r} combination={''.join(combo)}")
    return jobs, labels


EFFECT_NAMES = {"tauB": "e_tauB", "tauR": "e_tauR", "eta": "e_N"}


def run_stage2(
    config_base: SimConfig,
    replicates: int = 10,
    master_seed: int = 0,
    levels: FactorLevels = FactorLevels(),
    workers: int = 1,
) -> list[EffectRow]:
    """Full 2^3 design with trust dynamics; one main-effect row per factor and scenario."""
    if replicates < 2:
        raise ValueError(f"replicates must be >= 2, got {replicates}")
    jobs, labels = stage2_jobs(config_base, replicates, master_seed, levels)
    d = iter(_execute(jobs, labels, workers))
    combos = list(itertools.product(LEVELS, repeat=3))
    rows = []
    for scenario in ScenarioKind:
        tables = [{c: next(d) for c in combos} for _ in range(replicates)]
        for factor in FACTORS:
            effects = [main_effect(t, factor) for t in tables]
            rows.append(make_row(scenario, EFFECT_NAMES[factor], effects, ddof=STAGE2_DDOF))
    return rows
