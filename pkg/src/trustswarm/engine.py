"""Simulation loop: perception, trust, red influence and shaping, goal cycling.

Agent layout is fixed: index 0 is the blue leader, index 1 the red agent and
indices ``2..n_blue+1`` the blue followers. All randomness comes from four
independent streams spawned from the run seed (initial state, goal choice,
velocity noise, rewiring), so switching a red behaviour on or off never
shifts the draws seen by the others.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from . import kernel
from .core import AgentKind, AgentState, SteeringWeights, Vec2, WorldBounds
from .network import AgentGraph, generate_random_graph, rewire_red

LEADER = 0
RED = 1
MAX_GRAPH_DRAWS = 100_000


class ScenarioKind(enum.Enum):
    VELOCITY_NOISE = 1
    NETWORK_CHANGES = 2
    BOTH = 3

    @property
    def noise(self) -> bool:
        return self in (ScenarioKind.VELOCITY_NOISE, ScenarioKind.BOTH)

    @property
    def rewiring(self) -> bool:
        return self in (ScenarioKind.NETWORK_CHANGES, ScenarioKind.BOTH)


@dataclass(frozen=True)
class SimConfig:
    n_blue: int = 25
    bounds: WorldBounds = field(default_factory=WorldBounds)
    weights: SteeringWeights = field(default_factory=SteeringWeights)
    graph_p: float = 0.1
    connected_graph: bool = True
    eta: float = 0.1
    tau_blue_leader: float = 1.0
    tau_red: float = 1.0
    trust_dynamics_enabled: bool = False
    scenario: ScenarioKind = ScenarioKind.VELOCITY_NOISE
    iterations: int = 11
    delta: float = 10.0
    r_sep: float = 20.0
    v_max: float = 2.0
    leader_speed: float = 1.0
    max_steps_per_iteration: int = 5000

    def __post_init__(self):
        if self.n_blue < 1:
            raise ValueError(f"n_blue must be >= 1, got {self.n_blue}")
        if not 0.0 <= self.graph_p <= 1.0:
            raise ValueError(f"graph_p must be in [0, 1], got {self.graph_p}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        for name in ("tau_blue_leader", "tau_red"):
            if not -1.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [-1, 1], got {getattr(self, name)}")
        if self.iterations < 2:
            raise ValueError(f"iterations must be >= 2, got {self.iterations}")
        for name in ("delta", "r_sep", "v_max", "leader_speed"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.v_max > min(self.bounds.width, self.bounds.length):
            raise ValueError("v_max must not exceed the smaller side of the world")
        if self.max_steps_per_iteration < 1:
            raise ValueError("max_steps_per_iteration must be >= 1")

    @property
    def n_agents(self) -> int:
        return self.n_blue + 2


@dataclass(frozen=True)
class IterationRecord:
    iteration_index: int
    steps_taken: int
    mean_blue_goal_distance: float
    reached: bool = True


@dataclass
class SimState:
    pos: np.ndarray
    vel: np.ndarray
    trust: np.ndarray
    graph: AgentGraph
    goal: Vec2
    streams: dict[str, np.random.Generator]
    tick: int = 0
    iteration: int = 0
    steps_in_iteration: int = 0
    records: list[IterationRecord] = field(default_factory=list)

    def kinds(self) -> list[AgentKind]:
        return [AgentKind.LEADER, AgentKind.RED] + [AgentKind.BLUE] * (len(self.pos) - 2)

    def agents(self) -> list[AgentState]:
        return [
            AgentState(kind, Vec2(*p), Vec2(*v), t)
            for kind, p, v, t in zip(self.kinds(), self.pos.tolist(), self.vel.tolist(), self.trust.tolist())
        ]

    def leader_goal_distance(self) -> float:
        return math.hypot(self.pos[LEADER, 0] - self.goal.x, self.pos[LEADER, 1] - self.goal.y)

    def mean_blue_distance(self, goal: Vec2) -> float:
        d = self.pos[2:] - np.array(goal)
        return float(np.sqrt((d * d).sum(axis=1)).mean())


@dataclass
class RunResult:
    records: list[IterationRecord]
    d_bar: float
    trajectory: list[tuple[np.ndarray, np.ndarray, np.ndarray]] | None = None
    goals: list[Vec2] = field(default_factory=list)


def _spawn_streams(seed: int) -> dict[str, np.random.Generator]:
    names = ("init", "goal", "noise", "rewire")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(s) for name, s in zip(names, children)}


def init_run(config: SimConfig, seed: int) -> SimState:
    """Random initial placement, headings, trusts, network and goal corner.

    With ``config.connected_graph`` the network is redrawn from the init
    stream until every agent is reachable from every other.
    """
    streams = _spawn_streams(seed)
    rng = streams["init"]
    n = config.n_agents
    b = config.bounds
    pos = rng.uniform(0.0, 1.0, size=(n, 2)) * np.array([b.width, b.length])
    heading = rng.uniform(0.0, 2.0 * math.pi, size=n)
    vel = np.column_stack([np.cos(heading), np.sin(heading)])
    # drawn unconditionally so the init stream is the same with or without trust dynamics
    blue_trust = rng.uniform(-1.0, 1.0, size=config.n_blue)
    if config.trust_dynamics_enabled:
        trust = np.concatenate([[config.tau_blue_leader, config.tau_red], blue_trust])
    else:
        trust = np.ones(n)
    graph = generate_random_graph(n, config.graph_p, rng)
    attempts = 1
    while config.connected_graph and not graph.is_connected():
        if attempts >= MAX_GRAPH_DRAWS:
            raise ValueError(f"no connected G({n}, {config.graph_p}) found in {MAX_GRAPH_DRAWS} draws")
        graph = generate_random_graph(n, config.graph_p, rng)
        attempts += 1
    corners = b.corners()
    goal = corners[int(streams["goal"].integers(len(corners)))]
    return SimState(
        pos=np.ascontiguousarray(pos),
        vel=np.ascontiguousarray(vel),
        trust=np.ascontiguousarray(trust, dtype=float),
        graph=graph,
        goal=goal,
        streams=streams,
    )


def step(state: SimState, config: SimConfig, tick_fn=None) -> SimState:
    """One synchronous tick, updating ``state`` in place (and returning it).

    Rewiring happens first with probability ``eta``; everything else is
    computed from the post-rewire, time-t positions and velocities.
    """
    if config.scenario.rewiring and state.streams["rewire"].random() < config.eta:
        state.graph = rewire_red(state.graph, RED, LEADER, state.streams["rewire"])
    if config.scenario.noise:
        nx, ny = config.eta * state.streams["noise"].standard_normal(2)
    else:
        nx = ny = 0.0
    w = config.weights
    (tick_fn or kernel.tick)(
        state.pos,
        state.vel,
        state.trust,
        state.graph.adjacency_matrix(),
        w.w_c,
        w.w_a,
        w.w_s,
        config.r_sep,
        config.v_max,
        config.trust_dynamics_enabled,
        float(nx),
        float(ny),
        state.goal.x,
        state.goal.y,
        config.leader_speed,
        config.bounds.width,
        config.bounds.length,
    )
    state.tick += 1
    state.steps_in_iteration += 1
    return state


def relocate_goal(state: SimState, config: SimConfig, reached: bool = True) -> SimState:
    """Close the current iteration and move the goal to another corner."""
    if reached:
        assert state.leader_goal_distance() <= config.delta, "leader is not inside the goal radius"
    old = state.goal
    state.records.append(
        IterationRecord(state.iteration, state.steps_in_iteration, state.mean_blue_distance(old), reached)
    )
    others = [c for c in config.bounds.corners() if c != old]
    state.goal = others[int(state.streams["goal"].integers(len(others)))]
    state.iteration += 1
    state.steps_in_iteration = 0
    return state


def effect_metric(records: list[IterationRecord]) -> float:
    """Mean end-of-iteration blue distance, skipping the warm-up iteration."""
    if len(records) < 2:
        raise ValueError(f"need at least 2 iteration records, got {len(records)}")
    tail = [r.mean_blue_goal_distance for r in records[1:]]
    return sum(tail) / len(tail)


def run_simulation(config: SimConfig, seed: int, capture_trajectory: bool = False, tick_fn=None) -> RunResult:
    state = init_run(config, seed)
    trajectory = [] if capture_trajectory else None
    goals = [state.goal]

    def snapshot():
        if trajectory is not None:
            trajectory.append((state.pos.copy(), state.vel.copy(), state.trust.copy()))

    snapshot()
    for _ in range(config.iterations):
        while state.leader_goal_distance() > config.delta:
            if state.steps_in_iteration >= config.max_steps_per_iteration:
                break
            step(state, config, tick_fn)
            snapshot()
        relocate_goal(state, config, reached=state.leader_goal_distance() <= config.delta)
        goals.append(state.goal)
    return RunResult(state.records, effect_metric(state.records), trajectory, goals[:-1])


TRACE_HEADER = ["tick", "agent_id", "kind", "x", "y", "vx", "vy", "trust"]


def write_trace(trajectory, out: TextIO) -> None:
    """Write a per-tick trace as CSV rows ``tick,agent_id,kind,x,y,vx,vy,trust``."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for t, (pos, vel, trust) in enumerate(trajectory):
        n = len(pos)
        kinds = [AgentKind.LEADER, AgentKind.RED] + [AgentKind.BLUE] * (n - 2)
        rows = np.column_stack([pos, vel, trust]).tolist()
        for i, vals in enumerate(rows):
            writer.writerow([t, i, kinds[i].value] + [repr(x) for x in vals])


def read_trace(inp: TextIO) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    rows = list(csv.DictReader(inp))
    if not rows:
        return []
    n = max(int(r["agent_id"]) for r in rows) + 1
    ticks = max(int(r["tick"]) for r in rows) + 1
    data = np.zeros((ticks, n, 5))
    for r in rows:
        data[int(r["tick"]), int(r["agent_id"])] = [float(r[k]) for k in ("x", "y", "vx", "vy", "trust")]
    return [(d[:, 0:2].copy(), d[:, 2:4].copy(), d[:, 4].copy()) for d in data]
