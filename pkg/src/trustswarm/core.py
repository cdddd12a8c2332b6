"""Per-agent steering and trust arithmetic.

Everything here is a pure function of its arguments. Sums are accumulated
left to right with plain ``+`` so the compiled kernel can reproduce the
results bit for bit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

EPS = 1e-12


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec2(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return Vec2(-self.x, -self.y)

    def __mul__(self, k):  # type: ignore[override]
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)


ZERO = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class WorldBounds:
    width: float = 500.0
    length: float = 500.0

    def __post_init__(self):
        if not (self.width > 0 and self.length > 0):
            raise ValueError(f"bounds must be positive, got {self.width}x{self.length}")

    def contains(self, p: Sequence[float]) -> bool:
        return 0.0 <= p[0] <= self.width and 0.0 <= p[1] <= self.length

    def corners(self) -> list[Vec2]:
        return [
            Vec2(0.0, 0.0),
            Vec2(self.width, 0.0),
            Vec2(0.0, self.length),
            Vec2(self.width, self.length),
        ]


@dataclass(frozen=True)
class SteeringWeights:
    w_c: float = 0.4
    w_a: float = 0.4
    w_s: float = 0.2

    def __post_init__(self):
        for name in ("w_c", "w_a", "w_s"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")


class AgentKind(enum.Enum):
    LEADER = "leader"
    RED = "red"
    BLUE = "blue"


@dataclass
class AgentState:
    kind: AgentKind
    position: Vec2
    velocity: Vec2
    trust: float = 1.0


def normalize(v: Sequence[float]) -> Vec2:
    """Unit vector along ``v``; the zero vector when ``|v| < EPS``."""
    x, y = v
    n = math.sqrt(x * x + y * y)
    if n < EPS:
        return ZERO
    return Vec2(x / n, y / n)


def _mean(points: Sequence[Sequence[float]]) -> Vec2:
    sx = 0.0
    sy = 0.0
    for p in points:
        sx += p[0]
        sy += p[1]
    k = len(points)
    return Vec2(sx / k, sy / k)


def cohesion_velocity(self_position: Sequence[float], neighbor_positions: Sequence[Sequence[float]]) -> Vec2:
    """Offset from ``self_position`` to the centroid of linked neighbours."""
    if not neighbor_positions:
        return ZERO
    return _mean(neighbor_positions) - self_position


def alignment_velocity(self_velocity: Sequence[float], neighbor_velocities: Sequence[Sequence[float]]) -> Vec2:
    if not neighbor_velocities:
        return ZERO
    return _mean(neighbor_velocities) - self_velocity


def separation_velocity(self_position: Sequence[float], spatial_neighbor_positions: Sequence[Sequence[float]]) -> Vec2:
    """Negated sum of offsets to agents already filtered by separation radius."""
    sx = 0.0
    sy = 0.0
    px, py = self_position
    for q in spatial_neighbor_positions:
        sx += q[0] - px
        sy += q[1] - py
    return Vec2(-sx, -sy)


def update_trust(self_trust: float, neighbor_trusts: Sequence[float]) -> float:
    """Half-way move from own trust toward the neighbourhood mean.

    Computed as ``self + 0.5 * mean(t_j - self)`` so that a neighbourhood
    sharing the agent's trust returns it exactly. An agent with no linked
    neighbours keeps its trust.
    """
    if not neighbor_trusts:
        return self_trust
    d = 0.0
    for t in neighbor_trusts:
        d += t - self_trust
    return min(1.0, max(-1.0, self_trust + 0.5 * (d / len(neighbor_trusts))))


def clamp_speed(v: Sequence[float], v_max: float) -> Vec2:
    x, y = v
    speed = math.sqrt(x * x + y * y)
    if speed > v_max:
        f = v_max / speed
        return Vec2(x * f, y * f)
    return Vec2(x, y)


def steer(
    velocity: Sequence[float],
    trust: float,
    weights: SteeringWeights,
    cohesion_v: Sequence[float],
    alignment_v: Sequence[float],
    separation_v: Sequence[float],
    v_max: float,
) -> Vec2:
    """Trust-scaled flocking update followed by a speed clamp.

    The steering vectors are expected to be normalized already. Trust only
    scales the cohesion and alignment terms, so ``trust == 0`` leaves
    separation as the sole influence.
    """
    vx = velocity[0] + trust * (weights.w_c * cohesion_v[0] + weights.w_a * alignment_v[0]) + weights.w_s * separation_v[0]
    vy = velocity[1] + trust * (weights.w_c * cohesion_v[1] + weights.w_a * alignment_v[1]) + weights.w_s * separation_v[1]
    return clamp_speed((vx, vy), v_max)


def leader_velocity(position: Sequence[float], goal: Sequence[float], speed: float) -> Vec2:
    dx = goal[0] - position[0]
    dy = goal[1] - position[1]
    d = math.sqrt(dx * dx + dy * dy)
    if d < EPS:
        return ZERO
    return Vec2(dx / d * speed, dy / d * speed)


def _reflect(p: float, v: float, hi: float) -> tuple[float, float]:
    if p < 0.0:
        return -p, -v
    if p > hi:
        return 2.0 * hi - p, -v
    return p, v


def integrate_position(position: Sequence[float], velocity: Sequence[float], bounds: WorldBounds) -> tuple[Vec2, Vec2]:
    """Advance one step, mirroring off any wall that was crossed.

    A crossed wall mirrors the position back inside and flips the matching
    velocity component.
    """
    assert math.sqrt(velocity[0] ** 2 + velocity[1] ** 2) <= min(bounds.width, bounds.length)
    x, vx = _reflect(position[0] + velocity[0], velocity[0], bounds.width)
    y, vy = _reflect(position[1] + velocity[1], velocity[1], bounds.length)
    return Vec2(x, y), Vec2(vx, vy)
