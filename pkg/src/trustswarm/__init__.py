"""Trust-based networked Boids with an adversarial red agent."""
from .core import AgentKind, AgentState, SteeringWeights, Vec2, WorldBounds
from .engine import RunResult, ScenarioKind, SimConfig, run_simulation
from .kernel import BACKEND

__all__ = [
    "AgentKind",
    "AgentState",
    "BACKEND",
    "RunResult",
    "ScenarioKind",
    "SimConfig",
    "SteeringWeights",
    "Vec2",
    "WorldBounds",
    "run_simulation",
]
