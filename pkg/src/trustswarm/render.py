"""SVG footprint plots of agent trajectories."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import quoteattr

from .core import AgentKind, Vec2, WorldBounds

STYLE = {
    AgentKind.BLUE: ("#1f77b4", 1.0),
    AgentKind.LEADER: ("#2ca02c", 2.5),
    AgentKind.RED: ("#d62728", 2.0),
}


def _kinds(n: int) -> list[AgentKind]:
    return ([AgentKind.LEADER, AgentKind.RED] + [AgentKind.BLUE] * n)[:n]


def footprint_svg(
    trajectory: Sequence,
    bounds: WorldBounds,
    kinds: Sequence[AgentKind] | None = None,
    goals: Sequence[Vec2] = (),
    every: int = 1,
) -> str:
    """Render every ``every``-th snapshot of ``trajectory`` as dot trails.

    Each snapshot is a ``(pos, vel, trust)`` triple; only ``pos`` is drawn.
    World ``y`` grows upward, so it is flipped for the screen. Blue trails are
    drawn first so the leader and red trails stay visible on top.
    """
    if not trajectory:
        raise ValueError("trajectory is empty")
    if every < 1:
        raise ValueError(f"every must be >= 1, got {every}")
    w, h = bounds.width, bounds.length
    n = len(trajectory[0][0])
    kinds = list(kinds) if kinds is not None else _kinds(n)
    snaps = trajectory[::every]

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:g}" height="{h:g}" viewBox="0 0 {w:g} {h:g}">',
        f'<rect class="frame" x="0" y="0" width="{w:g}" height="{h:g}" fill="white" stroke="black" stroke-width="1"/>',
    ]
    for g in goals:
        out.append(
            f'<rect class="goal" x="{g[0] - 4:.2f}" y="{h - g[1] - 4:.2f}" width="8" height="8" '
            'fill="none" stroke="#ff7f0e" stroke-width="1.5"/>'
        )
    for kind in (AgentKind.BLUE, AgentKind.RED, AgentKind.LEADER):
        members = [i for i, k in enumerate(kinds) if k is kind]
        if not members:
            continue
        color, r = STYLE[kind]
        out.append(f"<g class={quoteattr('agent ' + kind.value)} fill=\"{color}\">")
        for pos, *_ in snaps:
            for i in members:
                out.append(f'<circle cx="{pos[i][0]:.2f}" cy="{h - pos[i][1]:.2f}" r="{r:g}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_footprints(trajectory, bounds: WorldBounds, destination, goals: Sequence[Vec2] = (), every: int = 1) -> Path:
    path = Path(destination)
    path.write_text(footprint_svg(trajectory, bounds, goals=goals, every=every))
    return path
