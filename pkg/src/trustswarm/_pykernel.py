"""Reference implementation of one simulation tick.

Built directly on the functions in :mod:`trustswarm.core`; the compiled
kernel in ``_ckernel.pyx`` must agree with it bit for bit.
"""
from __future__ import annotations

import numpy as np

from .core import (
    SteeringWeights,
    WorldBounds,
    Vec2,
    alignment_velocity,
    clamp_speed,
    cohesion_velocity,
    integrate_position,
    leader_velocity,
    normalize,
    separation_velocity,
    steer,
    update_trust,
)

LEADER = 0
RED = 1


def tick(
    pos: np.ndarray,
    vel: np.ndarray,
    trust: np.ndarray,
    adj: np.ndarray,
    w_c: float,
    w_a: float,
    w_s: float,
    r_sep: float,
    v_max: float,
    update_trusts: bool,
    noise_x: float,
    noise_y: float,
    goal_x: float,
    goal_y: float,
    leader_speed: float,
    width: float,
    length: float,
) -> None:
    """Advance ``pos``, ``vel`` and ``trust`` in place by one synchronous tick.

    Index 0 is the leader and index 1 the red agent. ``(noise_x, noise_y)``
    is added to red's steered velocity before a second speed clamp.
    """
    n = pos.shape[0]
    weights = SteeringWeights(w_c, w_a, w_s)
    bounds = WorldBounds(width, length)
    p = [Vec2(*row) for row in pos.tolist()]
    v = [Vec2(*row) for row in vel.tolist()]
    tau = trust.tolist()
    links = [np.flatnonzero(row).tolist() for row in adj]
    r2 = r_sep * r_sep

    new_tau = list(tau)
    if update_trusts:
        for i in range(RED + 1, n):
            new_tau[i] = update_trust(tau[i], [tau[j] for j in links[i]])

    new_v = list(v)
    for i in range(RED, n):
        pi = p[i]
        close = []
        for j in range(n):
            if j == i:
                continue
            dx = p[j].x - pi.x
            dy = p[j].y - pi.y
            if dx * dx + dy * dy <= r2:
                close.append(p[j])
        coh = normalize(cohesion_velocity(pi, [p[j] for j in links[i]]))
        ali = normalize(alignment_velocity(v[i], [v[j] for j in links[i]]))
        sep = normalize(separation_velocity(pi, close))
        new_v[i] = steer(v[i], new_tau[i], weights, coh, ali, sep, v_max)

    new_v[RED] = clamp_speed((new_v[RED].x + noise_x, new_v[RED].y + noise_y), v_max)
    new_v[LEADER] = leader_velocity(p[LEADER], (goal_x, goal_y), leader_speed)

    for i in range(n):
        p_i, v_i = integrate_position(p[i], new_v[i], bounds)
        pos[i, 0], pos[i, 1] = p_i
        vel[i, 0], vel[i, 1] = v_i
    trust[:] = new_tau
