"""Time one simulation tick with the compiled and the pure-Python kernel.

    python benchmarks/bench_kernel.py [--agents 27] [--ticks 200] [--repeat 5]

Both kernels start from the same state and must end in the same state; the
script checks this before reporting the speedup.
"""
import argparse
import sys
import timeit

import numpy as np

from trustswarm import kernel
from trustswarm.engine import SimConfig, init_run


def _runner(tick_fn, config, seed, ticks):
    state = init_run(config, seed)
    adj = state.graph.adjacency_matrix()
    w = config.weights
    noise = np.random.default_rng(seed).normal(scale=config.eta, size=(ticks, 2))

    def run():
        pos, vel, trust = state.pos.copy(), state.vel.copy(), state.trust.copy()
        for k in range(ticks):
            tick_fn(
                pos, vel, trust, adj, w.w_c, w.w_a, w.w_s, config.r_sep, config.v_max,
                True, float(noise[k, 0]), float(noise[k, 1]),
                state.goal.x, state.goal.y, config.leader_speed,
                config.bounds.width, config.bounds.length,
            )
        return pos, vel, trust

    return run


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=27, help="total agents, leader and red included")
    ap.add_argument("--ticks", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    config = SimConfig(n_blue=args.agents - 2, trust_dynamics_enabled=True)
    kernels = {"python": kernel.py_tick}
    if kernel.c_tick is not None:
        kernels["cython"] = kernel.c_tick
    else:
        print("compiled kernel not available; timing the Python kernel only")

    per_tick = {}
    finals = {}
    for name, fn in kernels.items():
        run = _runner(fn, config, args.seed, args.ticks)
        finals[name] = run()
        best = min(timeit.repeat(run, number=1, repeat=args.repeat))
        per_tick[name] = best / args.ticks
        print(f"{name:>7}: {per_tick[name] * 1e6:10.1f} us/tick  ({args.agents} agents, best of {args.repeat})")

    if "cython" in finals:
        same = all(np.array_equal(a, b) for a, b in zip(finals["python"], finals["cython"]))
        print(f"identical final state: {same}")
        print(f"speedup: {per_tick['python'] / per_tick['cython']:.1f}x")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
