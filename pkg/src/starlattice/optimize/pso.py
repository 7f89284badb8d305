"""Augmented Lagrangian particle swarm optimizer."""
from __future__ import annotations

import numpy as np

from .core import Engine, OptConfig, OptimizationProblem, OptResult, initial_points, stalled


def alpso_minimize(
    problem: OptimizationProblem,
    config: OptConfig | None = None,
    seed: int | None = None,
    workers: int = 1,
    warm_start=None,
) -> OptResult:
    """Minimise the augmented Lagrangian with a global-best swarm.

    Each outer iteration runs ``inner_iterations`` swarm moves, then updates
    the multipliers and penalties from the global best particle.
    """
    c = config or OptConfig()
    seed = c.seed if seed is None else seed
    n = c.swarm_size
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]
    lo, hi = problem.lower, problem.upper
    vmax = c.velocity_clamp * (hi - lo)

    eng = Engine(problem, c, workers)
    try:
        n_first = min(n, max(eng.budget_left(), 0))
        x = initial_points(problem, n, streams, warm_start)
        v = np.array([vmax * (2.0 * rng.random(len(lo)) - 1.0) * 0.5 for rng in streams])
        f, g = eng.evaluate(x[:n_first])
        if n_first < n:
            return eng.result([], "alpso", seed)

        pbest_x, pbest_f, pbest_g = x.copy(), f.copy(), g.copy()
        pbest_L = eng.lagrangian(pbest_f, pbest_g)
        gi = int(np.argmin(pbest_L))
        history, lag_trace, feas_trace = [], [], []
        prev_violation = np.full(eng.m, np.inf)

        for outer in range(1, c.max_outer + 1):
            exhausted = False
            for _ in range(c.inner_iterations):
                if eng.budget_left() < n:
                    exhausted = True
                    break
                w = c.inertia_start + (c.inertia_end - c.inertia_start) * eng.progress(outer - 1)
                for i, rng in enumerate(streams):
                    r1 = rng.random(len(lo))
                    r2 = rng.random(len(lo))
                    v[i] = w * v[i] + c.cognitive * r1 * (pbest_x[i] - x[i]) + c.social * r2 * (pbest_x[gi] - x[i])
                v = np.clip(v, -vmax, vmax)
                x = x + v
                out = (x < lo) | (x > hi)
                x = np.clip(x, lo, hi)
                v[out] = 0.0
                f, g = eng.evaluate(x)
                L = eng.lagrangian(f, g)
                better = L < pbest_L
                pbest_x[better], pbest_f[better], pbest_g[better], pbest_L[better] = x[better], f[better], g[better], L[better]
                gi = int(np.argmin(pbest_L))

            prev_violation = eng.update_multipliers(pbest_g[gi], prev_violation)
            pbest_L = eng.lagrangian(pbest_f, pbest_g)
            gi = int(np.argmin(pbest_L))
            history.append(eng.snapshot(outer, pbest_L[gi], pbest_g[gi]))
            lag_trace.append(float(pbest_L[gi]))
            feas_trace.append(bool(eng.m == 0 or np.max(pbest_g[gi]) <= c.constraint_tol))
            if exhausted or stalled(lag_trace, feas_trace, c.stall_tol, c.stall_iterations):
                break
        return eng.result(history, "alpso", seed)
    finally:
        eng.close()
