"""Augmented Lagrangian harmony search."""
from __future__ import annotations

import numpy as np

from .core import Engine, OptConfig, OptimizationProblem, OptResult, initial_points, stalled


def _improvise(memory, rng, c: OptConfig, lo, hi, bw):
    d = len(lo)
    new = np.empty(d)
    for j in range(d):
        if rng.random() < c.consideration_rate:
            new[j] = memory[rng.integers(len(memory)), j]
            if rng.random() < c.pitch_rate:
                new[j] += bw[j] * (2.0 * rng.random() - 1.0)
        else:
            new[j] = lo[j] + (hi[j] - lo[j]) * rng.random()
    return np.clip(new, lo, hi)


def alhso_minimize(
    problem: OptimizationProblem,
    config: OptConfig | None = None,
    seed: int | None = None,
    workers: int = 1,
    warm_start=None,
) -> OptResult:
    """Harmony search on the augmented Lagrangian.

    Harmonies are improvised in batches of ``memory_size`` from the current
    memory, evaluated together, then merged one by one in batch order (each
    replaces the worst harmony if it is better). The pitch bandwidth shrinks
    geometrically from ``bandwidth`` to ``bandwidth_end`` over the run.
    """
    c = config or OptConfig()
    seed = c.seed if seed is None else seed
    n = c.memory_size
    ss = np.random.SeedSequence(seed)
    init_streams = [np.random.default_rng(s) for s in ss.spawn(n)]
    rng = np.random.default_rng(ss.spawn(1)[0])
    lo, hi = problem.lower, problem.upper

    eng = Engine(problem, c, workers)
    try:
        n_first = min(n, max(eng.budget_left(), 0))
        hm_x = initial_points(problem, n, init_streams, warm_start)
        hm_f, hm_g = eng.evaluate(hm_x[:n_first])
        if n_first < n:
            return eng.result([], "alhso", seed)
        hm_L = eng.lagrangian(hm_f, hm_g)
        history, lag_trace, feas_trace = [], [], []
        prev_violation = np.full(eng.m, np.inf)

        for outer in range(1, c.max_outer + 1):
            exhausted = False
            for _ in range(c.inner_iterations):
                if eng.budget_left() < n:
                    exhausted = True
                    break
                frac = c.bandwidth * (c.bandwidth_end / c.bandwidth) ** eng.progress(outer - 1)
                bw = frac * (hi - lo)
                batch = np.array([_improvise(hm_x, rng, c, lo, hi, bw) for _ in range(n)])
                f, g = eng.evaluate(batch)
                L = eng.lagrangian(f, g)
                for k in range(n):
                    worst = int(np.argmax(hm_L))
                    if L[k] < hm_L[worst]:
                        hm_x[worst], hm_f[worst], hm_g[worst], hm_L[worst] = batch[k], f[k], g[k], L[k]

            bi = int(np.argmin(hm_L))
            prev_violation = eng.update_multipliers(hm_g[bi], prev_violation)
            hm_L = eng.lagrangian(hm_f, hm_g)
            bi = int(np.argmin(hm_L))
            history.append(eng.snapshot(outer, hm_L[bi], hm_g[bi]))
            lag_trace.append(float(hm_L[bi]))
            feas_trace.append(bool(eng.m == 0 or np.max(hm_g[bi]) <= c.constraint_tol))
            if exhausted or stalled(lag_trace, feas_trace, c.stall_tol, c.stall_iterations):
                break
        return eng.result(history, "alhso", seed)
    finally:
        eng.close()
