"""Compare the compiled and numpy assembly kernels on representative meshes.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from starlattice import _assembly_py, kernels
from starlattice.homogenize import Evaluator
from starlattice.fem import element_properties
from starlattice.geometry import RveParams, build_rve
from starlattice.materials import DEFAULT_MATERIALS
from starlattice.mesh import mesh_rve

try:
    from starlattice import _assembly
except ImportError:
    _assembly = None

DESIGNS = {
    "min-nu design": RveParams(100.0, 13.34, 23.85, 0.5),
    "min-ncte design": RveParams(100.0, 25.01, 40.0, 0.5),
}


def _inputs(params, seed_factor):
    mesh = mesh_rve(build_rve(params), seed_factor)
    p = element_properties(mesh, DEFAULT_MATERIALS, 200.0)
    conn = np.ascontiguousarray(mesh.connectivity, dtype=np.int64)
    return mesh, (np.ascontiguousarray(mesh.coords), conn, p.E, p.G, p.alpha, p.area, p.inertia, p.kappa, 180.0)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    backends = [("numpy", _assembly_py.assemble_arrays)]
    if _assembly is not None:
        backends.append(("cython", _assembly.assemble_arrays))
    else:
        print("compiled kernel not built; timing numpy only")

    print(f"{'case':28s} {'elements':>8s} " + " ".join(f"{n + ' (us)':>14s}" for n, _ in backends) + "  speedup")
    for name, params in DESIGNS.items():
        for seed in (0.085, 0.02):
            mesh, inputs = _inputs(params, seed)
            ref = backends[0][1](*inputs)
            times = []
            for _, fn in backends:
                K, F = fn(*inputs)
                assert np.allclose(K, ref[0], rtol=1e-12, atol=1e-6 * np.abs(ref[0]).max())
                assert np.allclose(F, ref[1], rtol=1e-12, atol=1e-12 * max(np.abs(ref[1]).max(), 1.0))
                t = min(timeit.repeat(lambda: fn(*inputs), number=1, repeat=args.repeat))
                times.append(t * 1e6)
            speed = f"{times[0] / times[-1]:7.1f}x" if len(times) > 1 else ""
            label = f"{name} seed {seed}"
            print(f"{label:28s} {mesh.n_elements:8d} " + " ".join(f"{t:14.1f}" for t in times) + "  " + speed)

    print()
    print("full design evaluation (two solves, no memo):")
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        params = DESIGNS["min-nu design"]
        t = min(timeit.repeat(lambda: Evaluator()(params), number=1, repeat=max(5, args.repeat // 10)))
        print(f"  {backend:8s} {t * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
