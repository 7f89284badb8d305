"""Selects the compiled assembly kernel when available.

Set ``STARLATTICE_PURE_PYTHON=1`` to force the numpy implementation.
"""
import os

from . import _assembly_py
from .errors import ConfigError

try:
    from . import _assembly as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"python": _assembly_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

if _compiled is not None and os.environ.get("STARLATTICE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    BACKEND = "cython"
else:
    BACKEND = "python"
_impl = _BACKENDS[BACKEND]


def available_backends() -> tuple[str, ...]:
    return tuple(_BACKENDS)


def set_backend(name: str) -> str:
    """Switch kernels at runtime; returns the previous backend name."""
    global _impl, BACKEND
    if name not in _BACKENDS:
        raise ConfigError(f"assembly backend {name!r} is not available ({', '.join(_BACKENDS)})")
    previous = BACKEND
    BACKEND, _impl = name, _BACKENDS[name]
    return previous


def assemble_arrays(coords, conn, E, G, alpha, A, I, kappa, delta_t):
    return _impl.assemble_arrays(coords, conn, E, G, alpha, A, I, kappa, float(delta_t))
