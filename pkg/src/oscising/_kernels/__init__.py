"""Backend selection for the hot loops.

The numba backend is used when numba imports cleanly, unless the environment
variable ``OSCISING_DISABLE_NUMBA`` is set to a truthy value, in which case the
pure-numpy backend is used. Both expose the same functions with the same
signatures; ``load_backend`` returns either one explicitly.
"""

import importlib
import os

_TRUTHY = {"1", "true", "yes", "on"}


def numba_disabled():
    return os.environ.get("OSCISING_DISABLE_NUMBA", "").strip().lower() in _TRUTHY


def numba_available():
    try:
        importlib.import_module("numba")
    except ImportError:
        return False
    return True


def load_backend(name):
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    return importlib.import_module(f"{__name__}.{name}_impl")


BACKEND = "numpy" if numba_disabled() or not numba_available() else "numba"
_impl = load_backend(BACKEND)

advance = _impl.advance
rhs_batch = _impl.rhs_batch
maxcut_enumerate = _impl.maxcut_enumerate

__all__ = ["BACKEND", "advance", "rhs_batch", "maxcut_enumerate", "load_backend"]
