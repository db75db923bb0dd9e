"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise the NumPy
implementation in ``_purepy`` takes over. ``IMAGINARITY_BACKEND=python``
forces the fallback. Callers reach the kernels through ``impl`` at call time,
so ``set_backend`` takes effect immediately.
"""
import os

from . import _purepy

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_BACKENDS = {"python": _purepy}
if _core is not None:
    _BACKENDS["cython"] = _core


def available_backends():
    return sorted(_BACKENDS)


def _default():
    wanted = os.environ.get("IMAGINARITY_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in _BACKENDS:
            raise ImportError(
                f"IMAGINARITY_BACKEND={wanted!r} is not available; "
                f"choose from {available_backends()}"
            )
        return _BACKENDS[wanted]
    return _core if _core is not None else _purepy


impl = _default()


def get_backend():
    return impl.NAME


def set_backend(name):
    """Switch the active backend; returns the previous backend name."""
    global impl
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {available_backends()}")
    previous = impl.NAME
    impl = _BACKENDS[name]
    return previous
