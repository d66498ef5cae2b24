"""Selects the compiled kernel when available, else the numpy fallback.

Set ``FDIVMETRIC_KERNEL=python`` to force the fallback (used by the
benchmark and by the equivalence tests).
"""

import os

from . import _tmap_py

KERNEL_NAME = "python"
apply_T_kernel = _tmap_py.apply_T_kernel

if os.environ.get("FDIVMETRIC_KERNEL", "").lower() != "python":
    try:
        from . import _tmap
    except ImportError:  # extension not built
        _tmap = None
    if _tmap is not None:
        apply_T_kernel = _tmap.apply_T_kernel
        KERNEL_NAME = "cython"


def get_kernel(name=None):
    """Return ``(name, function)``; ``name`` in {None, 'python', 'cython'}."""
    if name is None:
        return KERNEL_NAME, apply_T_kernel
    if name == "python":
        return "python", _tmap_py.apply_T_kernel
    if name == "cython":
        from . import _tmap

        return "cython", _tmap.apply_T_kernel
    raise ValueError(f"unknown kernel {name!r}")
