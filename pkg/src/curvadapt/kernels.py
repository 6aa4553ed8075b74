"""Backend selection for the scalar kernels.

The compiled extension ``curvadapt._kernels`` is used when it imports;
otherwise the pure-Python module is used. Setting the environment variable
``CURVADAPT_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

_FUNCS = ("fcos", "fsinc", "fcos_fsinc_array", "offset_shape", "focal_radius", "table_sweep")


def _load_compiled():
    if os.environ.get("CURVADAPT_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


compiled = _load_compiled()
_impl = compiled if compiled is not None else _kernels_py
BACKEND = "cython" if compiled is not None else "python"

fcos = _impl.fcos
fsinc = _impl.fsinc
fcos_fsinc_array = _impl.fcos_fsinc_array
offset_shape = _impl.offset_shape
focal_radius = _impl.focal_radius
table_sweep = _impl.table_sweep


def backends():
    """Return ``{name: module}`` for every importable backend."""
    out = {"python": _kernels_py}
    if compiled is not None:
        out["cython"] = compiled
    return out


__all__ = ["BACKEND", "backends", *_FUNCS]
