"""Kernel backend selection.

The compiled Cython extension is preferred when it imported cleanly; the
NumPy implementation is the always-available fallback.  Selection happens
once at import time and can be forced with the ``CACHEWAVE_BACKEND``
environment variable (``python`` or ``cython``).

Both backends expose the same flat API; ``cachewave.mc`` and
``cachewave.stp`` only ever call through this module.
"""
from __future__ import annotations

import os

from . import pykernels

_KERNEL_NAMES = (
    "integrate_factor",
    "count_ge",
    "count_mrc",
    "count_sinr_ge",
    "count_sum_ge",
    "count_joint_sic",
    "count_joint_inoise",
    "count_m1_cache",
    "count_m3_cache",
    "count_m4_cache",
)


def _load_cython():
    from . import _cykernels  # noqa: PLC0415 -- optional compiled module

    return _cykernels


_requested = os.environ.get("CACHEWAVE_BACKEND", "auto").strip().lower()
if _requested in ("", "auto"):
    try:
        _impl = _load_cython()
        backend_name = "cython"
    except ImportError:
        _impl = pykernels
        backend_name = "python"
elif _requested in ("python", "pure"):
    _impl = pykernels
    backend_name = "python"
elif _requested == "cython":
    _impl = _load_cython()  # let the ImportError surface: it was asked for
    backend_name = "cython"
else:
    raise ValueError(
        f"CACHEWAVE_BACKEND={_requested!r} not recognized "
        "(expected 'auto', 'python', or 'cython')"
    )


def available_backends() -> list[str]:
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        _load_cython()
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Return the kernel module for ``name`` ('python' or 'cython')."""
    if name == "python":
        return pykernels
    if name == "cython":
        return _load_cython()
    raise ValueError(f"unknown backend {name!r}")


FAMILY_MRC = pykernels.FAMILY_MRC
FAMILY_JOINT_SIC = pykernels.FAMILY_JOINT_SIC
FAMILY_JOINT_INOISE = pykernels.FAMILY_JOINT_INOISE
FAMILY_SUM_INOISE = pykernels.FAMILY_SUM_INOISE

integrate_factor = _impl.integrate_factor
count_ge = _impl.count_ge
count_mrc = _impl.count_mrc
count_sinr_ge = _impl.count_sinr_ge
count_sum_ge = _impl.count_sum_ge
count_joint_sic = _impl.count_joint_sic
count_joint_inoise = _impl.count_joint_inoise
count_m1_cache = _impl.count_m1_cache
count_m3_cache = _impl.count_m3_cache
count_m4_cache = _impl.count_m4_cache
