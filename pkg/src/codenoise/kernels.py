"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
implementations take over.  Setting ``CODENOISE_BACKEND=python`` forces
the fallback (useful for benchmarking and for reproducing a failure on a
machine without a compiler).
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def _select() -> tuple[str, ModuleType]:
    wanted = os.environ.get("CODENOISE_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in BACKENDS:
            raise ImportError(f"CODENOISE_BACKEND={wanted!r} is not available; have {sorted(BACKENDS)}")
        return wanted, BACKENDS[wanted]
    if "cython" in BACKENDS:
        return "cython", _ckernels
    return "python", _pykernels


BACKEND, _impl = _select()


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module by name; the active one when ``name`` is None."""
    if name is None:
        return _impl
    return BACKENDS[name]


fwht_float = _impl.fwht_float
fwht_int = _impl.fwht_int
subset_ranks = _impl.subset_ranks
batch_rank = _impl.batch_rank
pair_sum_total = _impl.pair_sum_total
census_oracle = _impl.census_oracle
