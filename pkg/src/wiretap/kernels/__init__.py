"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``WIRETAP_DISABLE_NUMBA`` is
unset (or ``0``). Both implementations stay importable as
:data:`numpy_impl` and :data:`numba_impl` so they can be compared.
"""
import os

import numpy as np

from . import _numpy as numpy_impl

MIXTURE = 0
CHAIN = 1


def _numba_requested() -> bool:
    return os.environ.get("WIRETAP_DISABLE_NUMBA", "0").strip().lower() in ("", "0", "false", "no")


try:
    from . import _numba as numba_impl
except ImportError:  # pragma: no cover - numba is optional
    numba_impl = None

BACKEND = "numba" if (numba_impl is not None and _numba_requested()) else "numpy"
impl = numba_impl if BACKEND == "numba" else numpy_impl

mi = impl.mi
mi_batch = impl.mi_batch
objective = impl.objective
objective_batch = impl.objective_batch
pattern_search = impl.pattern_search
brute_binary = impl.brute_binary
brute_chain = impl.brute_chain


def row_entropies(W: np.ndarray) -> np.ndarray:
    """Entropy in bits of every row of a row-stochastic matrix."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(W > 0, W * np.log2(np.where(W > 0, W, 1.0)), 0.0)
    return np.ascontiguousarray(-t.sum(axis=1))
