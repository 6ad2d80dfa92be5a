"""Kernel backend selection and input canonicalisation.

At import time the compiled extension (``distvote._ckernels``) is picked
when available, otherwise the pure-Python fallback. Set the environment
variable ``DISTVOTE_KERNELS`` to ``compiled`` or ``python`` to force a
backend; ``compiled`` raises if the extension was not built.

Both backends implement the same three functions with identical
accumulation order, so results are bit-identical either way (see
``benchmarks/bench_kernels.py`` for the speed comparison).
"""

import os

import numpy as np

from . import _pykernels

_requested = os.environ.get("DISTVOTE_KERNELS", "auto")
if _requested not in ("auto", "compiled", "python"):
    raise ValueError(
        f"DISTVOTE_KERNELS must be 'auto', 'compiled' or 'python', got {_requested!r}"
    )

if _requested == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "DISTVOTE_KERNELS=compiled but distvote._ckernels is not built; "
                "reinstall with a C compiler available"
            ) from None
        _impl = _pykernels
        BACKEND = "python"


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND


def _as_values(values):
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("values must be a 2-D table")
    return arr


def _as_rankings(rankings):
    arr = np.ascontiguousarray(rankings, dtype=np.intp)
    if arr.ndim != 2:
        raise ValueError("rankings must be a 2-D table")
    return arr


def rank_rows(values, order):
    """Per-row ranking of alternatives, best first, ties by priority.

    ``order`` lists the alternatives from highest to lowest tie-break
    priority; rows are sorted by value descending with exact-equality
    ties resolved in that order.
    """
    values = _as_values(values)
    order = np.ascontiguousarray(order, dtype=np.intp)
    if order.shape != (values.shape[1],):
        raise ValueError("order length must equal the number of alternatives")
    return _impl.rank_rows(values, order)


def score_totals(rankings, weights):
    """Per-alternative totals of a positional weight vector."""
    rankings = _as_rankings(rankings)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.shape != (rankings.shape[1],):
        raise ValueError("weights length must equal the number of alternatives")
    return _impl.score_totals(rankings, weights)


def welfare_totals(values):
    """Column sums of a valuation table."""
    return _impl.welfare_totals(_as_values(values))
