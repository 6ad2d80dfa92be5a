"""Pure-Python kernels: the fallback used when the compiled twin is absent.

The three functions here are the inner loops of every election evaluation.
Accumulation order (rows in index order, rank positions left to right) is
part of the contract: ``_ckernels`` follows the same order, so the two
backends return bit-identical arrays.
"""

import numpy as np


def rank_rows(values, order):
    """Rank the alternatives of each row, best first.

    Sorts by value descending; rows with equal values keep the relative
    order of ``order`` (the tie-break priority, highest first).

    Args:
        values: (n, m) float64 array, one row per agent.
        order: (m,) intp permutation of alternative indices.

    Returns:
        (n, m) intp array; entry [i, t] is agent i's rank-t alternative.
    """
    n, m = values.shape
    out = np.empty((n, m), dtype=np.intp)
    base = list(order)
    rows = values.tolist()
    for i in range(n):
        row = rows[i]
        # stable sort: equal values keep the priority order of `base`
        out[i] = sorted(base, key=lambda a: -row[a])
    return out


def score_totals(rankings, weights):
    """Total positional score per alternative.

    Each agent contributes ``weights[t]`` to the alternative they rank at
    position t. Returns a (m,) float64 array.
    """
    n, m = rankings.shape
    totals = [0.0] * m
    w = weights.tolist()
    rows = rankings.tolist()
    for i in range(n):
        row = rows[i]
        for t in range(m):
            totals[row[t]] += w[t]
    return np.array(totals, dtype=np.float64)


def welfare_totals(values):
    """Column sums of a valuation table, accumulated row by row."""
    n, m = values.shape
    totals = [0.0] * m
    for row in values.tolist():
        for a in range(m):
            totals[a] += row[a]
    return np.array(totals, dtype=np.float64)
