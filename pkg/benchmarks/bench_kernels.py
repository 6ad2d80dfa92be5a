#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot kernels on experiment-sized inputs and an
end-to-end exact distortion evaluation. Run after installing:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from distvote import _pykernels

try:
    from distvote import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, reps):
    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - start) / reps)
    return best


def bench_kernels(n=100, m=8, reps=2000):
    rng = np.random.default_rng(0)
    values = np.ascontiguousarray(rng.dirichlet(np.ones(m), size=n))
    order = np.arange(m, dtype=np.intp)
    rankings = _pykernels.rank_rows(values, order)
    weights = np.ascontiguousarray(np.linspace(1.0, 0.0, m))

    jobs = [
        ("rank_rows", lambda k: lambda: k.rank_rows(values, order)),
        ("score_totals", lambda k: lambda: k.score_totals(rankings, weights)),
        ("welfare_totals", lambda k: lambda: k.welfare_totals(values)),
    ]
    print(f"kernel timings, n={n} m={m} (best of 5 x {reps} calls)")
    header = f"{'kernel':<16}{'python':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    for name, make in jobs:
        py = timeit(make(_pykernels), reps)
        if _ckernels is None:
            print(f"{name:<16}{py * 1e6:>10.1f}us{'-':>12}{'-':>10}")
            continue
        cy = timeit(make(_ckernels), reps)
        print(f"{name:<16}{py * 1e6:>10.1f}us{cy * 1e6:>10.1f}us{py / cy:>9.1f}x")


def bench_experiment():
    """One full exact evaluation sweep, as the experiment harness runs it."""
    import distvote.kernels as kernels
    from distvote.analysis import distortion_exact
    from distvote.cli import resolve_rule_spec
    from distvote.core import Instance, derive_ordinal, normalize_unit_sum
    from distvote.datagen import DistributionSpec, partition_uniform, sample_valuations

    rules = ["range", "plurality", "borda", "veto", "harmonic",
             "prop-plurality", "prop-borda", "prop-veto", "prop-harmonic", "bchlps"]
    specs = [resolve_rule_spec(r) for r in rules]
    rng = np.random.default_rng(1)
    runs, n, m, ks = 50, 100, 8, (1, 2, 5, 20, 25)

    start = time.perf_counter()
    for r in range(runs):
        run_rng = np.random.default_rng((1, r))
        vals = normalize_unit_sum(sample_valuations(n, m, DistributionSpec.uniform(), run_rng))
        instances = [Instance(vals, partition_uniform(n, k, run_rng)) for k in ks]
        profile = derive_ordinal(instances[0])
        for inst in instances:
            for spec in specs:
                distortion_exact(inst, spec, profile)
    elapsed = time.perf_counter() - start
    per_eval = elapsed / (runs * len(ks) * len(specs))
    print(
        f"\nexact sweep ({kernels.backend_name()} backend): {runs} runs x {len(ks)} k x "
        f"{len(specs)} rules, n={n} m={m}: {elapsed:.2f}s total, {per_eval * 1e6:.0f}us/eval"
    )


if __name__ == "__main__":
    bench_kernels()
    bench_experiment()
