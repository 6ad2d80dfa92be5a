"""Worst-case instance constructions and distortion-bound verification.

Each generator builds an instance on which a specific mechanism provably
does badly: the targeted mechanism's winner is traceable by hand under
index tie order, its welfare is tiny, and the expected ratio follows
from the column sums of the constructed table. ``verify_bound`` turns
that arithmetic into an executable check.

The idealized vanishing value-gap of these constructions is a concrete
parameter ``eps`` (default 1e-6); expected ratios are evaluated at the
chosen eps, not in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import distortion_exact
from .core import Districts, Instance, TieOrder, ValidationError
from .mechanisms import MechanismSpec, parse_mechanism

DEFAULT_EPS = 1e-6


@dataclass(frozen=True)
class LowerBoundSpec:
    """A generated instance's certificate: the mechanism it targets and
    the exact ratio it is built to achieve."""

    name: str
    params: dict = field(compare=False)
    target_mechanism: MechanismSpec = field(compare=False)
    expected_ratio: float = 1.0

    def __post_init__(self):
        if self.expected_ratio < 1.0:
            raise ValidationError("an achievable distortion ratio cannot be below 1")


def _block_instance(rows_per_district, m: int) -> Instance:
    """Stack per-district row blocks into an instance with consecutive districts."""
    blocks = [np.asarray(b, dtype=np.float64).reshape(-1, m) for b in rows_per_district]
    return Instance(np.vstack(blocks), Districts.from_sizes([b.shape[0] for b in blocks]))


def gen_unanimous_lb(k: int, m: int, lam: int = 1, eps: float = DEFAULT_EPS) -> Instance:
    """Instance where unanimity forces a low-welfare winner.

    District 1's agents value alternative 0 just above uniform (1/m + eps)
    and everything else just below; district l (2..k) values alternative
    l-1 at 1/2 + eps and alternative k at 1/2 - eps. Any unanimous
    in-rule makes all k representatives distinct, and index tie order
    then elects alternative 0, whose welfare is about lam/m while
    alternative k collects about (k-1) * lam / 2.
    """
    if k < 2:
        raise ValidationError("k must be at least 2")
    if m <= k:
        raise ValidationError("m must exceed k")
    if lam < 1:
        raise ValidationError("district size must be positive")
    if not 0.0 < eps < 1.0 / (2 * m):
        raise ValidationError(f"eps must lie in (0, 1/(2m)) = (0, {1.0 / (2 * m)})")
    first = np.full(m, 1.0 / m - eps / (m - 1))
    first[0] = 1.0 / m + eps
    blocks = [np.tile(first, (lam, 1))]
    for ell in range(1, k):
        row = np.zeros(m)
        row[ell] = 0.5 + eps
        row[k] = 0.5 - eps
        blocks.append(np.tile(row, (lam, 1)))
    return _block_instance(blocks, m)


def unanimous_lb_ratio(k: int, m: int, eps: float) -> float:
    """Exact ratio achieved on ``gen_unanimous_lb`` by plurality-of-range."""
    spread = 1.0 / m - eps / (m - 1)
    best = spread + max((k - 1) * (0.5 - eps), 0.5 + eps)
    return best / (1.0 / m + eps)


def gen_rand_unanimous_lb(
    k: int, lam: int = 1, eps: float = DEFAULT_EPS, m: int | None = None
) -> Instance:
    """Instance where every over-rule lottery earns the same low welfare.

    District l's agents value alternative l-1 at 1/2 + eps and the shared
    alternative k at 1/2 - eps. Unanimous in-rules make representative l
    equal l-1, each with welfare lam * (1/2 + eps), while alternative k
    collects k * lam * (1/2 - eps); the ratio approaches k as eps -> 0.
    """
    if k < 2:
        raise ValidationError("k must be at least 2")
    if lam < 1:
        raise ValidationError("district size must be positive")
    if not 0.0 < eps < 0.5:
        raise ValidationError("eps must lie in (0, 1/2)")
    if m is None:
        m = k + 1
    if m < k + 1:
        raise ValidationError("m must be at least k + 1")
    blocks = []
    for ell in range(k):
        row = np.zeros(m)
        row[ell] = 0.5 + eps
        row[k] = 0.5 - eps
        blocks.append(np.tile(row, (lam, 1)))
    return _block_instance(blocks, m)


def rand_unanimous_lb_ratio(k: int, eps: float) -> float:
    """Exact ratio achieved on ``gen_rand_unanimous_lb`` by uniform-of-range."""
    return k * (0.5 - eps) / (0.5 + eps)


def gen_sqrt_lb(k: int, lam: int = 1, m: int | None = None) -> Instance:
    """Instance pinning any deterministic in-rule to welfare lam/2.

    k must be a perfect square. District l's agents value alternative
    l-1 at 1/2 and each of the sqrt(k) shared alternatives k..k+sqrt(k)-1
    at 1/(2*sqrt(k)). The district representative must be alternative
    l-1 (anything else costs a factor sqrt(k) already inside copies of
    the district), so every over-rule earns lam/2 while each shared
    alternative collects sqrt(k) * lam / 2.
    """
    r = math.isqrt(k)
    if r * r != k or k < 4:
        raise ValidationError("k must be a perfect square >= 4")
    if lam < 1:
        raise ValidationError("district size must be positive")
    if m is None:
        m = k + r
    if m < k + r:
        raise ValidationError(f"m must be at least k + sqrt(k) = {k + r}")
    blocks = []
    for ell in range(k):
        row = np.zeros(m)
        row[ell] = 0.5
        row[k : k + r] = 1.0 / (2 * r)
        blocks.append(np.tile(row, (lam, 1)))
    return _block_instance(blocks, m)


def sqrt_lb_ratio(k: int) -> float:
    """Exact ratio achieved on ``gen_sqrt_lb`` by uniform-of-range."""
    return float(math.isqrt(k))


def gen_divided_district(lam: int, m: int, tops, tie: TieOrder):
    """One district split into m/2 equal groups with distinct favorites.

    The group arithmetic uses ``m`` (so each of the m/2 groups has
    2*lam/m agents); the rows span the full alternative universe of
    ``tie``. Each group ranks its favorite first and the remaining
    alternatives in priority order, valuing the favorite at 1.

    Returns:
        (rankings, valuations): two (lam x tie.m) blocks.
    """
    if m < 2 or m % 2 != 0:
        raise ValidationError("m must be even and at least 2")
    if (2 * lam) % m != 0 or lam < m // 2:
        raise ValidationError(f"2*lam/m must be a positive integer; got lam={lam}, m={m}")
    tops = tuple(int(t) for t in tops)
    if len(tops) != m // 2 or len(set(tops)) != len(tops):
        raise ValidationError(f"need m/2 = {m // 2} distinct favorite alternatives")
    width = tie.m
    if any(not 0 <= t < width for t in tops):
        raise ValidationError("favorite alternatives out of range for the tie order")
    group = 2 * lam // m
    rankings = np.empty((lam, width), dtype=np.intp)
    valuations = np.zeros((lam, width))
    for j, top in enumerate(tops):
        ranking = [top] + [a for a in tie.order if a != top]
        rows = slice(j * group, (j + 1) * group)
        rankings[rows] = ranking
        valuations[rows, top] = 1.0
    return rankings, valuations


def gen_divided_lb(k: int, m: int, lam: int) -> Instance:
    """Instance forcing plurality-of-plurality into a near-worthless winner.

    Alternative layout (index tie order does the damage): 0 is the
    divided district's first favorite, 1..m/2-1 its other favorites,
    m/2..m/2+k-2 the unanimous districts' favorites, m/2+k-1 the shared
    runner-up. District 1 is divided with all its favorite groups tied
    at 2*lam/m first-place votes, so priority elects alternative 0,
    whose supporters value everything at 1/m. Districts 2..k unanimously
    top their own favorite while valuing it and the shared runner-up at
    1/2 each. All k representatives are distinct, priority elects
    alternative 0 overall, and the ratio is 1 + (k-1) * m^2 / 4.
    """
    if k < 2:
        raise ValidationError("k must be at least 2")
    if m % 2 != 0 or m < 2 * k:
        raise ValidationError("m must be even and at least 2k (the layout needs m/2 + k <= m)")
    tie = TieOrder.index(m)
    _, divided_vals = gen_divided_district(lam, m, tuple(range(m // 2)), tie)
    group = 2 * lam // m
    # the first favorite's group carries no signal: uniform 1/m rows
    divided_vals[:group] = 1.0 / m
    blocks = [divided_vals]
    x = m // 2 + k - 1
    for ell in range(1, k):
        row = np.zeros(m)
        row[m // 2 + ell - 1] = 0.5
        row[x] = 0.5
        blocks.append(np.tile(row, (lam, 1)))
    return _block_instance(blocks, m)


def divided_lb_ratio(k: int, m: int) -> float:
    """Exact ratio achieved on ``gen_divided_lb`` by plurality-of-plurality."""
    return 1.0 + (k - 1) * m * m / 4.0


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking an instance against its expected ratio."""

    passed: bool
    achieved: float
    expected: float
    tol: float
    at_least: bool


def verify_bound(
    instance: Instance,
    spec: MechanismSpec,
    expected_ratio: float,
    tol: float = 1e-9,
    at_least: bool = False,
) -> BoundReport:
    """Check that a mechanism achieves a target distortion on an instance.

    Passes when |ratio - expected| <= tol, or when ratio >= expected - tol
    in ``at_least`` mode.
    """
    achieved = distortion_exact(instance, spec).ratio
    if at_least:
        passed = achieved >= expected_ratio - tol
    else:
        passed = abs(achieved - expected_ratio) <= tol
    return BoundReport(passed, achieved, expected_ratio, tol, at_least)


def build_certificate(
    name: str,
    k: int,
    m: int | None = None,
    lam: int = 1,
    eps: float = DEFAULT_EPS,
) -> tuple[Instance, LowerBoundSpec]:
    """Build a named lower-bound instance plus its certificate.

    Known generators: "unanimous" (plurality-of-range), "divided"
    (plurality-of-plurality), "rand-unanimous" (uniform-of-range) and
    "sqrt" (uniform-of-range).
    """
    if name == "unanimous":
        if m is None:
            m = k + 1
        instance = gen_unanimous_lb(k, m, lam, eps)
        mech = parse_mechanism("plurality-of-range")
        expected = unanimous_lb_ratio(k, m, eps)
        params = {"k": k, "m": m, "lam": lam, "eps": eps}
    elif name == "divided":
        if m is None:
            m = 2 * k
        if lam < m // 2:
            lam = m // 2
        instance = gen_divided_lb(k, m, lam)
        mech = parse_mechanism("plurality-of-plurality")
        expected = divided_lb_ratio(k, m)
        params = {"k": k, "m": m, "lam": lam}
    elif name == "rand-unanimous":
        instance = gen_rand_unanimous_lb(k, lam, eps, m)
        mech = parse_mechanism("uniform-of-range")
        expected = rand_unanimous_lb_ratio(k, eps)
        params = {"k": k, "m": instance.m, "lam": lam, "eps": eps}
    elif name == "sqrt":
        instance = gen_sqrt_lb(k, lam, m)
        mech = parse_mechanism("uniform-of-range")
        expected = sqrt_lb_ratio(k)
        params = {"k": k, "m": instance.m, "lam": lam}
    else:
        raise ValidationError(
            f"unknown generator {name!r}; valid: {', '.join(sorted(GENERATORS))}"
        )
    return instance, LowerBoundSpec(name, params, mech, expected)


GENERATORS = {
    "unanimous": "unanimous in-rules, plurality over: ratio ~ k*m/2 as eps -> 0",
    "divided": "ordinal deterministic rules under index ties: ratio 1 + (k-1)*m^2/4",
    "rand-unanimous": "any over-lottery on unanimous in-rules: ratio ~ k as eps -> 0",
    "sqrt": "deterministic in-rules with any over-lottery: ratio sqrt(k)",
}
