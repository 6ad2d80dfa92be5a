"""Command-line experiment harness.

Subcommands:
    experiment   sample instance batches, evaluate mechanism suites, and
                 aggregate per-(rule, k) distortion statistics into CSV
    adversarial  build a named lower-bound instance and verify the
                 distortion it was constructed to achieve
    instance     validate or rewrite instance files

Exit codes: 0 success, 1 failed verification/validation of data, 2 usage
or configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .adversarial import GENERATORS, build_certificate, verify_bound
from .analysis import distortion_empirical, distortion_exact
from .core import Instance, ValidationError, derive_ordinal, normalize_unit_sum
from .datagen import (
    DistributionSpec,
    load_instance,
    load_ratings,
    parse_distribution,
    partition_uniform,
    sample_ratings_valuations,
    sample_valuations,
    save_instance,
)
from .mechanisms import MechanismSpec, parse_mechanism
from .rules import get_rule, rule_names

DEFAULT_RULES = (
    "range",
    "plurality",
    "veto",
    "borda",
    "harmonic",
    "prop-plurality",
    "prop-veto",
    "prop-borda",
    "prop-harmonic",
    "bchlps",
)


def resolve_rule_spec(identifier: str, mode: str = "exact") -> MechanismSpec:
    """Mechanism spec for a config identifier.

    Full "<over>-of-<in>" strings parse as written; a bare in-rule name
    gets the default over-rule pairing: plurality for deterministic
    rules, uniform for randomized ones.
    """
    if "-of-" in identifier:
        return parse_mechanism(identifier, mode=mode)
    rule = get_rule(identifier)
    over = "plurality" if rule.is_deterministic else "uniform"
    return MechanismSpec(in_rule=identifier, over_rule=over, mode=mode)


@dataclass
class ExperimentConfig:
    """Everything one experiment run needs, file- and flag-settable."""

    source: str = "synthetic"  # synthetic | ratings | file
    dist: DistributionSpec = field(default_factory=DistributionSpec.uniform)
    data: str | None = None
    n: int = 100
    m: int = 8
    k_values: tuple[int, ...] = (1,)
    runs: int = 50
    samples: int = 300
    mode: str = "exact"
    rules: tuple[str, ...] = DEFAULT_RULES
    seed: int = 0
    out: str | None = None

    def validate(self) -> None:
        if self.source not in ("synthetic", "ratings", "file"):
            raise ValidationError(f"unknown source {self.source!r}")
        if self.source in ("ratings", "file") and not self.data:
            raise ValidationError(f"source {self.source!r} needs a data path (--data)")
        if self.runs < 1:
            raise ValidationError("runs must be at least 1")
        if self.samples < 1:
            raise ValidationError("samples must be at least 1")
        if self.mode not in ("exact", "montecarlo"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        if self.source != "file":
            if self.n < 1 or self.m < 2:
                raise ValidationError("need n >= 1 and m >= 2")
            for k in self.k_values:
                if k < 1 or self.n % k != 0:
                    raise ValidationError(f"k={k} does not divide n={self.n}")
        for identifier in self.rules:
            spec = resolve_rule_spec(identifier, self.mode)
            if self.mode == "exact" and not spec.is_exactly_evaluable():
                raise ValidationError(
                    f"rule {identifier!r} pairs a plurality over-rule with a randomized "
                    "in-rule; run it with mode=montecarlo"
                )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """Flat key=value config file; '#' starts a comment."""
        config = cls()
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValidationError(f"config line {lineno}: expected key=value")
                config = config.with_option(key.strip(), value.strip())
        return config

    def with_option(self, key: str, value: str) -> "ExperimentConfig":
        if key == "source":
            return replace(self, source=value)
        if key == "dist":
            return replace(self, dist=parse_distribution(value))
        if key == "data":
            return replace(self, data=value)
        if key == "n":
            return replace(self, n=int(value))
        if key == "m":
            return replace(self, m=int(value))
        if key == "k":
            return replace(self, k_values=tuple(int(x) for x in value.split(",")))
        if key == "runs":
            return replace(self, runs=int(value))
        if key == "samples":
            return replace(self, samples=int(value))
        if key == "mode":
            return replace(self, mode=value)
        if key == "rules":
            return replace(self, rules=tuple(x.strip() for x in value.split(",") if x.strip()))
        if key == "seed":
            return replace(self, seed=int(value))
        if key == "out":
            return replace(self, out=value)
        raise ValidationError(f"unknown config key {key!r}")


@dataclass(frozen=True)
class ResultRow:
    rule: str
    k: int
    source: str
    mean_distortion: float
    std_distortion: float
    runs: int
    mode: str
    seed: int


@dataclass(frozen=True)
class ResultTable:
    rows: tuple[ResultRow, ...]


def _source_label(config: ExperimentConfig) -> str:
    if config.source == "synthetic":
        return config.dist.kind
    return f"{config.source}:{config.data}"


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Evaluate every configured rule on ``runs`` sampled instances.

    Each run draws one valuation profile from its own generator stream
    (seed, run index) and re-partitions it for every k, so rows are
    paired across district counts. A per-run log line (run index, stream
    seed, count of all-zero raw rows) goes to standard error.
    """
    config.validate()
    specs = [(identifier, resolve_rule_spec(identifier, config.mode)) for identifier in config.rules]
    label = _source_label(config)

    ratings = None
    file_instance = None
    if config.source == "ratings":
        ratings = load_ratings(config.data)
    elif config.source == "file":
        file_instance = load_instance(config.data)

    ratios: dict[tuple[str, int], list[float]] = {}
    for r in range(config.runs):
        rng = np.random.default_rng((config.seed, r))
        if config.source == "synthetic":
            raw = sample_valuations(config.n, config.m, config.dist, rng)
        elif config.source == "ratings":
            raw = sample_ratings_valuations(ratings, config.n, config.m, rng)
        else:
            raw = np.asarray(file_instance.valuations)
        zero_rows = int(np.count_nonzero(raw.sum(axis=1) == 0.0))
        print(f"run {r}: stream=({config.seed},{r}) zero_rows={zero_rows}", file=sys.stderr)

        if config.source == "file":
            instances = [(file_instance.k, file_instance)]
            profile = derive_ordinal(file_instance)
        else:
            vals = normalize_unit_sum(raw)
            instances = []
            for k in config.k_values:
                districts = partition_uniform(config.n, k, rng)
                instances.append((k, Instance(vals, districts)))
            profile = derive_ordinal(instances[0][1])

        for k, instance in instances:
            for identifier, spec in specs:
                if config.mode == "exact":
                    report = distortion_exact(instance, spec, profile)
                else:
                    report = distortion_empirical(instance, spec, config.samples, rng, profile)
                ratios.setdefault((spec.name, k), []).append(report.ratio)

    rows = []
    for (name, k), values in ratios.items():
        arr = np.asarray(values)
        if np.all(np.isfinite(arr)):
            mean = float(arr.mean())
            std = float(arr.std())
        else:
            mean = math.inf
            std = math.inf
        rows.append(ResultRow(name, k, label, mean, std, config.runs, config.mode, config.seed))
    rows.sort(key=lambda row: (row.rule, row.k))
    return ResultTable(tuple(rows))


def _fmt(value: float) -> str:
    if not math.isfinite(value):
        return "inf"
    return f"{value:.6f}"


def emit_csv(table: ResultTable, path=None) -> str:
    """Render a result table as CSV; write it when ``path`` is given."""
    lines = ["rule,k,source,mean_distortion,std_distortion,runs,mode,seed"]
    for row in sorted(table.rows, key=lambda r: (r.rule, r.k)):
        lines.append(
            f"{row.rule},{row.k},{row.source},{_fmt(row.mean_distortion)},"
            f"{_fmt(row.std_distortion)},{row.runs},{row.mode},{row.seed}"
        )
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distvote", description="distributed voting mechanisms and their distortion"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run a distortion experiment and emit CSV")
    exp.add_argument("--config", help="key=value config file; flags override it")
    exp.add_argument("--dist", help="synthetic distribution: uniform | beta | exponential")
    exp.add_argument("--data", help="ratings file (source=ratings) or instance file (source=file)")
    exp.add_argument("--source", choices=["synthetic", "ratings", "file"])
    exp.add_argument("--n", type=int)
    exp.add_argument("--m", type=int)
    exp.add_argument("--k", help="comma-separated district counts")
    exp.add_argument("--runs", type=int)
    exp.add_argument("--samples", type=int, help="Monte Carlo samples per randomized evaluation")
    exp.add_argument("--seed", type=int)
    exp.add_argument("--rules", help="comma-separated rule or '<over>-of-<in>' identifiers")
    exp.add_argument("--mode", choices=["exact", "montecarlo"])
    exp.add_argument("--out", help="CSV output path (default: stdout)")

    adv = sub.add_parser("adversarial", help="build and verify a lower-bound instance")
    adv.add_argument("--list", action="store_true", help="list the known generators")
    adv.add_argument("--gen", choices=sorted(GENERATORS))
    adv.add_argument("--k", type=int, default=2)
    adv.add_argument("--m", type=int)
    adv.add_argument("--lambda", dest="lam", type=int, default=1, help="agents per district")
    adv.add_argument("--eps", type=float, default=1e-6)
    adv.add_argument("--mechanism", help="override the generator's target mechanism")
    adv.add_argument("--expect", type=float, help="override the expected ratio")
    adv.add_argument("--tol", type=float, default=1e-9)
    adv.add_argument("--at-least", action="store_true", help="pass when ratio >= expected - tol")
    adv.add_argument("--out", help="also write the instance file")

    ins = sub.add_parser("instance", help="validate or rewrite an instance file")
    ins.add_argument("path")
    ins.add_argument("--out", help="rewrite the validated instance here")
    return parser


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    for key in ("source", "dist", "data", "n", "m", "runs", "samples", "seed", "mode", "out"):
        value = getattr(args, key)
        if value is not None:
            config = config.with_option(key, str(value))
    if args.k is not None:
        config = config.with_option("k", args.k)
    if args.rules is not None:
        config = config.with_option("rules", args.rules)
    table = run_experiment(config)
    text = emit_csv(table, config.out)
    if config.out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(table.rows)} rows to {config.out}", file=sys.stderr)
    return 0


def _cmd_adversarial(args) -> int:
    if args.list:
        for name in sorted(GENERATORS):
            print(f"{name}: {GENERATORS[name]}")
        return 0
    if args.gen is None:
        print("error: --gen is required (or use --list)", file=sys.stderr)
        return 2
    instance, cert = build_certificate(args.gen, k=args.k, m=args.m, lam=args.lam, eps=args.eps)
    mech = parse_mechanism(args.mechanism) if args.mechanism else cert.target_mechanism
    expected = args.expect if args.expect is not None else cert.expected_ratio
    if args.out:
        save_instance(instance, args.out)
        print(f"wrote instance to {args.out}", file=sys.stderr)
    report = verify_bound(instance, mech, expected, tol=args.tol, at_least=args.at_least)
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status} {args.gen} params={cert.params} mechanism={mech.name} "
        f"achieved={report.achieved!r} expected={report.expected!r} tol={report.tol}"
    )
    return 0 if report.passed else 1


def _cmd_instance(args) -> int:
    try:
        instance = load_instance(args.path)
    except (OSError, ValidationError) as exc:
        print(f"invalid instance file: {exc}", file=sys.stderr)
        return 1
    print(f"valid instance: n={instance.n} m={instance.m} k={instance.k}")
    if args.out:
        save_instance(instance, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for usage errors
        return int(exc.code or 0)
    try:
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "adversarial":
            return _cmd_adversarial(args)
        return _cmd_instance(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if "rule" in str(exc) and "unknown" in str(exc).lower():
            print(f"valid rule identifiers: {', '.join(rule_names())}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
