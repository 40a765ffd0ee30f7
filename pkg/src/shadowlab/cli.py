"""Command-line harness: figure sweeps, gamma queries, estimates, self-checks.

Sweep configs are flat ``key = value`` text files (``#`` comments and blank
lines allowed); integer lists are comma-separated. Keys:

    experiment   pauli_grid | pauli_weight | clifford_grid | clifford_scaling
    n            register size (pauli_grid, pauli_weight, clifford_grid)
    theta        GHZ phase of the prepared state (default 0)
    observable   observable spec (see parse_observable); pauli_weight uses
                 `letter` instead, clifford_scaling accepts `ghz_proj` or a
                 pauli spec that is padded with identities per n
    letter       Z | X (pauli_weight only)
    M_values     comma list, default 8,16,...,1024
    K_values     comma list, default 1,2,...,64
    w_values     comma list (pauli_weight only)
    n_values     comma list (clifford_scaling only)
    trials       shadow sets per grid point (default 10000 pauli, 2000 clifford)
    master_seed  integer, default 0
    out          output path (overridden by --out)

Every grid point i derives its generator from (master_seed, spawn_key=(i,)),
so identical config + seed give byte-identical output at any --threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import engine
from .paulis import PauliString
from .shadows import estimate, load_shadowset, median_of_means
from .states import SpecError, parse_observable, parse_state
from .variance import gamma_brute, moment_stats, variance_pauli_exact
from .verifiers import run_checks

CSV_COLUMNS = (
    "ensemble",
    "n",
    "M",
    "K",
    "param",
    "observable",
    "trials",
    "mean_estimate",
    "empirical_variance",
    "predicted_variance",
    "stderr_variance",
    "seed",
)

DEFAULT_M = (8, 16, 32, 64, 128, 256, 512, 1024)
DEFAULT_K = (1, 2, 4, 8, 16, 32, 64)

EXPERIMENTS = ("pauli_grid", "pauli_weight", "clifford_grid", "clifford_scaling")

_INT_KEYS = ("n", "trials", "master_seed")
_LIST_KEYS = ("M_values", "K_values", "w_values", "n_values")
_STR_KEYS = ("experiment", "observable", "letter", "out")
_FLOAT_KEYS = ("theta",)


def _fmt(x: float) -> str:
    return "{:.12g}".format(float(x))


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    n: int
    theta: float
    observable: str
    letter: str
    M_values: tuple
    K_values: tuple
    w_values: tuple
    n_values: tuple
    trials: int
    master_seed: int
    out: str


@dataclass(frozen=True)
class SweepPoint:
    index: int
    ensemble: str
    n: int
    M: int
    K: int
    param: float
    state_spec: str
    obs_spec: str
    trials: int


def parse_config(text: str, ensemble: str) -> SweepConfig:
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"line {lineno}: expected key = value")
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                raw[key] = int(value)
            elif key in _FLOAT_KEYS:
                raw[key] = float(value)
            elif key in _LIST_KEYS:
                raw[key] = tuple(int(v.strip()) for v in value.split(",") if v.strip())
            elif key in _STR_KEYS:
                raw[key] = value
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None

    experiment = raw.get("experiment", "")
    if experiment not in EXPERIMENTS:
        raise ValueError(f"experiment must be one of {', '.join(EXPERIMENTS)}")
    expected = "pauli" if experiment.startswith("pauli") else "clifford"
    if expected != ensemble:
        raise ValueError(f"experiment {experiment} belongs to the {expected} sweep command")

    cfg = SweepConfig(
        experiment=experiment,
        n=raw.get("n", 5),
        theta=raw.get("theta", 0.0),
        observable=raw.get("observable", ""),
        letter=raw.get("letter", ""),
        M_values=raw.get("M_values", DEFAULT_M),
        K_values=raw.get("K_values", DEFAULT_K),
        w_values=raw.get("w_values", ()),
        n_values=raw.get("n_values", ()),
        trials=raw.get("trials", 10000 if expected == "pauli" else 2000),
        master_seed=raw.get("master_seed", 0),
        out=raw.get("out", ""),
    )
    if not cfg.M_values or not cfg.K_values:
        raise ValueError("M_values and K_values must be non-empty")
    if cfg.trials < 100:
        raise ValueError("trials must be >= 100")
    if experiment == "pauli_grid" and not cfg.observable:
        raise ValueError("pauli_grid requires an observable")
    if experiment == "pauli_weight":
        if cfg.letter not in ("Z", "X"):
            raise ValueError("pauli_weight requires letter = Z or X")
        if not cfg.w_values:
            raise ValueError("pauli_weight requires w_values")
        if any(w < 1 or w > cfg.n for w in cfg.w_values):
            raise ValueError("w_values must lie in [1, n]")
    if experiment == "clifford_scaling":
        if not cfg.n_values:
            raise ValueError("clifford_scaling requires n_values")
        if not cfg.observable:
            raise ValueError("clifford_scaling requires an observable")
    return cfg


def _scaling_obs_spec(template: str, n: int) -> str:
    if template == "ghz_proj":
        return f"ghz_proj:n={n}"
    if template.startswith("pauli:"):
        label = template[len("pauli:"):]
        if len(label) > n:
            raise ValueError(f"pauli template longer than n={n}")
        return "pauli:" + label + "I" * (n - len(label))
    raise ValueError(f"clifford_scaling observable must be ghz_proj or pauli:..., got {template!r}")


def sweep_points(cfg: SweepConfig) -> list[SweepPoint]:
    """Grid points in deterministic order: outer parameter, then M, then K."""
    points = []

    def add(ensemble, n, M, K, param, state_spec, obs_spec):
        points.append(
            SweepPoint(len(points), ensemble, n, M, K, param, state_spec, obs_spec, cfg.trials)
        )

    if cfg.experiment == "pauli_grid":
        state = f"ghz:n={cfg.n},theta={_fmt(cfg.theta)}"
        obs = parse_observable(cfg.observable, cfg.n)
        if not isinstance(obs, PauliString):
            raise ValueError("pauli_grid requires a pauli observable")
        for M in cfg.M_values:
            for K in cfg.K_values:
                add("pauli", cfg.n, M, K, obs.weight, state, cfg.observable)
    elif cfg.experiment == "pauli_weight":
        state = f"ghz:n={cfg.n},theta={_fmt(cfg.theta)}"
        for w in cfg.w_values:
            spec = "pauli:" + cfg.letter * w + "I" * (cfg.n - w)
            for M in cfg.M_values:
                for K in cfg.K_values:
                    add("pauli", cfg.n, M, K, w, state, spec)
    elif cfg.experiment == "clifford_grid":
        state = f"ghz:n={cfg.n},theta={_fmt(cfg.theta)}"
        spec = cfg.observable or f"ghz_proj:n={cfg.n}"
        parse_observable(spec, cfg.n)
        for M in cfg.M_values:
            for K in cfg.K_values:
                add("clifford", cfg.n, M, K, cfg.theta, state, spec)
    else:
        for n in cfg.n_values:
            state = f"ghz:n={n},theta={_fmt(cfg.theta)}"
            spec = _scaling_obs_spec(cfg.observable, n)
            parse_observable(spec, n)
            for M in cfg.M_values:
                for K in cfg.K_values:
                    add("clifford", n, M, K, cfg.theta, state, spec)
    return points


def _point_worker(args):
    point, master_seed = args
    state = parse_state(point.state_spec)
    obs = parse_observable(point.obs_spec, point.n)
    seed = np.random.SeedSequence(entropy=master_seed, spawn_key=(point.index,))
    values = engine.estimator_samples(
        state, obs, point.ensemble, point.M, point.K, point.trials, seed
    )
    mean, var, se = moment_stats(values)
    pred = None
    if point.ensemble == "pauli" and isinstance(obs, PauliString):
        pred = variance_pauli_exact(obs, state, point.M, point.K)
    return point.index, mean, var, se, pred


def run_sweep(cfg: SweepConfig, threads: int = 1) -> list[dict]:
    points = sweep_points(cfg)
    jobs = [(p, cfg.master_seed) for p in points]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_point_worker, jobs))
    else:
        results = [_point_worker(job) for job in jobs]
    rows = []
    for point, (index, mean, var, se, pred) in zip(points, results):
        assert index == point.index
        rows.append(
            {
                "ensemble": point.ensemble,
                "n": point.n,
                "M": point.M,
                "K": point.K,
                "param": point.param,
                "observable": point.obs_spec,
                "trials": point.trials,
                "mean_estimate": mean,
                "empirical_variance": var,
                "predicted_variance": pred,
                "stderr_variance": se,
                "seed": cfg.master_seed,
            }
        )
    return rows


def write_rows(rows: list[dict], stream, fmt: str) -> None:
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row["ensemble"],
                    row["n"],
                    row["M"],
                    row["K"],
                    _fmt(row["param"]),
                    row["observable"],
                    row["trials"],
                    _fmt(row["mean_estimate"]),
                    _fmt(row["empirical_variance"]),
                    "" if row["predicted_variance"] is None else _fmt(row["predicted_variance"]),
                    _fmt(row["stderr_variance"]),
                    row["seed"],
                ]
            )
    else:
        for row in rows:
            obj = dict(row)
            for key in ("param", "mean_estimate", "empirical_variance", "stderr_variance"):
                obj[key] = float(_fmt(obj[key]))
            if obj["predicted_variance"] is not None:
                obj["predicted_variance"] = float(_fmt(obj["predicted_variance"]))
            stream.write(json.dumps(obj) + "\n")


def _open_out(path):
    if path:
        return open(path, "w", newline="")
    return None


def _cmd_sweep(ensemble: str, args) -> int:
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read(), ensemble)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = SweepConfig(**{**cfg.__dict__, "master_seed": args.seed})
    out_path = args.out or cfg.out
    try:
        rows = run_sweep(cfg, threads=args.threads)
    except (ValueError, SpecError) as exc:
        print(f"sweep error: {exc}", file=sys.stderr)
        return 2
    if out_path:
        with open(out_path, "w", newline="") as fh:
            write_rows(rows, fh, args.format)
    else:
        write_rows(rows, sys.stdout, args.format)
    return 0


def _cmd_verify(args) -> int:
    results = run_checks(args.level, seed=args.seed if args.seed is not None else 0)
    lines = [r.line() for r in results]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0 if all(r.passed for r in results) else 1


def _cmd_gamma(args) -> int:
    try:
        sigma = parse_state(args.sigma)
        obs = parse_observable(args.obs, sigma.n)
        pair = gamma_brute(
            sigma,
            obs,
            args.ensemble,
            budget=args.budget,
            seed=args.seed if args.seed is not None else 0,
        )
    except (ValueError, SpecError) as exc:
        print(f"gamma error: {exc}", file=sys.stderr)
        return 2
    parts = [
        f"gamma1={_fmt(pair.gamma1)}",
        f"gamma2={_fmt(pair.gamma2)}",
        f"method={pair.method}",
    ]
    if pair.mc_error is not None:
        parts.append(f"se1={_fmt(pair.mc_error[0])}")
        parts.append(f"se2={_fmt(pair.mc_error[1])}")
    line = " ".join(parts) + "\n"
    sys.stdout.write(line)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(line)
    return 0


def _cmd_estimate(args) -> int:
    try:
        shadows = load_shadowset(args.input)
        obs = parse_observable(args.obs, shadows.n)
        if args.groups is not None:
            value = median_of_means(shadows, obs, args.groups)
            line = f"median_of_means={_fmt(value)} groups={args.groups} M={shadows.M} K={shadows.K}\n"
        else:
            report = estimate(shadows, obs)
            line = f"estimate={_fmt(report.value)} M={report.M} K={report.K}\n"
    except (OSError, ValueError, SpecError) as exc:
        print(f"estimate error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(line)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(line)
    return 0


def _add_global_flags(parser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--seed", type=int, default=d, help="master seed override"
    )
    parser.add_argument(
        "--out", default=argparse.SUPPRESS if suppress else "", help="output path (default stdout)"
    )
    parser.add_argument(
        "--threads", type=int, default=argparse.SUPPRESS if suppress else 1,
        help="worker processes for sweeps",
    )
    parser.add_argument(
        "--format", choices=("csv", "jsonl"), default=argparse.SUPPRESS if suppress else "csv"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shadowlab",
        description="multi-shot classical shadow simulator and statistics lab",
    )
    _add_global_flags(parser, suppress=False)
    # global flags are also accepted after the subcommand
    shared = argparse.ArgumentParser(add_help=False)
    _add_global_flags(shared, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser(
        "pauli-sweep", parents=[shared], help="run a Pauli-ensemble sweep from a config file"
    )
    ps.add_argument("--config", required=True)

    cs = sub.add_parser(
        "clifford-sweep", parents=[shared], help="run a Clifford-ensemble sweep from a config file"
    )
    cs.add_argument("--config", required=True)

    vf = sub.add_parser(
        "verify", parents=[shared], help="run the identity/inequality self-checks"
    )
    vf.add_argument("--level", choices=("fast", "full"), default="fast")

    gm = sub.add_parser(
        "gamma", parents=[shared], help="compute gamma1/gamma2 for a (state, observable) pair"
    )
    gm.add_argument("--sigma", required=True, help="state spec, e.g. ghz:n=2")
    gm.add_argument("--obs", required=True, help="observable spec, e.g. pauli:ZZ")
    gm.add_argument("--ensemble", required=True, choices=("pauli", "clifford", "haar"))
    gm.add_argument("--budget", type=int, default=0, help="Monte Carlo unitary count")

    es = sub.add_parser(
        "estimate", parents=[shared], help="estimate an observable from a saved shadow set"
    )
    es.add_argument("--input", required=True)
    es.add_argument("--obs", required=True)
    es.add_argument("--groups", type=int, default=None, help="median-of-means group count")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "pauli-sweep":
        return _cmd_sweep("pauli", args)
    if args.command == "clifford-sweep":
        return _cmd_sweep("clifford", args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "gamma":
        return _cmd_gamma(args)
    return _cmd_estimate(args)


if __name__ == "__main__":
    sys.exit(main())
