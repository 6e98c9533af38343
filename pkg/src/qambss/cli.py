"""Command-line entry point: ``simulate``, ``sweep`` and ``oracle-check``.

Exit codes: 0 success, 1 configuration error, 2 every trial failed (or,
for ``oracle-check``, a solver disagreed with its oracle).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import ama, mma, oracle
from .harness import (
    ConfigError,
    ExperimentConfig,
    format_summary,
    run_experiment,
    summarize,
    summary_to_json,
    write_records,
)
from .rotations import make_pair, pair_rows
from .separation import ALGORITHMS, AlgorithmConfig

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ALL_FAILED = 2

log = logging.getLogger("qambss")


def _algo_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in ALGORITHMS]
    if bad or not names:
        raise ConfigError(f"--algo expects names from {ALGORITHMS}, got {text!r}")
    return names


def _select_algorithms(cfg: ExperimentConfig, names: list[str] | None) -> ExperimentConfig:
    if not names:
        return cfg
    kept = [a for a in cfg.algorithms if a.algorithm in names or a.name in names]
    present = {a.algorithm for a in kept} | {a.name for a in kept}
    kept += [AlgorithmConfig(n) for n in names if n not in present]
    return cfg.with_overrides(algorithms=kept)


def _load(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    else:
        cfg = ExperimentConfig(
            n_tx=args.ntx,
            n_rx=args.nrx,
            n_samples=args.samples,
            snr_db=args.snr,
            constellation_order=args.order,
            algorithms=[AlgorithmConfig(a, n_sweeps=args.sweeps, solver_mode=args.mode) for a in ALGORITHMS],
        )
    cfg = cfg.with_overrides(base_seed=args.seed, n_trials=args.trials, output_path=args.out)
    return _select_algorithms(cfg, _algo_list(args.algo) if args.algo else None)


def _run_and_report(cfg: ExperimentConfig, threads: int, summary_path: str | None) -> int:
    records = run_experiment(cfg, threads=threads)
    if cfg.output_path:
        write_records(records, cfg.output_path, include_timing=cfg.record_timing)
        log.info("wrote %d records to %s", len(records), cfg.output_path)
    rows = summarize(records)
    if summary_path:
        Path(summary_path).write_text(summary_to_json(rows))
    print(format_summary(rows))
    for r in records:
        if r.failed:
            log.warning("trial %d (%s, snr=%g, n_s=%d) failed: %s", r.trial_index, r.algorithm, r.snr_db, r.n_samples, r.error)
    return EXIT_ALL_FAILED if all(r.failed for r in records) else EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args).with_overrides(n_trials=args.trials or 1)
    cfg = cfg.with_overrides(n_samples=cfg.n_samples[:1], snr_db=cfg.snr_db[:1])
    records = run_experiment(cfg, threads=1)
    if cfg.output_path:
        write_records(records, cfg.output_path, include_timing=cfg.record_timing)
    print(f"N_t={cfg.n_tx} N_r={cfg.n_rx} N_s={cfg.n_samples[0]} SNR={cfg.snr_db[0]:g} dB {cfg.constellation_order}-QAM")
    for r in records:
        if r.failed:
            print(f"  trial {r.trial_index} {r.algorithm:<10} FAILED  {r.error}")
            continue
        costs = " ".join(f"{c:.4g}" for c in r.cost_trajectory)
        print(f"  trial {r.trial_index} {r.algorithm:<10} SINR {r.sinr_db:7.2f} dB  SER {r.ser:.4f}  cost/sweep [{costs}]")
    return EXIT_ALL_FAILED if all(r.failed for r in records) else EXIT_OK


def cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigError("sweep needs --config")
    cfg = _load(args)
    return _run_and_report(cfg, args.threads, args.summary)


def _rotated_cost(data, p, q, kind, family, n, cs, criterion, level) -> float:
    x = data.copy()
    a, b = make_pair(kind, family, p, q, n, *cs)
    a.apply(x)
    if family != "phase":
        b.apply(x)
    ra, rb = pair_rows(p, q, family, n)
    return oracle.touched_cost(x, ra, rb, criterion, level)


def cmd_oracle_check(args) -> int:
    """Compare every solver with its brute-force grid oracle on random blocks."""
    rng = np.random.default_rng(args.seed)
    n, n_s, step = 3, args.samples, args.grid_step
    worst = {"givens_mm": 0.0, "hyperbolic_mm": 0.0, "givens_am_vs_0": 0.0, "hyperbolic_am_vs_0": 0.0}
    d = 1.0 / np.sqrt(10.0)
    for _ in range(args.blocks):
        data = rng.standard_normal((2 * n, n_s)) / np.sqrt(2.0)
        for family in ("direct", "cross"):
            ra, rb = pair_rows(0, 1, family, n)
            cs = mma.solve_givens_theta(mma.accumulate_givens_form(data, ra, rb))
            _, ref = oracle.grid_min_givens(data, ra, rb, "mm", 1.0, step)
            got = _rotated_cost(data, 0, 1, "givens", family, n, cs, "mm", 1.0)
            worst["givens_mm"] = max(worst["givens_mm"], got - ref)

            cs = mma.solve_hyperbolic_exact(mma.accumulate_hyperbolic_system(data, ra, rb))
            _, ref = oracle.grid_min_hyperbolic(data, ra, rb, "mm", 1.0, step)
            got = _rotated_cost(data, 0, 1, "hyperbolic", family, n, cs, "mm", 1.0)
            worst["hyperbolic_mm"] = max(worst["hyperbolic_mm"], got - ref)

            # AM solvers search locally around 0, so the check is against the identity
            for kind, solve in (("givens", ama.solve_ama_givens), ("hyperbolic", ama.solve_ama_hyperbolic)):
                for mode in ("exact", "approximate"):
                    cs = solve(data, ra, rb, d, mode)
                    got = _rotated_cost(data, 0, 1, kind, family, n, cs, "am", d)
                    ref = _rotated_cost(data, 0, 1, kind, family, n, (1.0, 0.0), "am", d)
                    key = f"{kind}_am_vs_0"
                    worst[key] = max(worst[key], got - ref)
    tol = {"givens_mm": 1e-6, "hyperbolic_mm": 1e-3, "givens_am_vs_0": 1e-9, "hyperbolic_am_vs_0": 1e-9}
    ok = True
    for k, v in worst.items():
        status = "ok" if v <= tol[k] else "FAIL"
        ok &= status == "ok"
        print(f"{k:<20} worst excess cost {v: .3e} (tol {tol[k]:.0e}) {status}")
    return EXIT_OK if ok else EXIT_ALL_FAILED


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors, not "all trials failed"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qambss", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON experiment description")
        p.add_argument("--seed", type=int, help="base seed override")
        p.add_argument("--out", help="CSV output path override")
        p.add_argument("--trials", type=int, help="number of trials override")
        p.add_argument("--algo", help="comma-separated algorithm names")
        p.add_argument("--threads", type=int, default=1)

    sim = sub.add_parser("simulate", help="run one operating point and print a report")
    common(sim)
    sim.add_argument("--ntx", type=int, default=3)
    sim.add_argument("--nrx", type=int, default=5)
    sim.add_argument("--samples", type=int, default=300)
    sim.add_argument("--snr", type=float, default=30.0)
    sim.add_argument("--order", type=int, default=16)
    sim.add_argument("--sweeps", type=int, default=None)
    sim.add_argument("--mode", choices=("exact", "approximate"), default="approximate")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="run a full experiment from a config file")
    common(sw)
    sw.add_argument("--summary", help="optional JSON summary output path")
    sw.set_defaults(func=cmd_sweep)

    oc = sub.add_parser("oracle-check", help="compare solvers with brute-force grid oracles")
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--blocks", type=int, default=5)
    oc.add_argument("--samples", type=int, default=100)
    oc.add_argument("--grid-step", type=float, default=1e-4)
    oc.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if getattr(args, "threads", 1) < 1:
            raise ConfigError("--threads must be >= 1")
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
