"""Seeded Monte-Carlo experiments over SNR, sample size and algorithm.

Every trial draws one channel, one source block and one unit noise
realization from a seed derived from ``(base_seed, trial)``. All algorithms
and all operating points of that trial reuse those draws, so comparisons
between algorithms are paired and curves over SNR use common random
numbers.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .metrics import compute_sinr, demap_and_ser, resolve_ambiguity
from .separation import AlgorithmConfig, separate
from .signal_model import (
    DEFAULT_CONDITION_BOUND,
    SUPPORTED_ORDERS,
    build_constellation,
    draw_channel,
    draw_sources,
    noise_variance,
)

RECORD_FIELDS = (
    "trial_index",
    "seed",
    "algorithm",
    "snr_db",
    "n_samples",
    "sinr_db",
    "ser",
    "sweeps_used",
    "cost_trajectory",
    "wall_time",
    "error",
)


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configurations."""


def _as_list(value, name: str, cast) -> list:
    items = list(value) if isinstance(value, (list, tuple)) else [value]
    try:
        items = [cast(v) for v in items]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None
    if not items:
        raise ConfigError(f"{name} must not be empty")
    if any(b <= a for a, b in zip(items, items[1:])):
        raise ConfigError(f"{name} must be strictly increasing")
    return items


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte-Carlo experiment description.

    ``n_samples`` and ``snr_db`` accept a scalar or a strictly increasing
    list; ``snr_db = inf`` means noiseless. ``record_timing`` adds wall
    times to the output, which then stops being byte-reproducible.
    """

    n_tx: int
    n_rx: int
    n_samples: Sequence[int]
    snr_db: Sequence[float]
    constellation_order: int
    algorithms: Sequence[AlgorithmConfig]
    n_trials: int = 1
    base_seed: int = 0
    condition_bound: float = DEFAULT_CONDITION_BOUND
    output_path: str | None = None
    record_timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_samples", tuple(_as_list(self.n_samples, "n_samples", int)))
        object.__setattr__(self, "snr_db", tuple(_as_list(self.snr_db, "snr_db", float)))
        if not self.n_rx >= self.n_tx >= 1:
            raise ConfigError("need n_rx >= n_tx >= 1")
        if self.n_trials < 1:
            raise ConfigError("n_trials must be >= 1")
        if self.constellation_order not in SUPPORTED_ORDERS:
            raise ConfigError(f"constellation_order must be one of {SUPPORTED_ORDERS}")
        if min(self.n_samples) < self.n_tx:
            raise ConfigError("n_samples must be at least n_tx")
        if not self.condition_bound > 1:
            raise ConfigError("condition_bound must exceed 1")
        algos = tuple(self.algorithms)
        if not algos:
            raise ConfigError("algorithms must not be empty")
        names = [a.name for a in algos]
        if len(set(names)) != len(names):
            raise ConfigError(f"algorithm labels must be unique, got {names}")
        object.__setattr__(self, "algorithms", algos)

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(raw)
        try:
            data["algorithms"] = [_algorithm_from(a) for a in data.get("algorithms", [])]
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(raw)

    def to_dict(self) -> dict[str, Any]:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["n_samples"] = list(self.n_samples)
        out["snr_db"] = list(self.snr_db)
        out["algorithms"] = [asdict(a) for a in self.algorithms]
        return out

    def with_overrides(self, **changes) -> "ExperimentConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update({k: v for k, v in changes.items() if v is not None})
        return ExperimentConfig(**data)


def _algorithm_from(entry) -> AlgorithmConfig:
    if isinstance(entry, AlgorithmConfig):
        return entry
    if isinstance(entry, str):
        return AlgorithmConfig(algorithm=entry)
    if isinstance(entry, dict):
        return AlgorithmConfig(**entry)
    raise ConfigError(f"cannot interpret algorithm entry {entry!r}")


@dataclass
class TrialRecord:
    trial_index: int
    seed: int
    algorithm: str
    snr_db: float
    n_samples: int
    sinr_db: float = float("nan")
    ser: float = float("nan")
    sweeps_used: int = 0
    cost_trajectory: list[float] = field(default_factory=list)
    wall_time: float = 0.0
    error: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.error)


def trial_seed(base_seed: int, trial: int) -> int:
    """Deterministic 63-bit seed of one trial."""
    state = np.random.SeedSequence([base_seed, trial]).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def _run_trial(cfg: ExperimentConfig, trial: int) -> list[TrialRecord]:
    seed = trial_seed(cfg.base_seed, trial)
    spec = build_constellation(cfg.constellation_order)
    channel_seed, source_seed, noise_seed = np.random.SeedSequence(seed).spawn(3)
    records: list[TrialRecord] = []

    def failed_all(snr, n_s, exc) -> None:
        for algo in cfg.algorithms:
            records.append(TrialRecord(trial, seed, algo.name, snr, n_s, error=_describe(exc)))

    try:
        channel = draw_channel(cfg.n_rx, cfg.n_tx, cfg.condition_bound, rng_seed=channel_seed)
    except Exception as exc:  # noqa: BLE001 - recorded, never raised
        for n_s in cfg.n_samples:
            for snr in cfg.snr_db:
                failed_all(snr, n_s, exc)
        return records

    for n_s in cfg.n_samples:
        sources = draw_sources(spec, cfg.n_tx, n_s, source_seed)
        clean = channel.mixing @ sources
        rng = np.random.default_rng(noise_seed)
        unit_noise = rng.standard_normal(clean.shape) + 1j * rng.standard_normal(clean.shape)
        for snr in cfg.snr_db:
            var = noise_variance(channel, sources, snr)
            received = clean + unit_noise * np.sqrt(var / 2.0) if var > 0 else clean
            noise_cov = var * np.eye(cfg.n_rx)
            for algo in cfg.algorithms:
                rec = TrialRecord(trial, seed, algo.name, snr, n_s)
                try:
                    t0 = time.perf_counter()
                    report = separate(received, cfg.n_tx, spec, algo)
                    rec.wall_time = time.perf_counter() - t0
                    system = resolve_ambiguity(report.combined_w, channel.mixing)
                    rec.sinr_db = compute_sinr(system, report.combined_w, sources, noise_cov)
                    rec.ser = demap_and_ser(report.separated, sources, system, spec)
                    rec.sweeps_used = len(report.cost_per_sweep)
                    rec.cost_trajectory = [float(c) for c in report.cost_per_sweep]
                    if not np.isfinite(rec.sinr_db):
                        raise FloatingPointError("non-finite SINR")
                except Exception as exc:  # noqa: BLE001 - recorded, never raised
                    rec = TrialRecord(trial, seed, algo.name, snr, n_s, error=_describe(exc))
                records.append(rec)
    return records


def _describe(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}".replace("\n", " ")


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[TrialRecord]:
    """Run every (snr, n_samples, algorithm, trial) combination.

    Trials are spread over ``threads`` workers; the returned list is sorted
    by ``(snr, n_samples, algorithm, trial)`` regardless of scheduling.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1:
        batches = [_run_trial(cfg, t) for t in range(cfg.n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(lambda t: _run_trial(cfg, t), range(cfg.n_trials)))
    algo_rank = {a.name: i for i, a in enumerate(cfg.algorithms)}
    snr_rank = {s: i for i, s in enumerate(cfg.snr_db)}
    ns_rank = {n: i for i, n in enumerate(cfg.n_samples)}
    records = [r for batch in batches for r in batch]
    records.sort(key=lambda r: (snr_rank[r.snr_db], ns_rank[r.n_samples], algo_rank[r.algorithm], r.trial_index))
    return records


def _fmt(x: float) -> str:
    return "" if x is None or (isinstance(x, float) and np.isnan(x)) else repr(float(x))


def records_to_csv(records: Iterable[TrialRecord], include_timing: bool = False) -> str:
    """Serialize records as comma-separated text with a header line.

    ``cost_trajectory`` is ``;``-joined. ``wall_time`` is left empty unless
    ``include_timing`` is set, keeping the output reproducible.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for r in records:
        writer.writerow(
            [
                r.trial_index,
                r.seed,
                r.algorithm,
                _fmt(r.snr_db),
                r.n_samples,
                _fmt(r.sinr_db),
                _fmt(r.ser),
                r.sweeps_used,
                ";".join(repr(c) for c in r.cost_trajectory),
                _fmt(r.wall_time) if include_timing else "",
                r.error,
            ]
        )
    return buf.getvalue()


def write_records(records: Sequence[TrialRecord], path: str | Path, include_timing: bool = False) -> None:
    Path(path).write_text(records_to_csv(records, include_timing))


def read_records(path: str | Path) -> list[TrialRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                TrialRecord(
                    trial_index=int(row["trial_index"]),
                    seed=int(row["seed"]),
                    algorithm=row["algorithm"],
                    snr_db=float(row["snr_db"]),
                    n_samples=int(row["n_samples"]),
                    sinr_db=float(row["sinr_db"]) if row["sinr_db"] else float("nan"),
                    ser=float(row["ser"]) if row["ser"] else float("nan"),
                    sweeps_used=int(row["sweeps_used"]),
                    cost_trajectory=[float(c) for c in row["cost_trajectory"].split(";") if c],
                    wall_time=float(row["wall_time"]) if row["wall_time"] else 0.0,
                    error=row["error"],
                )
            )
    return out


@dataclass(frozen=True)
class SummaryRow:
    """Aggregate of one operating point; means are ``nan`` when ``available`` is false."""

    algorithm: str
    snr_db: float
    n_samples: int
    n_ok: int
    n_failed: int
    mean_sinr_db: float
    mean_ser: float

    @property
    def available(self) -> bool:
        return self.n_ok > 0


def summarize(records: Sequence[TrialRecord]) -> list[SummaryRow]:
    """Mean SINR (in dB) and SER per ``(algorithm, snr, n_samples)``, skipping failed trials."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.algorithm, r.snr_db, r.n_samples), []).append(r)
    rows = []
    for (algo, snr, n_s), recs in groups.items():
        ok = [r for r in recs if not r.failed]
        rows.append(
            SummaryRow(
                algorithm=algo,
                snr_db=snr,
                n_samples=n_s,
                n_ok=len(ok),
                n_failed=len(recs) - len(ok),
                mean_sinr_db=float(np.mean([r.sinr_db for r in ok])) if ok else float("nan"),
                mean_ser=float(np.mean([r.ser for r in ok])) if ok else float("nan"),
            )
        )
    return rows


def summary_to_json(rows: Sequence[SummaryRow]) -> str:
    def clean(x):
        return None if isinstance(x, float) and np.isnan(x) else x

    payload = [{k: clean(v) for k, v in {**asdict(r), "available": r.available}.items()} for r in rows]
    return json.dumps(payload, indent=2) + "\n"


def format_summary(rows: Sequence[SummaryRow]) -> str:
    lines = [f"{'algorithm':<14}{'snr_db':>8}{'n_s':>7}{'ok':>6}{'fail':>6}{'sinr_db':>10}{'ser':>10}"]
    for r in rows:
        sinr = f"{r.mean_sinr_db:10.2f}" if r.available else f"{'n/a':>10}"
        ser = f"{r.mean_ser:10.4f}" if r.available else f"{'n/a':>10}"
        lines.append(f"{r.algorithm:<14}{r.snr_db:>8g}{r.n_samples:>7d}{r.n_ok:>6d}{r.n_failed:>6d}{sinr}{ser}")
    return "\n".join(lines)
