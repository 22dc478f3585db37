"""Seeded Monte Carlo sweeps.

Trial ``i`` of a sweep with master seed ``s`` uses the seed

    ``int.from_bytes(sha256(f"{s}:{i}").digest()[:8], "big")``

so any single trial can be rerun on its own, and records do not depend
on how trials are spread over workers.  Records are sorted by index
before they are written.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from ..protocol import run_protocol
from ..protocol.session import ONE_SIDED, SEPARATE, THREE_WAY
from .config import ConfigError, ExperimentConfig

__all__ = [
    "SCHEMA_VERSION",
    "SUCCESS_RELATIONS",
    "SweepResult",
    "aggregate",
    "run_sweep",
    "run_trial",
    "summary_matches",
    "trial_seed",
    "wilson_interval",
    "write_outputs",
]

SCHEMA_VERSION = 1
SUCCESS_RELATIONS = (THREE_WAY, SEPARATE, ONE_SIDED)


def trial_seed(master_seed: int, index: int) -> int:
    """Seed of trial ``index``: the first 8 bytes of a SHA-256, big-endian."""
    digest = hashlib.sha256(f"{master_seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval; ``(0.0, 1.0)`` for zero trials."""
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence,
                                                    method="wilson")
    return float(ci.low), float(ci.high)


def _forge_stats(forges: list) -> dict:
    weights = [f["weight"] for f in forges if f.get("found")]
    return {
        "attempted": len(forges),
        "found": len(weights),
        "candidates": int(sum(f.get("candidates", 0) for f in forges)),
        "max_weight": max(weights) if weights else None,
    }


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def run_trial(config: ExperimentConfig, index: int) -> dict:
    """One session of the sweep as a JSON-ready record."""
    seed = trial_seed(config.seed, index)
    start = time.perf_counter()
    strategy = config.strategy()
    outcome = run_protocol(config.variant, config.scheme(), config.params(),
                           adversary=strategy, rng=np.random.default_rng(seed))
    elapsed = time.perf_counter() - start
    summary = outcome.summary()
    forges = summary.pop("forges")
    if strategy is None:
        success = outcome.keys_agree
        expected = None
    else:
        success = outcome.abort_by is None and outcome.final_relation in SUCCESS_RELATIONS
        expected = strategy.expected.get(outcome.variant)
    record = {
        "type": "trial",
        "index": index,
        "seed": seed,
        "success": bool(success),
        "outcome": summary,
        "forge": _forge_stats(forges),
        "expected_case": None if expected is None else expected[0],
        "expected_relation": None if expected is None else expected[1],
        "matches_expected": None if expected is None else (
            outcome.correlation_case == expected[0] and outcome.final_relation == expected[1]),
    }
    if outcome.eve is not None:
        record["eve"] = {k: v for k, v in outcome.eve.extras.items()
                         if isinstance(v, (int, float, str, bool))}
    if config.timing:
        record["wall_time"] = elapsed
    return _jsonable(record)


def _mean(values) -> float | None:
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def aggregate(records: list[dict]) -> dict:
    """Summary statistics computed from trial records alone."""
    n = len(records)
    wins = sum(1 for r in records if r["success"])
    aborts = sum(1 for r in records if r["outcome"]["abort_by"] is not None)
    matched = [r["matches_expected"] for r in records if r["matches_expected"] is not None]
    cases: dict[str, int] = {}
    relations: dict[str, int] = {}
    for r in records:
        cases[str(r["outcome"]["correlation_case"])] = cases.get(
            str(r["outcome"]["correlation_case"]), 0) + 1
        relations[str(r["outcome"]["final_relation"])] = relations.get(
            str(r["outcome"]["final_relation"]), 0) + 1
    lo, hi = wilson_interval(wins, n)
    return {
        "type": "summary",
        "schema_version": SCHEMA_VERSION,
        "trials": n,
        "degenerate": n == 0,
        "successes": wins,
        "success_rate": wins / n if n else None,
        "wilson_interval": [lo, hi],
        "aborts": aborts,
        "mean_qber": _mean(r["outcome"]["qber_observed"] for r in records),
        "mean_raw_disagreement": _mean(r["outcome"]["raw_ab_disagreement"] for r in records),
        "mean_key_bits": _mean(r["outcome"]["key_len"] for r in records),
        "expected_match_rate": sum(matched) / len(matched) if matched else None,
        "correlation_cases": dict(sorted(cases.items())),
        "final_relations": dict(sorted(relations.items())),
    }


def summary_matches(records: list[dict], summary: dict) -> bool:
    """Re-aggregation check: ``summary`` is exactly what ``records`` imply."""
    fresh = aggregate(records)
    return all(summary.get(k) == v for k, v in fresh.items())


@dataclass
class SweepResult:
    config: ExperimentConfig
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        """JSON lines: a header, one line per trial, the summary."""
        header = {"type": "config", "schema_version": SCHEMA_VERSION,
                  "config": self.config.as_dict()}
        rows = [header, *self.records, self.summary]
        return [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in rows]

    def to_jsonl(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _trial_job(args):
    config, index = args
    return run_trial(config, index)


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Validate ``config``, run every trial and aggregate.

    Raises
    ------
    ConfigError
        If the configuration is invalid; nothing runs in that case.
    """
    config.validate()
    jobs = [(config, i) for i in range(config.trials)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            records = list(pool.map(_trial_job, jobs, chunksize=4))
    else:
        records = [_trial_job(j) for j in jobs]
    records.sort(key=lambda r: r["index"])
    summary = aggregate(records)
    if not summary_matches(records, summary):
        raise RuntimeError("summary does not re-aggregate from the records")
    return SweepResult(config, records, summary)


def write_outputs(result: SweepResult, out: str | Path | None = None) -> list[Path]:
    """Write the JSON-lines file and, if configured, a CSV summary.

    Raises
    ------
    ConfigError
        If the output cannot be written.
    """
    out = out or result.config.out
    if not out:
        return []
    path = Path(out)
    written = []
    try:
        path.write_text(result.to_jsonl())
        written.append(path)
        if result.config.csv:
            csv_path = path.with_suffix(path.suffix + ".csv")
            flat = {k: v for k, v in result.summary.items() if not isinstance(v, (dict, list))}
            flat["wilson_low"], flat["wilson_high"] = result.summary["wilson_interval"]
            with csv_path.open("w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=list(flat))
                writer.writeheader()
                writer.writerow(flat)
            written.append(csv_path)
    except OSError as exc:
        raise ConfigError(f"cannot write output: {exc}") from None
    return written
