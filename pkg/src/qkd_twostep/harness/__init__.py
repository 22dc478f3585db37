"""Sweeps, calculators, verifiers and the command line."""

from .calculators import (
    bound_calc,
    key_consumption_table,
    lemma1_monte_carlo,
    lemma2_monte_carlo,
    subsequence_brute_force,
    tag_guess_trials,
    verify_cmd,
)
from .config import ConfigError, ExperimentConfig, build_scheme
from .sweep import (
    SweepResult,
    aggregate,
    run_sweep,
    run_trial,
    summary_matches,
    trial_seed,
    wilson_interval,
    write_outputs,
)

__all__ = [
    "ConfigError", "ExperimentConfig", "SweepResult", "aggregate", "bound_calc",
    "build_scheme", "key_consumption_table", "lemma1_monte_carlo", "lemma2_monte_carlo",
    "run_sweep", "run_trial", "subsequence_brute_force", "summary_matches",
    "tag_guess_trials", "trial_seed", "verify_cmd", "wilson_interval", "write_outputs",
]
