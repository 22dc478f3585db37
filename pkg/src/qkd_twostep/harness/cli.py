"""Command line: ``run``, ``bound``, ``verify`` and ``attack-trace``.

Examples
--------
::

    qkd-twostep run --protocol 1 --attack p1-interleave-qm --n 4096 --trials 200 --out p1.jsonl
    qkd-twostep bound key-consumption --z-bits 256 --t-bits 64
    qkd-twostep verify composed --m 4 --z 2 --t 2
    qkd-twostep attack-trace --protocol 3 --attack p3-intercept-resend --seed 7

Exit status is 0 on completion, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..adversary import STRATEGIES
from ..hashing import EnumerationGuardError
from ..protocol import run_protocol
from .calculators import BOUND_KINDS, VERIFY_SELECTORS, bound_calc, to_json, verify_cmd
from .config import AUTH_NAMES, PROTOCOL_NAMES, ConfigError, ExperimentConfig
from .sweep import run_sweep, trial_seed, write_outputs

__all__ = ["build_parser", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2

# flag -> config key
_CONFIG_FLAGS = {
    "protocol": "protocol", "auth": "auth", "attack": "attack", "n": "n",
    "z_bits": "z_bits", "t_bits": "t_bits", "w_max": "w_max", "trials": "trials",
    "seed": "seed", "loss": "loss", "flip": "flip", "out": "out", "workers": "workers",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    # Defaults are None so that only explicit flags override a config file.
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--protocol", choices=PROTOCOL_NAMES)
    p.add_argument("--auth", choices=AUTH_NAMES)
    p.add_argument("--attack", choices=("none", *sorted(STRATEGIES)))
    p.add_argument("--n", type=int, help="quantum signals per session")
    p.add_argument("--z-bits", type=int)
    p.add_argument("--t-bits", type=int)
    p.add_argument("--w-max", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--loss", type=float)
    p.add_argument("--flip", type=float)
    p.add_argument("--out")
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkd-twostep",
        description="Attack laboratory for QKD post-processing with two-step authentication.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="seeded Monte Carlo sweep")
    _add_config_flags(run)
    run.add_argument("--csv", action="store_true", help="also write <out>.csv")
    run.add_argument("--timing", action="store_true", help="record wall time per trial")

    bound = sub.add_parser("bound", help="bound and key-length calculators")
    bound.add_argument("kind", choices=BOUND_KINDS)
    bound.add_argument("--ell", type=int, default=None, help="message length (lemma1)")
    bound.add_argument("--w-max", type=int, default=None, help="ball radius (lemma1)")
    bound.add_argument("--z-bits", type=int, default=None)
    bound.add_argument("--t-bits", type=int, default=None)
    bound.add_argument("--n", type=int, default=None, help="raw key length (lemma2)")
    bound.add_argument("--k", type=int, default=None, help="error budget (lemma2)")
    bound.add_argument("--n-max", type=int, default=None, help="largest n (subseq-exact)")
    bound.add_argument("--message-bits", type=int, default=None, help="message length (eq9)")
    bound.add_argument("--trials", type=int, default=0, help="Monte Carlo trials, 0 for none")
    bound.add_argument("--seed", type=int, default=0)
    bound.add_argument("--out")

    verify = sub.add_parser("verify", help="exhaustive hash-family verifiers")
    verify.add_argument("family", choices=VERIFY_SELECTORS)
    verify.add_argument("--m", type=int, default=4, help="|M|")
    verify.add_argument("--z", type=int, default=2, help="|Z|")
    verify.add_argument("--t", type=int, default=2, help="|T|")
    verify.add_argument("--epsilon", help="claimed constant, e.g. 1/2")
    verify.add_argument("--out")

    trace = sub.add_parser("attack-trace", help="one verbose run with its event log")
    _add_config_flags(trace)
    return parser


def _config_from(args) -> ExperimentConfig:
    base = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    changes = {key: getattr(args, flag) for flag, key in _CONFIG_FLAGS.items()
               if getattr(args, flag, None) is not None}
    for flag in ("csv", "timing"):
        if getattr(args, flag, False):
            changes[flag] = True
    return base.replace(**changes).validate()


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        try:
            Path(out).write_text(text + "\n")
        except OSError as exc:
            raise ConfigError(f"cannot write output: {exc}") from None
    print(text)


def _cmd_run(args) -> int:
    config = _config_from(args)
    result = run_sweep(config)
    write_outputs(result)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_bound(args) -> int:
    names = {"ell": "ell", "w_max": "w", "z_bits": "z_bits", "t_bits": "t_bits", "n": "n",
             "k": "k", "n_max": "n_max", "message_bits": "message_bits"}
    params = {key: getattr(args, flag) for flag, key in names.items()
              if getattr(args, flag) is not None}
    params.update(trials=args.trials, seed=args.seed)
    try:
        report = bound_calc(args.kind, **params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(to_json(report), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    try:
        eps = Fraction(args.epsilon) if args.epsilon else None
        report = verify_cmd(args.family, args.m, args.z, args.t, eps)
    except (ValueError, ZeroDivisionError, EnumerationGuardError) as exc:
        raise ConfigError(str(exc)) from None
    _emit(report, args.out)
    return EXIT_OK


def _cmd_trace(args) -> int:
    config = _config_from(args)
    seed = trial_seed(config.seed, 0)
    outcome = run_protocol(config.variant, config.scheme(), config.params(),
                           adversary=config.strategy(), rng=np.random.default_rng(seed))
    summary = outcome.summary()
    payload = {
        "config": config.as_dict(),
        "seed": seed,
        "events": [e.as_dict() for e in outcome.events],
        "outcome": summary,
        "relations": list(outcome.relations) if outcome.relations else None,
    }
    _emit(_plain(payload), config.out or None)
    return EXIT_OK


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


_COMMANDS = {"run": _cmd_run, "bound": _cmd_bound, "verify": _cmd_verify,
             "attack-trace": _cmd_trace}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
