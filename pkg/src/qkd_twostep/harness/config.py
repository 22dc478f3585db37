"""Experiment configuration and its flat ``key = value`` file format.

File format
-----------
One ``key = value`` pair per line.  Blank lines and lines starting with
``#`` are ignored.  Keys:

==============  =========  ==================================================
key             default    meaning
==============  =========  ==================================================
protocol        1          1, 2, 3, 3D, 1-noP3, 2-noP3, 3-noP3, 1-otpEC
auth            twostep    twostep, salt, nonce-a, nonce-b, fixed-secret,
                           fresh-secret, its
attack          none       ``none`` or a strategy name
n               4096       quantum signals per session
z_bits          12         public digest width
t_bits          16         tag width
w_max           3          collision-search radius in units
trials          100        sessions in the sweep
seed            0          master seed
loss            0.0        per-slot loss probability
flip            0.0        per-slot bit-flip probability
out             (empty)    JSON-lines output path, empty for none
csv             false      also write ``<out>.csv`` with the summary
timing          false      record wall time per trial (breaks byte equality)
workers         1          worker processes
==============  =========  ==================================================
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from ..adversary import STRATEGIES, AttackOptions, Strategy, get_strategy
from ..hashing import AuthScheme
from ..protocol import CLI_NAMES, SessionParams, Variant, get_variant
from ..quantum import ChannelParams

__all__ = [
    "AUTH_NAMES",
    "PROTOCOL_NAMES",
    "ConfigError",
    "ExperimentConfig",
    "build_scheme",
]

PROTOCOL_NAMES = tuple(CLI_NAMES)
AUTH_NAMES = ("twostep", "salt", "nonce-a", "nonce-b", "fixed-secret", "fresh-secret", "its")
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a sweep.

    Attributes are the keys of the file format (see module docstring).
    """

    protocol: str = "1"
    auth: str = "twostep"
    attack: str = "none"
    n: int = 4096
    z_bits: int = 12
    t_bits: int = 16
    w_max: int = 3
    trials: int = 100
    seed: int = 0
    loss: float = 0.0
    flip: float = 0.0
    out: str = ""
    csv: bool = False
    timing: bool = False
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        """Raise :class:`ConfigError` on the first invalid field."""
        if self.protocol not in CLI_NAMES:
            raise ConfigError(f"protocol must be one of {', '.join(PROTOCOL_NAMES)}")
        if self.auth not in AUTH_NAMES:
            raise ConfigError(f"auth must be one of {', '.join(AUTH_NAMES)}")
        if self.attack != "none":
            if self.attack not in STRATEGIES:
                raise ConfigError(f"unknown attack {self.attack!r}")
            if self.variant.name not in STRATEGIES[self.attack].variants:
                raise ConfigError(f"attack {self.attack} does not apply to protocol {self.protocol}")
        if self.n < 16:
            raise ConfigError("n must be at least 16")
        if not 1 <= self.z_bits <= 64:
            raise ConfigError("z_bits must lie in [1, 64]")
        if not 1 <= self.t_bits <= 64:
            raise ConfigError("t_bits must lie in [1, 64]")
        if self.w_max < 0:
            raise ConfigError("w_max must be non-negative")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        for name in ("loss", "flip"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.loss >= 1.0:
            raise ConfigError("loss must be below 1")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        try:
            self.scheme()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    # builders ---------------------------------------------------------
    @property
    def variant(self) -> Variant:
        return get_variant(self.protocol)

    def scheme(self) -> AuthScheme:
        return build_scheme(self.auth, self.z_bits, self.t_bits, self.n)

    def params(self) -> SessionParams:
        return SessionParams(n_slots=self.n, channel=ChannelParams(self.loss, self.flip))

    def strategy(self) -> Strategy | None:
        if self.attack == "none":
            return None
        return get_strategy(self.attack, AttackOptions(w_max=self.w_max))

    # file encoding ----------------------------------------------------
    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key = value")
            values[key.strip()] = value.strip()
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        """Build from strings or typed values; unknown keys are an error."""
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, types[key], raw)
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_text(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(key: str, kind: str, raw):
    if not isinstance(raw, str):
        return raw
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from None
    return raw


def build_scheme(auth: str, z_bits: int, t_bits: int, n_slots: int = 4096) -> AuthScheme:
    """Tag scheme for a command-line ``--auth`` name.

    The ITS scheme gets an AU2 width of ``max(32, t_bits + 16)`` and a
    message capacity comfortably above the longest sifting message.
    """
    if auth == "twostep":
        return AuthScheme.two_step(z_bits, t_bits)
    if auth == "salt":
        return AuthScheme.salted(z_bits, t_bits)
    if auth == "nonce-a":
        return AuthScheme.nonce(z_bits, t_bits, chooser="alice")
    if auth == "nonce-b":
        return AuthScheme.nonce(z_bits, t_bits, chooser="bob")
    if auth == "fixed-secret":
        return AuthScheme.fixed_secret(z_bits, t_bits)
    if auth == "fresh-secret":
        return AuthScheme.fresh_secret(z_bits, t_bits)
    if auth == "its":
        return AuthScheme.its_composed(t_bits, au2_bits=max(32, t_bits + 16),
                                       max_message_bits=max(1 << 16, 4 * n_slots + 4096),
                                       z_bits=z_bits)
    raise ConfigError(f"unknown auth scheme {auth!r}")
