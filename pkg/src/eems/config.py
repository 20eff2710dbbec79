"""Model/training configuration: schema, validation, and the plain-text file format.

The config file is flat ``key = value`` lines. Keys are exactly the
field names below; unknown keys are hard errors. Lists are comma separated,
the ablation flag set may be empty.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import ConfigError

ABLATION_FLAGS = {
    "no_gate",
    "no_msff",
    "no_pgfi",
    "no_mcafa",
    "no_ffce",
    "no_defr",
    "eaeu_only",
    "mspgu_only",
}


@dataclass
class ModelConfig:
    """Full hyperparameter record. Defaults are the reference training profile."""

    stages: int = 4
    base_channels: int = 32
    pool_scales: list = field(default_factory=lambda: [2, 4])
    dilations: list = field(default_factory=lambda: [2, 3, 4])
    lambda_start: float = 0.7
    lambda_end: float = 0.3
    lambda_decay_epochs: int = 100
    lr: float = 0.001
    t_max: int = 50
    eta_min: float = 1e-5
    epochs: int = 200
    batch_size: int = 8
    phase1_size: int = 128
    phase2_size: int = 256
    seed: int = 0
    ablation_flags: set = field(default_factory=set)


@dataclass(frozen=True)
class ValidatedConfig:
    """Normalized, immutable config. Safe to share across threads."""

    stages: int
    base_channels: int
    pool_scales: tuple
    dilations: tuple
    lambda_start: float
    lambda_end: float
    lambda_decay_epochs: int
    lr: float
    t_max: int
    eta_min: float
    epochs: int
    batch_size: int
    phase1_size: int
    phase2_size: int
    seed: int
    ablation_flags: frozenset


_FIELD_ORDER = [f.name for f in dataclasses.fields(ModelConfig)]
_INT_FIELDS = {
    "stages", "base_channels", "lambda_decay_epochs", "t_max",
    "epochs", "batch_size", "phase1_size", "phase2_size", "seed",
}
_FLOAT_FIELDS = {"lambda_start", "lambda_end", "lr", "eta_min"}
_LIST_FIELDS = {"pool_scales", "dilations"}


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate_config(cfg) -> ValidatedConfig:
    """Normalize ``cfg`` or raise a ConfigError listing every violated invariant.

    Idempotent: a ValidatedConfig is returned unchanged.
    """
    if isinstance(cfg, ValidatedConfig):
        return cfg

    problems = []
    if cfg.stages < 1:
        problems.append("stages must be >= 1")
    if cfg.base_channels < 2 or cfg.base_channels % 2 != 0:
        problems.append("base_channels must be a positive even integer")
    if not cfg.pool_scales:
        problems.append("pool_scales nonempty")
    for s in cfg.pool_scales:
        if s < 2 or not _is_power_of_two(s):
            problems.append(f"pool_scales entry {s} must be a power of two >= 2")
    if not cfg.dilations:
        problems.append("dilations nonempty")
    else:
        if any(b <= a for a, b in zip(cfg.dilations, cfg.dilations[1:])):
            problems.append("dilations must be strictly increasing")
        if any(d < 1 for d in cfg.dilations):
            problems.append("dilations must be >= 1")
    if not (0.0 < cfg.lambda_end):
        problems.append("lambda_end must be > 0")
    if cfg.lambda_end > cfg.lambda_start:
        problems.append("lambda_end > lambda_start")
    if not (cfg.lambda_start < 1.0):
        problems.append("lambda_start must be < 1")
    if cfg.lambda_decay_epochs < 1:
        problems.append("lambda_decay_epochs must be >= 1")
    if not (cfg.eta_min < cfg.lr):
        problems.append("eta_min must be < lr")
    if cfg.lr <= 0:
        problems.append("lr must be > 0")
    if cfg.eta_min < 0:
        problems.append("eta_min must be >= 0")
    if cfg.t_max < 1:
        problems.append("t_max must be >= 1")
    if cfg.epochs < 1:
        problems.append("epochs must be >= 1")
    if cfg.batch_size < 1:
        problems.append("batch_size must be >= 1")
    if cfg.phase1_size < 1 or cfg.phase2_size < 1:
        problems.append("phase sizes must be >= 1")
    unknown = set(cfg.ablation_flags) - ABLATION_FLAGS
    if unknown:
        problems.append(f"unknown ablation flags: {sorted(unknown)}")
    if "eaeu_only" in cfg.ablation_flags and "mspgu_only" in cfg.ablation_flags:
        problems.append("eaeu_only and mspgu_only are mutually exclusive")

    if problems:
        raise ConfigError(problems)

    return ValidatedConfig(
        stages=int(cfg.stages),
        base_channels=int(cfg.base_channels),
        pool_scales=tuple(int(s) for s in cfg.pool_scales),
        dilations=tuple(int(d) for d in cfg.dilations),
        lambda_start=float(cfg.lambda_start),
        lambda_end=float(cfg.lambda_end),
        lambda_decay_epochs=int(cfg.lambda_decay_epochs),
        lr=float(cfg.lr),
        t_max=int(cfg.t_max),
        eta_min=float(cfg.eta_min),
        epochs=int(cfg.epochs),
        batch_size=int(cfg.batch_size),
        phase1_size=int(cfg.phase1_size),
        phase2_size=int(cfg.phase2_size),
        seed=int(cfg.seed),
        ablation_flags=frozenset(cfg.ablation_flags),
    )


def desk_config(**overrides) -> ModelConfig:
    """CPU-friendly profile: small widths, 64px images, short schedule."""
    cfg = ModelConfig(
        base_channels=16,
        epochs=20,
        phase1_size=64,
        phase2_size=64,
    )
    for k, v in overrides.items():
        if not hasattr(cfg, k):
            raise ConfigError(f"unknown config key: {k}")
        setattr(cfg, k, v)
    return cfg


def config_to_text(cfg) -> str:
    """Serialize to the flat key = value format (all keys, fixed order)."""
    lines = []
    for name in _FIELD_ORDER:
        v = getattr(cfg, name)
        if name in _LIST_FIELDS:
            txt = ", ".join(str(int(x)) for x in v)
        elif name == "ablation_flags":
            txt = ", ".join(sorted(v))
        elif name in _FLOAT_FIELDS:
            txt = repr(float(v))
        else:
            txt = str(int(v))
        lines.append(f"{name} = {txt}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> ModelConfig:
    """Parse the flat format. Unknown keys and malformed lines are hard errors.

    Missing keys fall back to ModelConfig defaults.
    """
    cfg = ModelConfig()
    problems = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FIELD_ORDER:
            problems.append(f"line {lineno}: unknown key: {key}")
            continue
        if key in seen:
            problems.append(f"line {lineno}: duplicate key: {key}")
            continue
        seen.add(key)
        try:
            setattr(cfg, key, _parse_value(key, value))
        except ValueError as exc:
            problems.append(f"line {lineno}: {key}: {exc}")
    if problems:
        raise ConfigError(problems)
    return cfg


def _parse_value(key: str, value: str):
    if key in _LIST_FIELDS:
        if not value:
            return []
        return [int(tok.strip()) for tok in value.split(",")]
    if key == "ablation_flags":
        if not value:
            return set()
        return {tok.strip() for tok in value.split(",") if tok.strip()}
    if key in _FLOAT_FIELDS:
        return float(value)
    if key in _INT_FIELDS:
        return int(value)
    raise ValueError(f"unhandled key {key}")


def load_config(path) -> ModelConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_text(fh.read())


def save_config(cfg, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config_to_text(cfg))


def apply_overrides(cfg: ModelConfig, pairs) -> ModelConfig:
    """Apply ``key=value`` override strings in place; unknown keys raise ConfigError."""
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        key = key.strip()
        if key not in _FIELD_ORDER:
            raise ConfigError(f"unknown config key: {key}")
        try:
            setattr(cfg, key, _parse_value(key, value.strip()))
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from exc
    return cfg


def config_keys_help() -> str:
    """One line per config key with its default, for CLI --help output."""
    defaults = ModelConfig()
    lines = ["config keys (and defaults):"]
    for name in _FIELD_ORDER:
        v = getattr(defaults, name)
        if name in _LIST_FIELDS:
            shown = ",".join(str(x) for x in v)
        elif name == "ablation_flags":
            shown = "(empty; any of " + ",".join(sorted(ABLATION_FLAGS)) + ")"
        else:
            shown = str(v)
        lines.append(f"  {name} = {shown}")
    return "\n".join(lines)
