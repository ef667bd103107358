"""Run configuration: key=value config files plus CLI flag overrides.

A config file holds one ``key = value`` pair per line (``#`` starts a
comment).  Keys match :class:`RunConfig` field names; flags given on the
command line win over file values, which win over the defaults below.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .statespace import ModelParams
from .synth import REGIME_PIECEWISE, REGIMES

RICCATI_MODES = ("include", "omit")


@dataclass
class RunConfig:
    """Everything a command run needs, in one reproducible bundle."""

    # model
    d: int = 5
    alpha: float = 1.0
    t_step: float = 1.0
    q: float = 1e-3
    r: float = 1e-2
    p0: float = 1.0
    riccati_q: str = "include"
    zero_as_measurement: bool = False
    # profile windowing; window=None derives the duration from the event span
    window: float | None = None
    num_windows: int = 35
    credit_low: float = 0.25
    credit_high: float = 0.75
    normalize: bool = True
    # recommendation / evaluation
    tau: float = 0.05
    eval_threshold: float = 0.15
    # synthesis
    regime: str = REGIME_PIECEWISE
    steps: int | None = None
    users: int = 1
    events_per_window: int = 1000
    # io
    events: str | None = None
    vocab: str | None = None
    out: str = "out"
    seed: int = 0
    figures: bool = True
    top_genres: int = 4

    def __post_init__(self):
        if self.riccati_q not in RICCATI_MODES:
            raise ValueError(
                f"riccati_q must be one of {RICCATI_MODES}, got {self.riccati_q!r}"
            )
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.num_windows < 1:
            raise ValueError("num_windows must be >= 1")
        if self.window is not None and self.window <= 0:
            raise ValueError("window must be > 0")
        if self.users < 1:
            raise ValueError("users must be >= 1")

    def model_params(self, d: int | None = None) -> ModelParams:
        """Model parameters for dimension ``d`` (default: the configured d)."""
        return ModelParams(
            d=self.d if d is None else d,
            alpha=self.alpha,
            t_step=self.t_step,
            q=self.q,
            r=self.r,
            p0=self.p0,
            include_process_noise_in_riccati=(self.riccati_q == "include"),
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(RunConfig)}


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _coerce(name: str, raw: str):
    hints = {f.name: f.type for f in fields(RunConfig)}
    if name not in hints:
        raise ValueError(f"unknown config key: {name!r}")
    hint = hints[name]
    raw = raw.strip()
    if raw.lower() in ("none", ""):
        return None
    if hint in ("bool",):
        return _parse_bool(raw)
    if hint in ("int", "int | None"):
        return int(raw)
    if hint in ("float", "float | None"):
        return float(raw)
    return raw


def read_config_file(path) -> dict:
    """Parse a key=value config file into typed RunConfig overrides."""
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return values


def build_config(config_path=None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, an optional config file and explicit overrides."""
    values: dict = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return RunConfig(**values)
