"""Scenario configuration shared by the CLI and the experiment scripts.

A scenario is stored as a flat JSON object, e.g. the worked example::

    {"mode": "weighted-sum", "a1": 2, "a2": 1, "gamma1r": 24, "gamma2r": 96,
     "sigma2": 1, "pt_db": 0}

Exactly one channel form is allowed: explicit effective gains
(``gamma1r``, ``gamma2r``, the single-hop SNRs at the configured budget) or a
Rayleigh fading model (``nr``, ``var1``, ``var2``).  ``pt`` is in watts,
``pt_db`` is ``10 log10(pt / 1 W)``; give at most one of them.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

from .oracle import POLICIES, FadingModel, draw_channel
from .relay import PRELOG, ChannelState

MODES = ("common-rate", "weighted-sum", "framework")
DEFAULT_PT_DB_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


class ConfigError(ValueError):
    """Invalid scenario; ``errors`` maps field names to messages."""

    def __init__(self, errors: dict[str, str]):
        self.errors = dict(errors)
        super().__init__("; ".join(f"{k}: {v}" for k, v in self.errors.items()))


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass
class ScenarioConfig:
    mode: str = "weighted-sum"
    a1: float = 2.0
    a2: float = 1.0
    gamma1r: float | None = None
    gamma2r: float | None = None
    nr: int | None = None
    var1: float | None = None
    var2: float | None = None
    sigma2: float = 1.0
    pt: float | None = None
    pt_db: float | None = None
    pt_db_grid: list[float] = field(default_factory=lambda: list(DEFAULT_PT_DB_GRID))
    step: float = 0.001
    trials: int = 2000
    seed: int = 0
    prelog: float = PRELOG
    policies: list[str] = field(default_factory=lambda: list(POLICIES))

    @property
    def explicit_channel(self) -> bool:
        return self.gamma1r is not None or self.gamma2r is not None

    @property
    def total_power(self) -> float:
        if self.pt_db is not None:
            return db_to_linear(self.pt_db)
        return 1.0 if self.pt is None else float(self.pt)

    @property
    def weights(self) -> tuple[float, float] | None:
        return (self.a1, self.a2) if self.mode != "common-rate" else None

    def validate(self) -> "ScenarioConfig":
        errors = {}
        if self.mode not in MODES:
            errors["mode"] = f"must be one of {', '.join(MODES)}"
        for name in ("a1", "a2", "sigma2", "step", "prelog"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                errors[name] = f"must be a positive number, got {value!r}"
        if "step" not in errors and self.step > 1:
            errors["step"] = "must not exceed 1"

        fading = [self.nr, self.var1, self.var2]
        has_fading = any(v is not None for v in fading)
        if self.explicit_channel and has_fading:
            errors["channel"] = "give either gamma1r/gamma2r or nr/var1/var2, not both"
        elif self.explicit_channel:
            for name in ("gamma1r", "gamma2r"):
                value = getattr(self, name)
                if value is None or not value > 0:
                    errors[name] = f"must be a positive number, got {value!r}"
        elif has_fading:
            if not (isinstance(self.nr, int) and self.nr >= 1):
                errors["nr"] = f"must be a positive integer, got {self.nr!r}"
            for name in ("var1", "var2"):
                value = getattr(self, name)
                if value is None or not value > 0:
                    errors[name] = f"must be a positive number, got {value!r}"
        else:
            errors["channel"] = "missing: give gamma1r/gamma2r or nr/var1/var2"

        if self.pt is not None and self.pt_db is not None:
            errors["pt"] = "give at most one of pt and pt_db"
        elif self.pt is not None and not self.pt > 0:
            errors["pt"] = f"must be positive, got {self.pt!r}"
        if not self.pt_db_grid:
            errors["pt_db_grid"] = "must not be empty"
        if not (isinstance(self.trials, int) and self.trials >= 1):
            errors["trials"] = f"must be a positive integer, got {self.trials!r}"
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            errors["seed"] = "must be an integer in [0, 2**64)"
        bad = [p for p in self.policies if p not in POLICIES]
        if bad or not self.policies:
            errors["policies"] = f"must be a nonempty subset of {', '.join(POLICIES)}"
        if errors:
            raise ConfigError(errors)
        return self

    def fading_model(self) -> FadingModel:
        if self.explicit_channel:
            raise ConfigError({"channel": "a fading model (nr, var1, var2) is required"})
        return FadingModel(self.nr, self.var1, self.var2, self.sigma2)

    def channel(self) -> ChannelState:
        """Explicit gains map to a deterministic channel; a fading model is drawn with ``seed``."""
        if self.explicit_channel:
            pt = self.total_power
            return ChannelState.from_gains(
                self.gamma1r * self.sigma2 / pt, self.gamma2r * self.sigma2 / pt, self.sigma2
            )
        return draw_channel(self.fading_model(), self.seed)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError({name: "unknown field" for name in unknown})
        data = dict(data)
        for name in ("pt_db_grid", "policies"):
            if name in data:
                data[name] = list(data[name])
        return cls(**data).validate()

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError({"file": f"invalid JSON ({exc})"}) from None
        if not isinstance(data, dict):
            raise ConfigError({"file": "top level must be a JSON object"})
        return cls.from_dict(data)
