"""Experiment configuration: a single declarative JSON file, echoed to outputs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Tolerances, schedules and sampling sizes for the batch commands.

    The seed fixes every random sample drawn in a run; identical config plus
    seed produces byte-identical outputs.
    """

    m: int = 2
    seed: int = 0
    tol_flat: float = 1e-5
    tol_killing: float = 1e-4
    tol_mass: float = 1e-6
    n_samples: int = 20
    n_norm_points: int = 100
    n_loops: int = 40
    r_schedule: list = field(default_factory=lambda: [2.0, 2.5, 3.0, 3.5, 4.0, 4.5])
    n_polar: int = 0  # 0 -> dimension-dependent default
    n_torus: int = 0
    bump_z0: float = 1.0
    bump_z1: float = 2.0
    boost_tau: float = 0.15
    equivariance_tol: float = 0.02

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError("m >= 2 required")
        if self.m not in (2, 3):
            raise ConfigError("quadrature rules are provided for m = 2, 3")
        for name in ("tol_flat", "tol_killing", "tol_mass", "equivariance_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        rs = list(self.r_schedule)
        if len(rs) < 3 or any(b <= a for a, b in zip(rs, rs[1:])):
            raise ConfigError("r_schedule must be increasing with >= 3 entries")
        if not 1.0 <= self.bump_z0 < self.bump_z1:
            raise ConfigError("bump support must satisfy 1 <= z0 < z1")
        if self.n_polar == 0:
            self.n_polar = 24 if self.m == 2 else 10
        if self.n_torus == 0:
            self.n_torus = 24 if self.m == 2 else 12

    @property
    def parity(self) -> str:
        return "odd" if self.m % 2 else "even"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(data)
