"""
Experiment and scenario descriptions consumed by the batch runner.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple

from optim.apg import SolverOptions
from scenario.geometry import GeometryConfig, LinkBudget, dbm_to_watts
from system.errors import ConfigurationError


class ExperimentKind(Enum):
    CONVERGENCE = "convergence"
    SWEEP_PT = "sweep-pt"
    SWEEP_M = "sweep-m"
    RUNTIME = "runtime"
    SWEEP_TAU = "sweep-tau"


DEFAULT_SWEEPS = {
    ExperimentKind.CONVERGENCE: (),
    ExperimentKind.SWEEP_PT: (10.0, 15.0, 20.0, 25.0, 30.0),
    ExperimentKind.SWEEP_M: (25, 100, 225, 400),
    ExperimentKind.RUNTIME: (25, 100, 225, 400),
    ExperimentKind.SWEEP_TAU: (5.0, 10.0, 50.0, 100.0, 500.0),
}


@dataclass(frozen=True)
class ScenarioConfig:
    n: int = 4
    m: int = 100
    group_sizes: Tuple[int, ...] = (3, 3, 3)
    pt_dbm: float = 30.0
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    budget: LinkBudget = field(default_factory=LinkBudget)

    def __post_init__(self):
        object.__setattr__(self, "group_sizes", tuple(int(k) for k in self.group_sizes))
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError(f"n must be a positive integer, got {self.n}")
        if int(self.m) != self.m or self.m < 0:
            raise ConfigurationError(f"m must be a non-negative integer, got {self.m}")
        if not self.group_sizes or any(k < 1 for k in self.group_sizes):
            raise ConfigurationError(f"group_sizes must be non-empty and positive, got {self.group_sizes}")
        if not math.isfinite(self.pt_dbm):
            raise ConfigurationError(f"pt_dbm must be finite, got {self.pt_dbm}")

    @property
    def num_groups(self) -> int:
        return len(self.group_sizes)

    @property
    def p_t(self) -> float:
        """Transmit power in watts"""
        return dbm_to_watts(self.pt_dbm)


@dataclass(frozen=True)
class ExperimentSpec:
    kind: ExperimentKind
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    solver: SolverOptions = field(default_factory=SolverOptions)
    sweep_values: Tuple[float, ...] = ()
    num_realizations: int = 20
    out: Optional[Path] = None
    seed: int = 0
    parallel: int = 1
    warmup: bool = True

    def __post_init__(self):
        if not self.sweep_values:
            object.__setattr__(self, "sweep_values", DEFAULT_SWEEPS[self.kind])
        values = tuple(self.sweep_values)
        object.__setattr__(self, "sweep_values", values)
        if self.kind is not ExperimentKind.CONVERGENCE and not values:
            raise ConfigurationError(f"{self.kind.value} needs at least one sweep value")
        if not all(math.isfinite(v) for v in values):
            raise ConfigurationError(f"sweep values must be finite, got {values}")
        if self.kind in (ExperimentKind.SWEEP_M, ExperimentKind.RUNTIME):
            if any(v < 0 or int(v) != v for v in values):
                raise ConfigurationError(f"IRS sizes must be non-negative integers, got {values}")
        elif self.kind is ExperimentKind.SWEEP_TAU and any(v <= 0 for v in values):
            raise ConfigurationError(f"tau values must be positive, got {values}")
        if int(self.num_realizations) != self.num_realizations or self.num_realizations < 1:
            raise ConfigurationError(f"num_realizations must be >= 1, got {self.num_realizations}")
        if self.parallel < 1:
            raise ConfigurationError(f"parallel must be >= 1, got {self.parallel}")
        if self.out is not None:
            object.__setattr__(self, "out", Path(self.out))
