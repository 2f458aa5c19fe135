"""
Run Models
Experiment configuration (JSON document) and self-describing run records
"""
from datetime import datetime
from enum import Enum
from typing import Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config import settings
from app.models.params import PhysicalParams
from app.models.solver import LinearSystem, LineSearchConfig, SolveResult, SolverConfig


class ExperimentKind(str, Enum):
    """Which study a run performs"""
    SOLVE = "solve"
    SWEEP = "sweep"
    RESOLUTION = "resolution"
    LINEAR_TABLE = "linear-table"
    FOLD_CURVE = "fold-curve"
    VALIDATE = "validate"


class ValueRange(BaseModel):
    """Inclusive evenly spaced axis, expanded with numpy.linspace"""
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    num: int = Field(..., ge=1)

    def values(self) -> List[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


AxisValues = Union[List[float], ValueRange]


def _expand(axis: AxisValues) -> List[float]:
    if isinstance(axis, ValueRange):
        return axis.values()
    return [float(v) for v in axis]


class SweepAxes(BaseModel):
    """Grid axes: C0, mobility contrast A and per-mode initial amplitudes"""
    model_config = ConfigDict(extra="forbid")

    c0: Optional[AxisValues] = None
    atwood: Optional[AxisValues] = None
    modes: Dict[int, AxisValues] = {}

    def c0_values(self) -> Optional[List[float]]:
        return _expand(self.c0) if self.c0 is not None else None

    def atwood_values(self) -> Optional[List[float]]:
        return _expand(self.atwood) if self.atwood is not None else None

    def mode_values(self) -> Dict[int, List[float]]:
        return {mode: _expand(axis) for mode, axis in sorted(self.modes.items())}

    @property
    def is_empty(self) -> bool:
        for axis in (self.c0, self.atwood):
            if axis is not None and _expand(axis):
                return False
        return not any(_expand(axis) for axis in self.modes.values())


class ExperimentConfig(BaseModel):
    """Experiment kind and its axes"""
    model_config = ConfigDict(extra="forbid")

    kind: ExperimentKind = ExperimentKind.SOLVE
    axes: Optional[SweepAxes] = None
    n2_values: List[int] = [256, 512, 1024, 2048]
    k_min: int = Field(default=3, ge=1)
    k_max: int = Field(default=12, ge=1)
    kmax: int = Field(default=8, ge=1)
    validate_n2: int = Field(default=256, ge=16)
    # seed amplitude of each single-mode solve in a fold-curve study
    amplitude: float = Field(default=0.1, gt=0)


class NewtonSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tol: float = Field(default_factory=lambda: settings.NEWTON_TOL, gt=0)
    max_iters: int = Field(default_factory=lambda: settings.NEWTON_MAX_ITERS, ge=0)
    fd_step: float = Field(default_factory=lambda: settings.FD_STEP, gt=0)
    refresh: int = Field(default_factory=lambda: settings.JACOBIAN_REFRESH, ge=1)
    floor_tol: float = Field(default_factory=lambda: settings.NEWTON_FLOOR_TOL, gt=0)
    family_gap: Optional[float] = Field(default_factory=lambda: settings.FAMILY_GAP, gt=0, lt=1)


class RunConfig(BaseModel):
    """Full run configuration, strict about unknown keys"""
    model_config = ConfigDict(extra="forbid")

    tau: float = Field(default_factory=lambda: settings.DEFAULT_TAU, gt=0)
    k_eff: float = Field(default_factory=lambda: settings.DEFAULT_K_EFF, gt=0)
    atwood: float = Field(default_factory=lambda: settings.DEFAULT_ATWOOD, ge=-1, le=1)
    n1: int = Field(default_factory=lambda: settings.DEFAULT_N1, ge=2)
    n2: int = Field(default_factory=lambda: settings.DEFAULT_N2, ge=4)
    c0: float = 30.0
    initial_modes: Dict[int, float] = {}
    newton: NewtonSettings = Field(default_factory=NewtonSettings)
    line_search: LineSearchConfig = Field(default_factory=LineSearchConfig)
    system: LinearSystem = LinearSystem.LEAST_SQUARES
    circle_threshold: float = Field(default_factory=lambda: settings.CIRCLE_THRESHOLD, gt=0)
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    workers: int = Field(default_factory=lambda: settings.MAX_WORKERS, ge=1)

    @model_validator(mode="after")
    def check_invariants(self) -> "RunConfig":
        if self.n2 % 2 != 0:
            raise ValueError(f"n2 must be even, got {self.n2}")
        if self.n2 < 2 * self.n1:
            raise ValueError(f"n2 ({self.n2}) must be at least 2*n1 ({2 * self.n1})")

        modes = set(self.initial_modes)
        if self.experiment.axes is not None:
            modes |= set(self.experiment.axes.modes)
        for mode in modes:
            if not 0 <= mode < self.n1:
                raise ValueError(f"initial mode {mode} outside 0..{self.n1 - 1}")

        if self.experiment.axes is not None:
            for atwood in self.experiment.axes.atwood_values() or []:
                if not -1.0 <= atwood <= 1.0:
                    raise ValueError(f"atwood axis value {atwood} outside [-1, 1]")

        kind = self.experiment.kind
        if kind == ExperimentKind.SWEEP and (self.experiment.axes is None or self.experiment.axes.is_empty):
            raise ValueError("experiment.axes must be nonempty for a sweep")
        if kind == ExperimentKind.RESOLUTION:
            if not self.experiment.n2_values:
                raise ValueError("experiment.n2_values must be nonempty for a resolution study")
            for n2 in self.experiment.n2_values:
                if n2 % 2 != 0 or n2 < 2 * self.n1:
                    raise ValueError(f"experiment.n2_values entry {n2} must be even and at least 2*n1")
        if kind == ExperimentKind.LINEAR_TABLE:
            if self.experiment.k_min < 3:
                raise ValueError("experiment.k_min must be at least 3 for a linear table")
            if self.experiment.k_max < self.experiment.k_min:
                raise ValueError("experiment.k_max must not be below experiment.k_min")
        if kind == ExperimentKind.FOLD_CURVE:
            if self.experiment.k_min < 3:
                raise ValueError("experiment.k_min must be at least 3 for a fold curve")
            if not self.experiment.k_min <= self.experiment.k_max < self.n1:
                raise ValueError("experiment.k_max must lie between experiment.k_min and n1 - 1")
        if kind == ExperimentKind.VALIDATE:
            if self.experiment.validate_n2 % 2 != 0:
                raise ValueError("experiment.validate_n2 must be even")
            if 4 * self.experiment.kmax >= self.experiment.validate_n2:
                raise ValueError("experiment.kmax must be below experiment.validate_n2 / 4")
        return self

    def physical_params(self, atwood: Optional[float] = None) -> PhysicalParams:
        atwood = self.atwood if atwood is None else atwood
        return PhysicalParams(tau=self.tau, k_eff=self.k_eff, atwood=atwood)

    def solver_config(
        self,
        c0: Optional[float] = None,
        initial_modes: Optional[Dict[int, float]] = None,
        n2: Optional[int] = None,
    ) -> SolverConfig:
        return SolverConfig(
            n1=self.n1,
            n2=n2 if n2 is not None else self.n2,
            c0=c0 if c0 is not None else self.c0,
            initial_modes=initial_modes if initial_modes is not None else self.initial_modes,
            newton_tol=self.newton.tol,
            floor_tol=self.newton.floor_tol,
            family_gap=self.newton.family_gap,
            max_iters=self.newton.max_iters,
            fd_step=self.newton.fd_step,
            jacobian_refresh=self.newton.refresh,
            line_search=self.line_search,
            circle_threshold=self.circle_threshold,
            system=self.system,
        )


class RunRecord(BaseModel):
    """One solve with its full input echo, re-runnable as a `solve` config"""
    config: dict
    result: Optional[SolveResult] = None
    error: Optional[str] = None
    started_at: datetime
    finished_at: datetime
    solver_version: str = Field(default_factory=lambda: settings.APP_VERSION)

    @property
    def status(self) -> str:
        if self.result is not None:
            return self.result.status.value
        return "error"


class ResolutionFit(BaseModel):
    """Three-parameter fit y = y_star + beta1 * exp(-beta2 * n2)"""
    n2_values: List[int]
    shape_factors: List[float]
    y_star: Optional[float] = None
    beta1: Optional[float] = None
    beta2: Optional[float] = None
    converged: bool


class FoldDeviation(BaseModel):
    """Regression of C - C_lin against (delta/R)^2 over the converged points of one fold"""
    fold: int
    atwood: float
    points: int
    baseline: float
    slope: Optional[float] = None


class FoldCurveFit(BaseModel):
    """Exponent p of C = k (k^p - 1) / (k - 2) through the converged folds k >= 4"""
    folds: List[int]
    flux_constants: List[float]
    exponent: Optional[float] = None
