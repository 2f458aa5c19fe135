"""
Solver Models
Quasi-Newton settings and the normalized eigenpair it produces
"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from app.models.shape import FourierShape


class SolveStatus(str, Enum):
    """Outcome of a quasi-Newton solve"""
    CONVERGED = "converged"
    TRIVIAL_CIRCLE = "trivial-circle"
    MAX_ITERS = "max-iters"
    LINE_SEARCH_FAILURE = "line-search-failure"


class LinearSystem(str, Enum):
    """How the overdetermined Newton system is closed"""
    LEAST_SQUARES = "least_squares"
    FOURIER = "fourier"


class LineSearchConfig(BaseModel):
    """Backtracking controls"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    shrink: float = Field(default_factory=lambda: settings.LINE_SEARCH_SHRINK, gt=0, lt=1)
    sufficient_decrease: float = Field(default=0.0, ge=0, lt=1)
    max_backtracks: int = Field(default_factory=lambda: settings.LINE_SEARCH_MAX_BACKTRACKS, ge=1)


class SolverConfig(BaseModel):
    """Discretization, pre-specified flux constant and Newton controls"""
    model_config = ConfigDict(frozen=True)

    n1: int = Field(default_factory=lambda: settings.DEFAULT_N1, ge=2)
    n2: int = Field(default_factory=lambda: settings.DEFAULT_N2, ge=4)
    c0: float
    initial_modes: Dict[int, float] = Field(default_factory=dict)
    # tolerances are relative to max(1, max|M|)
    newton_tol: float = Field(default_factory=lambda: settings.NEWTON_TOL, gt=0)
    floor_tol: float = Field(default_factory=lambda: settings.NEWTON_FLOOR_TOL, gt=0)
    floor_ratio: float = Field(default_factory=lambda: settings.NEWTON_FLOOR_RATIO, gt=0, lt=1)
    max_iters: int = Field(default_factory=lambda: settings.NEWTON_MAX_ITERS, ge=0)
    fd_step: float = Field(default_factory=lambda: settings.FD_STEP, gt=0)
    line_search: LineSearchConfig = Field(default_factory=LineSearchConfig)
    jacobian_refresh: int = Field(default_factory=lambda: settings.JACOBIAN_REFRESH, ge=1)
    circle_threshold: float = Field(default_factory=lambda: settings.CIRCLE_THRESHOLD, gt=0)
    system: LinearSystem = LinearSystem.LEAST_SQUARES
    # relative singular-value cutoff of the Newton least-squares solve
    lstsq_rcond: Optional[float] = Field(default_factory=lambda: settings.LSTSQ_RCOND, gt=0)
    # smallest kept singular value is dropped when below family_gap times the next one
    family_gap: Optional[float] = Field(default_factory=lambda: settings.FAMILY_GAP, gt=0, lt=1)

    @field_validator("initial_modes")
    @classmethod
    def nonnegative_modes(cls, value: Dict[int, float]) -> Dict[int, float]:
        for mode in value:
            if mode < 0:
                raise ValueError(f"Mode {mode} must be nonnegative")
        return value

    @model_validator(mode="after")
    def check_resolution(self) -> "SolverConfig":
        if self.n2 % 2 != 0:
            raise ValueError(f"n2 must be even, got {self.n2}")
        if self.n2 < 2 * self.n1:
            raise ValueError(f"n2 ({self.n2}) must be at least 2*n1 ({2 * self.n1})")
        for mode in self.initial_modes:
            if mode >= self.n1:
                raise ValueError(f"Initial mode {mode} not representable with n1={self.n1}")
        return self

    def initial_shape(self) -> FourierShape:
        return FourierShape.from_modes(self.n1, self.initial_modes)


class SolveResult(BaseModel):
    """Converged (or last) shape with its eigenvalue and diagnostics"""

    shape: FourierShape
    status: SolveStatus
    c0: float
    c_converged: Optional[float] = None
    c_scaled: Optional[float] = None  # c0 / beta^3 from the eigenpair scaling
    c_spread: Optional[float] = None
    normalization_consistent: Optional[bool] = None
    scale: float = 1.0  # beta = 1 / delta_0 at convergence
    shape_factor: float
    dominant_fold: int
    iterations: int
    residual_history: List[float] = []  # max|f| per iterate
    residual_norms: List[float] = []  # ||f||_2 of the Newton system per iterate
    final_residual: float
    tolerance: Optional[float] = None  # absolute max|f| target of the last iterate
    floor_limited: bool = False

    @property
    def converged(self) -> bool:
        return self.status == SolveStatus.CONVERGED
