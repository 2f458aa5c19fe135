"""
Experiment Service
Runs solve, sweep, resolution, fold-curve, linear-table and validate studies and writes their artifacts
"""
import csv
import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq
from tqdm import tqdm

from app.exceptions import ConfigurationError, SelfSimilarError
from app.models.run import (
    ExperimentKind,
    FoldCurveFit,
    FoldDeviation,
    ResolutionFit,
    RunConfig,
    RunRecord,
)
from app.models.shape import FourierShape
from app.models.solver import SolveStatus
from app.models.validation import ValidationReport
from app.services.geometry import sample_interface, spectrum
from app.services.linear_theory import (
    deviation_slope,
    fit_flux_exponent,
    fitted_flux_constant,
    linear_table,
    two_phase_flux_constant,
)
from app.services.oracle import run_all
from app.services.solver import solve_self_similar

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_VALIDATION_FAILED = 4

# (c0, initial modes, n2, atwood)
GridPoint = Tuple[float, Dict[int, float], int, float]


def fmt(value: Any) -> str:
    """CSV cell: floats with 17 significant digits, None as empty"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def parse_config(path: Union[str, Path]) -> RunConfig:
    """
    Load a JSON run config.

    Raises ConfigurationError for unreadable files and pydantic ValidationError
    for unknown keys or invariant violations.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ConfigurationError(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must hold a JSON object")
    return RunConfig.model_validate(data)


def apply_overrides(config: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """Replace config keys; dotted names reach nested sections (e.g. 'newton.tol')"""
    data = config.model_dump(mode="json")
    for key, value in overrides.items():
        if value is None:
            continue
        *parents, leaf = key.split(".")
        section = data
        for parent in parents:
            section = section.setdefault(parent, {})
        section[leaf] = value
    return RunConfig.model_validate(data)


def point_echo(
    config: RunConfig,
    c0: float,
    modes: Mapping[int, float],
    n2: int,
    atwood: Optional[float] = None,
) -> dict:
    """A solve config reproducing one grid point"""
    echo = config.model_dump(mode="json", exclude={"experiment", "workers"})
    echo.update(
        c0=c0,
        n2=n2,
        atwood=config.atwood if atwood is None else atwood,
        initial_modes={str(k): v for k, v in sorted(modes.items())},
        experiment={"kind": ExperimentKind.SOLVE.value},
    )
    return echo


def solve_point(
    config: RunConfig,
    c0: Optional[float] = None,
    initial_modes: Optional[Dict[int, float]] = None,
    n2: Optional[int] = None,
    atwood: Optional[float] = None,
) -> RunRecord:
    """Solve one point; solver errors are recorded instead of raised"""
    c0 = config.c0 if c0 is None else c0
    initial_modes = dict(config.initial_modes) if initial_modes is None else initial_modes
    n2 = config.n2 if n2 is None else n2
    atwood = config.atwood if atwood is None else atwood

    started = datetime.now(timezone.utc)
    result, error = None, None
    try:
        result = solve_self_similar(
            config.solver_config(c0=c0, initial_modes=initial_modes, n2=n2),
            config.physical_params(atwood),
        )
    except (SelfSimilarError, ValueError) as e:
        logger.warning("Point C0=%g A=%g modes=%s n2=%d failed: %s", c0, atwood, initial_modes, n2, e)
        error = f"{type(e).__name__}: {e}"

    return RunRecord(
        config=point_echo(config, c0, initial_modes, n2, atwood),
        result=result,
        error=error,
        started_at=started,
        finished_at=datetime.now(timezone.utc),
    )


def sweep_points(config: RunConfig) -> List[GridPoint]:
    """Cartesian product of the C0, A and mode axes, C0 outermost"""
    axes = config.experiment.axes
    c0_values = (axes.c0_values() if axes else None) or [config.c0]
    atwood_values = (axes.atwood_values() if axes else None) or [config.atwood]
    mode_axes = axes.mode_values() if axes else {}

    points = []
    for c0, atwood, amplitudes in itertools.product(
        c0_values, atwood_values, itertools.product(*mode_axes.values())
    ):
        modes = dict(config.initial_modes)
        modes.update(zip(mode_axes, amplitudes))
        points.append((c0, modes, config.n2, atwood))
    return points


def fit_resolution(n2_values: Sequence[int], shape_factors: Sequence[float]) -> ResolutionFit:
    """
    y = y_star + beta1 exp(-beta2 n2) through the three largest n2.

    beta2 solves the ratio of consecutive differences exactly (brentq); when the
    differences do not decay geometrically the fit reports converged=False and
    y_star is the finest-resolution value.
    """
    pairs = sorted(zip(n2_values, shape_factors))
    n2_sorted = [int(n) for n, _ in pairs]
    y_sorted = [float(y) for _, y in pairs]
    fallback = ResolutionFit(
        n2_values=n2_sorted,
        shape_factors=y_sorted,
        y_star=y_sorted[-1] if y_sorted else None,
        converged=False,
    )
    if len(pairs) < 3:
        return fallback

    (na, ya), (nb, yb), (nc, yc) = pairs[-3:]
    d1, d2 = ya - yb, yb - yc
    if d1 == 0.0 or d2 == 0.0 or np.sign(d1) != np.sign(d2):
        return fallback

    target = d1 / d2
    gap_ab, gap_bc = nb - na, nc - nb

    def mismatch(beta2: float) -> float:
        return np.expm1(beta2 * gap_ab) / -np.expm1(-beta2 * gap_bc) - target

    low, high = 1e-12 / (nc - na), 700.0 / (nc - na)
    if mismatch(low) * mismatch(high) > 0:
        return fallback

    beta2 = brentq(mismatch, low, high, xtol=1e-14, rtol=1e-12)
    # amplitude at the finest resolution
    tail = d2 / np.expm1(beta2 * gap_bc)
    with np.errstate(over="ignore"):
        beta1 = float(tail * np.exp(beta2 * nc))

    return ResolutionFit(
        n2_values=n2_sorted,
        shape_factors=y_sorted,
        y_star=yc - tail,
        beta1=beta1 if np.isfinite(beta1) else None,
        beta2=float(beta2),
        converged=True,
    )


def _converged(records: Sequence[RunRecord]) -> List[RunRecord]:
    return [r for r in records if r.result is not None and r.result.converged]


def deviation_fits(config: RunConfig, records: Sequence[RunRecord]) -> List[FoldDeviation]:
    """
    Slope k' of C - C_lin against (delta/R)^2 per (A, dominant fold), over converged
    points of folds k >= 3. C_lin is the two-phase linear flux constant at that A.
    """
    groups: Dict[Tuple[float, int], List[RunRecord]] = {}
    for record in _converged(records):
        fold = record.result.dominant_fold
        if fold >= 3:
            groups.setdefault((record.config["atwood"], fold), []).append(record)

    fits = []
    for (atwood, fold), members in sorted(groups.items()):
        try:
            baseline = two_phase_flux_constant(fold, config.physical_params(atwood))
        except SelfSimilarError:
            continue
        try:
            slope = deviation_slope(
                [r.result.shape_factor for r in members],
                [r.result.c_converged for r in members],
                fold,
                baseline=baseline,
            )
        except SelfSimilarError:
            slope = None
        fits.append(FoldDeviation(fold=fold, atwood=atwood, points=len(members), baseline=baseline, slope=slope))
    return fits


def fold_curve_points(config: RunConfig) -> List[Tuple[int, GridPoint]]:
    """(k, grid point) per fold: a mode-k seed solved at the linear flux constant of k"""
    params = config.physical_params()
    points = []
    for k in range(config.experiment.k_min, config.experiment.k_max + 1):
        try:
            c0 = two_phase_flux_constant(k, params)
        except SelfSimilarError as e:
            logger.warning("Skipping fold %d: %s", k, e)
            continue
        modes = dict(config.initial_modes)
        modes[k] = config.experiment.amplitude
        points.append((k, (c0, modes, config.n2, config.atwood)))
    return points


def fit_fold_curve(folds: Sequence[int], records: Sequence[RunRecord]) -> FoldCurveFit:
    """Exponent refit over records that converged to the fold they were seeded with, k >= 4"""
    pairs = [
        (k, r.result.c_converged)
        for k, r in zip(folds, records)
        if k >= 4 and r.result is not None and r.result.converged and r.result.dominant_fold == k
    ]
    folds = [k for k, _ in pairs]
    flux_constants = [c for _, c in pairs]
    exponent = None
    if pairs:
        try:
            exponent = fit_flux_exponent(folds, flux_constants)
        except RuntimeError as e:
            logger.warning("Fold curve fit failed: %s", e)
    return FoldCurveFit(folds=folds, flux_constants=flux_constants, exponent=exponent)


class ResultWriter:
    """Flat-file artifacts in one output directory"""

    def __init__(self, output_dir: Union[str, Path]):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.output_dir / name
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(value) for value in row])
        return path

    def _json(self, name: str, payload: Any) -> Path:
        path = self.output_dir / name
        path.write_text(json.dumps(payload, indent=2))
        return path

    def write_records(self, records: Sequence[RunRecord]) -> Path:
        return self._json("results.json", [record.model_dump(mode="json") for record in records])

    def write_shape(self, shape: FourierShape, n2: int) -> Path:
        si = sample_interface(shape, n2)
        rows = zip(si.alpha, si.radius, si.x, si.y, si.kappa)
        return self._csv("shape.csv", ["alpha", "r", "x", "y", "kappa"], rows)

    def write_spectrum(self, shape: FourierShape) -> Path:
        return self._csv("spectrum.csv", ["mode", "amplitude"], spectrum(shape))

    def write_summary(self, records: Sequence[RunRecord]) -> Path:
        modes = sorted({int(k) for record in records for k in record.config["initial_modes"]})
        header = (
            ["c0", "atwood"]
            + [f"mode_{k}" for k in modes]
            + ["c_converged", "shape_factor", "dominant_fold", "status"]
        )

        rows = []
        for record in records:
            initial = {int(k): v for k, v in record.config["initial_modes"].items()}
            result = record.result
            rows.append(
                [record.config["c0"], record.config["atwood"]]
                + [initial.get(k, 0.0) for k in modes]
                + [
                    result.c_converged if result else None,
                    result.shape_factor if result else None,
                    result.dominant_fold if result else None,
                    record.status,
                ]
            )
        return self._csv("summary.csv", header, rows)

    def write_deviations(self, fits: Sequence[FoldDeviation]) -> Path:
        rows = [(f.fold, f.atwood, f.points, f.baseline, f.slope) for f in fits]
        return self._csv("deviation.csv", ["fold", "atwood", "points", "baseline", "slope"], rows)

    def write_fold_curve(self, folds: Sequence[int], records: Sequence[RunRecord], fit: FoldCurveFit) -> Path:
        rows = []
        for k, record in zip(folds, records):
            result = record.result
            rows.append((
                k,
                record.config["c0"],
                fitted_flux_constant(k) if k > 3 else None,
                result.c_converged if result else None,
                result.shape_factor if result else None,
                result.dominant_fold if result else None,
                record.status,
            ))
        self._json("fold_curve_fit.json", fit.model_dump(mode="json"))
        header = ["k", "c_linear", "c_fitted", "c_converged", "shape_factor", "dominant_fold", "status"]
        return self._csv("fold_curve.csv", header, rows)

    def write_resolution_fit(self, fit: ResolutionFit) -> Path:
        return self._json("resolution_fit.json", fit.model_dump(mode="json"))

    def write_linear_table(self, rows: Sequence[Sequence[Any]]) -> Path:
        return self._csv("linear_table.csv", ["k", "linear", "fitted", "two_phase"], rows)

    def write_validation(self, reports: Sequence[ValidationReport]) -> Path:
        rows = [(r.check, r.error, r.tolerance, r.passed, r.n2) for r in reports]
        return self._csv("validation.csv", ["check", "error", "tolerance", "passed", "n2"], rows)


class ExperimentRunner:
    """Dispatches a RunConfig to its study and collects artifacts through one writer"""

    def __init__(self, config: RunConfig, show_progress: bool = True):
        self.config = config
        self.show_progress = show_progress
        self.writer = ResultWriter(config.output_dir)

    def _solve_all(self, points: Sequence[GridPoint], desc: str) -> List[RunRecord]:
        def task(point: GridPoint) -> RunRecord:
            return solve_point(self.config, *point)

        progress = dict(total=len(points), desc=desc, disable=not self.show_progress)
        if self.config.workers == 1:
            return [task(point) for point in tqdm(points, **progress)]
        # map keeps grid order regardless of completion order
        with ThreadPoolExecutor(max_workers=self.config.workers) as executor:
            return list(tqdm(executor.map(task, points), **progress))

    def run_solve(self) -> int:
        record = solve_point(self.config)
        self.writer.write_records([record])
        if record.result is None:
            return EXIT_NOT_CONVERGED
        self.writer.write_shape(record.result.shape, self.config.n2)
        self.writer.write_spectrum(record.result.shape)
        if record.result.status in (SolveStatus.CONVERGED, SolveStatus.TRIVIAL_CIRCLE):
            return EXIT_OK
        return EXIT_NOT_CONVERGED

    def run_sweep(self) -> int:
        records = self._solve_all(sweep_points(self.config), "sweep")
        self.writer.write_records(records)
        self.writer.write_summary(records)
        fits = deviation_fits(self.config, records)
        self.writer.write_deviations(fits)
        for fit in fits:
            logger.info("Fold %d (A=%g): k' = %s over %d points", fit.fold, fit.atwood, fit.slope, fit.points)
        failed = sum(1 for record in records if record.status != SolveStatus.CONVERGED.value)
        logger.info("Sweep finished: %d points, %d not converged", len(records), failed)
        return EXIT_OK

    def run_resolution(self) -> int:
        points = [
            (self.config.c0, dict(self.config.initial_modes), n2, self.config.atwood)
            for n2 in self.config.experiment.n2_values
        ]
        records = self._solve_all(points, "resolution")
        self.writer.write_records(records)
        self.writer.write_summary(records)

        converged = _converged(records)
        fit = fit_resolution(
            [r.config["n2"] for r in converged],
            [r.result.shape_factor for r in converged],
        )
        self.writer.write_resolution_fit(fit)
        logger.info("Resolution fit: (delta/R)* = %s (converged=%s)", fit.y_star, fit.converged)
        return EXIT_OK

    def run_fold_curve(self) -> int:
        seeds = fold_curve_points(self.config)
        folds = [k for k, _ in seeds]
        records = self._solve_all([point for _, point in seeds], "fold-curve")
        self.writer.write_records(records)
        fit = fit_fold_curve(folds, records)
        self.writer.write_fold_curve(folds, records, fit)
        logger.info("Fold curve: exponent %s over folds %s", fit.exponent, fit.folds)
        return EXIT_OK

    def run_linear_table(self) -> int:
        params = self.config.physical_params()
        rows = []
        for k, linear, fitted in linear_table(self.config.experiment.k_min, self.config.experiment.k_max):
            try:
                two_phase = two_phase_flux_constant(k, params)
            except SelfSimilarError:
                two_phase = None
            rows.append((k, linear, fitted, two_phase))
        self.writer.write_linear_table(rows)
        return EXIT_OK

    def run_validate(self) -> int:
        reports = run_all(
            n2=self.config.experiment.validate_n2,
            kmax=self.config.experiment.kmax,
            params=self.config.physical_params(),
        )
        self.writer.write_validation(reports)
        failures = [r.check for r in reports if not r.passed]
        if failures:
            logger.error("Validation failed: %s", ", ".join(failures))
            return EXIT_VALIDATION_FAILED
        return EXIT_OK

    def run(self) -> int:
        handlers = {
            ExperimentKind.SOLVE: self.run_solve,
            ExperimentKind.SWEEP: self.run_sweep,
            ExperimentKind.RESOLUTION: self.run_resolution,
            ExperimentKind.LINEAR_TABLE: self.run_linear_table,
            ExperimentKind.FOLD_CURVE: self.run_fold_curve,
            ExperimentKind.VALIDATE: self.run_validate,
        }
        return handlers[self.config.experiment.kind]()


def run(config: RunConfig, show_progress: bool = True) -> int:
    """Run the configured study; returns the process exit status"""
    return ExperimentRunner(config, show_progress=show_progress).run()
