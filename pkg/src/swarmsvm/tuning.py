"""Swarm search over SVM hyperparameters scored by cross-validation.

The search space is the 2D box (log2 C, log2 gamma); the objective is
stratified k-fold misclassification rate with an RBF kernel.  The four
corners of the box are injected into the initial swarm so the tuned
result provably dominates them.  The tuned parameters are then used to
train one final model on all the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError, DataError
from .report import format_float, format_record
from .svm import Dataset, KernelSpec, SvmModel, predict_batch, train
from .swarm import ObjectiveSpec, SwarmConfig, optimize


@dataclass(frozen=True)
class TunerConfig:
    log2_C_range: tuple = (-5.0, 15.0)
    log2_gamma_range: tuple = (-15.0, 3.0)
    folds: int = 5
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    seed: int = 0
    svm_tol: float = 1e-3
    svm_max_passes: int = 10_000

    def __post_init__(self):
        for name, rng in (("log2_C_range", self.log2_C_range),
                          ("log2_gamma_range", self.log2_gamma_range)):
            if len(rng) != 2 or not rng[0] < rng[1]:
                raise ConfigError(f"{name} must be a non-degenerate (lo, hi) interval, got {rng}")
        if self.folds < 2:
            raise ConfigError(f"folds must be at least 2, got {self.folds}")
        if self.swarm.n_particles < 4:
            raise ConfigError(
                "tuner swarm needs at least 4 particles to hold the box corners, "
                f"got {self.swarm.n_particles}"
            )


def stratified_fold_ids(labels: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Fold id per sample: seeded per-class shuffle dealt round-robin.

    Every class is spread as evenly as possible across folds, so no
    training side loses a class as long as each class has >= 2 members.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if folds > n // 2:
        raise DataError(f"folds={folds} too many for {n} samples (need folds <= n/2)")
    counts = {}
    for value in np.unique(labels):
        counts[value] = int((labels == value).sum())
        if counts[value] < 2:
            raise DataError(
                f"class {value:+g} has {counts[value]} sample(s); "
                "stratified folding needs at least 2 per class"
            )
    rng = np.random.default_rng(seed)
    ids = np.empty(n, dtype=int)
    for value in np.unique(labels):
        members = np.flatnonzero(labels == value)
        rng.shuffle(members)
        ids[members] = np.arange(members.size) % folds
    return ids


def cv_error(data: Dataset, kernel: KernelSpec, C: float, folds: int, seed: int,
             tol: float = 1e-3, max_passes: int = 10_000) -> float:
    """Mean misclassification rate over stratified folds. Deterministic."""
    ids = stratified_fold_ids(data.labels, folds, seed)
    rates = []
    for f in range(folds):
        test = ids == f
        if not test.any():
            continue
        train_ds = Dataset(points=data.points[~test], labels=data.labels[~test])
        model = train(train_ds, kernel, C, tol=tol, max_passes=max_passes)
        wrong = predict_batch(model, data.points[test]) != data.labels[test]
        rates.append(float(wrong.mean()))
    return float(np.mean(rates))


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    C: float
    gamma: float
    cv_error: float

    def to_record(self) -> dict:
        return {
            "iteration": str(self.iteration),
            "C": format_float(self.C),
            "gamma": format_float(self.gamma),
            "cv_error": format_float(self.cv_error),
        }


@dataclass(frozen=True)
class TunedModel:
    model: SvmModel
    best_C: float
    best_gamma: float
    cv_error: float
    evaluations: int
    trace: tuple = field(default=(), compare=False, repr=False)

    @property
    def sigma_squared(self) -> float:
        """Width form of the RBF parameter: sigma^2 = 1 / (2 gamma)."""
        return 1.0 / (2.0 * self.best_gamma)


def tune(data: Dataset, cfg: TunerConfig, trace_path=None) -> TunedModel:
    """Minimize CV error over the (log2 C, log2 gamma) box, then refit.

    Parameter pairs whose CV training fails to converge score +inf and
    are rejected by the swarm; if every evaluated pair fails, a
    diagnostic error is raised.  ``trace_path`` (optional) receives one
    record per objective evaluation.
    """
    c_lo, c_hi = cfg.log2_C_range
    g_lo, g_hi = cfg.log2_gamma_range
    trace: list[TraceRecord] = []
    n_particles = cfg.swarm.n_particles

    def objective(p: np.ndarray) -> float:
        C = float(2.0 ** p[0])
        gamma = float(2.0 ** p[1])
        try:
            err = cv_error(data, KernelSpec.rbf(gamma), C, cfg.folds, cfg.seed,
                           tol=cfg.svm_tol, max_passes=cfg.svm_max_passes)
        except ConvergenceError:
            err = float("inf")
        trace.append(TraceRecord(
            iteration=len(trace) // n_particles,
            C=C,
            gamma=gamma,
            cv_error=err,
        ))
        return err

    spec = ObjectiveSpec(
        dimension=2,
        lower_bounds=np.array([c_lo, g_lo]),
        upper_bounds=np.array([c_hi, g_hi]),
        evaluate=objective,
    )
    corners = np.array([[c_lo, g_lo], [c_lo, g_hi], [c_hi, g_lo], [c_hi, g_hi]])
    report = optimize(spec, cfg.swarm, seed_points=corners)

    if not np.isfinite(report.best_fitness):
        raise ConvergenceError(
            "every evaluated (C, gamma) pair failed cross-validation",
            residual=float("inf"),
        )
    best_C = float(2.0 ** report.best_position[0])
    best_gamma = float(2.0 ** report.best_position[1])
    model = train(data, KernelSpec.rbf(best_gamma), best_C,
                  tol=cfg.svm_tol, max_passes=cfg.svm_max_passes)
    tuned = TunedModel(
        model=model,
        best_C=best_C,
        best_gamma=best_gamma,
        cv_error=float(report.best_fitness),
        evaluations=report.evaluations,
        trace=tuple(trace),
    )
    if trace_path is not None:
        write_trace(tuned.trace, trace_path)
    return tuned


def write_trace(trace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in trace:
            fh.write(format_record(rec.to_record()) + "\n")
