"""Particle swarm optimizers over box-bounded continuous domains.

Four variants share one driver:

* ``pso_standard``   -- velocity update pulled by the global best and each
  particle's personal best, with per-entry uniform random factors.
* ``pso_inertia``    -- same, with the previous velocity damped by an
  inertia weight ``theta``.
* ``apso_velocity``  -- accelerated variant: the personal-best term is
  replaced by additive Gaussian noise, only the global best attracts.
* ``apso_single_step`` -- accelerated variant without velocities; each
  particle moves directly to a convex blend of itself and the global best
  plus decaying Gaussian noise.

The Gaussian noise amplitude ``alpha`` is dimensionless: the draw is
scaled elementwise by the box width of each coordinate, and it decays
over iterations according to the configured schedule.  All randomness
comes from one ``numpy`` generator seeded from the config, with draws in
a fixed particle order, so a (spec, config) pair fully determines the
trajectory.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError
from .report import RunReport

VARIANTS = ("pso_standard", "pso_inertia", "apso_velocity", "apso_single_step")
SCHEDULES = ("exponential_decay", "geometric_decay", "constant")

_VELOCITY_VARIANTS = ("pso_standard", "pso_inertia", "apso_velocity")
_PERSONAL_BEST_VARIANTS = ("pso_standard", "pso_inertia")

# Keys accepted by swarm_config_from_mapping, in file order.
CONFIG_KEYS = (
    "variant",
    "n_particles",
    "max_iterations",
    "alpha0",
    "beta",
    "gamma",
    "theta",
    "schedule",
    "seed",
)


@dataclass(frozen=True)
class ObjectiveSpec:
    """A black-box minimization problem over a box.

    ``evaluate`` maps one position vector to a float fitness and must be
    deterministic and side-effect free.  ``evaluate_batch`` is an optional
    fast path taking an ``(n, dimension)`` matrix and returning ``n``
    fitness values; it must agree with ``evaluate`` row by row.
    """

    dimension: int
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray
    evaluate: Callable[[np.ndarray], float]
    evaluate_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigError(f"dimension must be positive, got {self.dimension}")
        lower = np.asarray(self.lower_bounds, dtype=float)
        upper = np.asarray(self.upper_bounds, dtype=float)
        if lower.shape != (self.dimension,) or upper.shape != (self.dimension,):
            raise ConfigError(
                f"bounds must be vectors of length {self.dimension}, "
                f"got shapes {lower.shape} and {upper.shape}"
            )
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ConfigError("bounds must be finite")
        if not (lower < upper).all():
            raise ConfigError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower_bounds", lower)
        object.__setattr__(self, "upper_bounds", upper)
        if not callable(self.evaluate):
            raise ConfigError("evaluate must be callable")

    @property
    def span(self) -> np.ndarray:
        return self.upper_bounds - self.lower_bounds


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm size, variant, noise schedule and seed.

    ``alpha0`` is the initial noise scale (in units of the box width),
    ``beta`` the attraction toward the global best, ``gamma`` the decay
    control of the noise schedule and ``theta`` the inertia weight used
    only by ``pso_inertia``.  ``alpha0 = 0`` is allowed and turns the
    stochastic term off, which makes the accelerated variants fully
    deterministic contractions.
    """

    n_particles: int = 25
    max_iterations: int = 100
    alpha0: float = 0.5
    beta: float = 0.5
    gamma: float = 0.7
    theta: float = 0.7
    variant: str = "apso_single_step"
    schedule: str = "geometric_decay"
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.schedule not in SCHEDULES:
            raise ConfigError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")
        if self.n_particles < 1:
            raise ConfigError(f"n_particles must be positive, got {self.n_particles}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be positive, got {self.max_iterations}")
        if self.alpha0 < 0:
            raise ConfigError(f"alpha0 must be non-negative, got {self.alpha0}")
        if not 0 < self.beta <= 1:
            raise ConfigError(f"beta must lie in (0, 1], got {self.beta}")
        if self.schedule != "constant" and not 0 < self.gamma < 1:
            raise ConfigError(
                f"gamma must lie in (0, 1) for schedule {self.schedule!r}, got {self.gamma}"
            )
        if self.variant == "pso_inertia" and not 0 < self.theta < 1:
            raise ConfigError(f"theta must lie in (0, 1), got {self.theta}")


def swarm_config_from_mapping(view) -> SwarmConfig:
    """Build a SwarmConfig from a parsed key/value config (ConfigView)."""
    return SwarmConfig(
        variant=view.get_choice("variant", VARIANTS, "apso_single_step"),
        n_particles=view.get_int("n_particles", 25),
        max_iterations=view.get_int("max_iterations", 100),
        alpha0=view.get_float("alpha0", 0.5),
        beta=view.get_float("beta", 0.5),
        gamma=view.get_float("gamma", 0.7),
        theta=view.get_float("theta", 0.7),
        schedule=view.get_choice("schedule", SCHEDULES, "geometric_decay"),
        seed=view.get_int("seed", 0),
    )


def geometric_gamma(max_iterations: int, floor_ratio: float = 1e-6) -> float:
    """Decay rate so the geometric schedule reaches ``floor_ratio`` at t_max.

    Long runs need slow decay: a fixed gamma kills the noise after a few
    dozen iterations regardless of budget.  With this helper the noise
    scale spans (alpha0 .. alpha0*floor_ratio) over the whole run.
    """
    if max_iterations < 1:
        raise ConfigError("max_iterations must be positive")
    if not 0 < floor_ratio < 1:
        raise ConfigError("floor_ratio must lie in (0, 1)")
    return float(floor_ratio ** (1.0 / max_iterations))


@dataclass
class SwarmState:
    """Mutable state of one run; exclusively owned by that run."""

    positions: np.ndarray
    velocities: Optional[np.ndarray]
    personal_best_positions: Optional[np.ndarray]
    personal_best_fitness: Optional[np.ndarray]
    best_position: np.ndarray
    best_fitness: float
    iteration: int
    rng: np.random.Generator
    rejected_moves: int = 0


def _evaluate_all(spec: ObjectiveSpec, positions: np.ndarray) -> np.ndarray:
    if spec.evaluate_batch is not None:
        fitness = np.array(spec.evaluate_batch(positions), dtype=float).reshape(-1)
        if fitness.shape[0] != positions.shape[0]:
            raise ConfigError("evaluate_batch returned a wrong-sized fitness vector")
        return fitness
    return np.array([float(spec.evaluate(row)) for row in positions], dtype=float)


def init_swarm(spec: ObjectiveSpec, cfg: SwarmConfig, seed_points=None) -> SwarmState:
    """Sample the initial swarm uniformly in the box and evaluate it.

    ``seed_points`` optionally overwrites the first rows of the initial
    positions with caller-chosen candidates (clamped to the box); the
    meta-tuner uses this to inject the corners of its search box.
    """
    n, d = cfg.n_particles, spec.dimension
    rng = np.random.default_rng(cfg.seed)
    positions = rng.uniform(spec.lower_bounds, spec.upper_bounds, size=(n, d))
    if seed_points is not None:
        seeds = np.asarray(seed_points, dtype=float)
        if seeds.ndim != 2 or seeds.shape[1] != d or seeds.shape[0] > n:
            raise ConfigError(
                f"seed_points must be at most {n} rows of dimension {d}, got shape {seeds.shape}"
            )
        positions[: seeds.shape[0]] = np.clip(seeds, spec.lower_bounds, spec.upper_bounds)

    fitness = _evaluate_all(spec, positions)
    rejected = int(np.count_nonzero(~np.isfinite(fitness)))
    fitness = np.where(np.isfinite(fitness), fitness, np.inf)

    velocities = np.zeros((n, d)) if cfg.variant in _VELOCITY_VARIANTS else None
    if cfg.variant in _PERSONAL_BEST_VARIANTS:
        pb_positions = positions.copy()
        pb_fitness = fitness.copy()
    else:
        pb_positions = None
        pb_fitness = None

    best = int(np.argmin(fitness))
    return SwarmState(
        positions=positions,
        velocities=velocities,
        personal_best_positions=pb_positions,
        personal_best_fitness=pb_fitness,
        best_position=positions[best].copy(),
        best_fitness=float(fitness[best]),
        iteration=0,
        rng=rng,
        rejected_moves=rejected,
    )


def alpha_at(cfg: SwarmConfig, t: int) -> float:
    """Noise scale at iteration ``t`` (0 <= t <= max_iterations)."""
    if cfg.schedule == "exponential_decay":
        return cfg.alpha0 * math.exp(-cfg.gamma * t)
    if cfg.schedule == "geometric_decay":
        return cfg.alpha0 * cfg.gamma**t
    return cfg.alpha0


def step(state: SwarmState, spec: ObjectiveSpec, cfg: SwarmConfig) -> SwarmState:
    """Advance the swarm one iteration in place and return it.

    Moves whose fitness evaluates non-finite are rejected: the particle's
    position is reverted and the event counted in ``rejected_moves``.
    The incumbent best never worsens.
    """
    if state.iteration >= cfg.max_iterations:
        raise ConfigError(
            f"iteration budget exhausted ({state.iteration} >= {cfg.max_iterations})"
        )
    n, d = state.positions.shape
    alpha = alpha_at(cfg, state.iteration)
    span = spec.span
    old_positions = state.positions
    gbest = state.best_position

    if cfg.variant == "apso_single_step":
        noise = state.rng.standard_normal((n, d))
        new_positions = (1.0 - cfg.beta) * old_positions + cfg.beta * gbest
        new_positions += alpha * span * noise
    elif cfg.variant == "apso_velocity":
        noise = state.rng.standard_normal((n, d))
        state.velocities = (
            state.velocities + alpha * span * noise + cfg.beta * (gbest - old_positions)
        )
        new_positions = old_positions + state.velocities
    else:
        eps1 = state.rng.random((n, d))
        eps2 = state.rng.random((n, d))
        inertia = cfg.theta if cfg.variant == "pso_inertia" else 1.0
        state.velocities = (
            inertia * state.velocities
            + alpha * eps1 * (gbest - old_positions)
            + cfg.beta * eps2 * (state.personal_best_positions - old_positions)
        )
        new_positions = old_positions + state.velocities

    np.clip(new_positions, spec.lower_bounds, spec.upper_bounds, out=new_positions)
    fitness = _evaluate_all(spec, new_positions)

    bad = ~np.isfinite(fitness)
    if bad.any():
        new_positions[bad] = old_positions[bad]
        fitness[bad] = np.inf
        state.rejected_moves += int(np.count_nonzero(bad))

    state.positions = new_positions
    if state.personal_best_fitness is not None:
        improved = fitness < state.personal_best_fitness
        state.personal_best_positions[improved] = new_positions[improved]
        state.personal_best_fitness[improved] = fitness[improved]

    best = int(np.argmin(fitness))
    if fitness[best] < state.best_fitness:
        state.best_fitness = float(fitness[best])
        state.best_position = new_positions[best].copy()

    state.iteration += 1
    return state


def optimize(
    spec: ObjectiveSpec,
    cfg: SwarmConfig,
    seed_points=None,
    callback: Optional[Callable[[SwarmState], None]] = None,
) -> RunReport:
    """Run ``init_swarm`` plus ``max_iterations`` steps and report the best.

    Total objective evaluations: ``n_particles * (max_iterations + 1)``.
    ``callback`` (if given) is invoked with the state after every step.
    """
    start = time.perf_counter()
    state = init_swarm(spec, cfg, seed_points=seed_points)
    for _ in range(cfg.max_iterations):
        step(state, spec, cfg)
        if callback is not None:
            callback(state)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return RunReport(
        best_position=state.best_position.copy(),
        best_fitness=state.best_fitness,
        evaluations=cfg.n_particles * (cfg.max_iterations + 1),
        elapsed_ms=elapsed_ms,
        seed=cfg.seed,
    )


def with_iterations(cfg: SwarmConfig, max_iterations: int) -> SwarmConfig:
    """Copy of ``cfg`` with a different iteration budget."""
    return replace(cfg, max_iterations=max_iterations)
