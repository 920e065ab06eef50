"""Production-allocation benchmark with a closed-form oracle.

A producer allocates a budget K across n goods with unit costs w_j to
maximize the product-form output q(u) = prod_j u_j^(a_j), where the
exponents a_j are non-negative and sum to one.  The Lagrange stationary
point on the budget plane is available in closed form, which makes the
problem a benchmark with an exact answer: a swarm searches the box
(0, K/w_j]^n, every candidate is projected onto the (optionally noisy)
budget hyperplane, and the objective is the squared residual of the
first-order optimality system, which vanishes exactly at the closed-form
point.  Reported deviation is the mean relative component error against
the noise-free oracle.

The budget noise K -> K(1+beta*eps) models market fluctuation; eps is a
single standard normal draw per run, fixed by the problem seed, so the
feasible set is well-defined throughout a run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError
from .report import RunReport, format_float
from .swarm import ObjectiveSpec, SwarmConfig, geometric_gamma, optimize

# positivity floor for allocations, relative to the uniform-price scale
_FLOOR_RATIO = 1e-9


@dataclass(frozen=True)
class ProductionProblem:
    """Budget-constrained allocation instance.

    ``beta_noise`` scales the budget perturbation; ``seed`` fixes the
    single noise draw of a run.
    """

    alphas: np.ndarray
    weights: np.ndarray
    K: float
    beta_noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if alphas.ndim != 1 or alphas.shape != weights.shape:
            raise ConfigError(
                f"alphas and weights must be equal-length vectors, got shapes "
                f"{alphas.shape} and {weights.shape}"
            )
        if alphas.size < 1:
            raise ConfigError("need at least one good")
        if (alphas < 0).any():
            raise ConfigError("exponents must be non-negative")
        if abs(alphas.sum() - 1.0) > 1e-12:
            raise ConfigError(f"exponents must sum to 1, got {alphas.sum()!r}")
        if not (weights > 0).all():
            raise ConfigError("all costs must be positive")
        if not self.K > 0:
            raise ConfigError(f"budget must be positive, got {self.K}")
        if not 0 <= self.beta_noise < 1:
            raise ConfigError(f"beta_noise must lie in [0, 1), got {self.beta_noise}")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "K", float(self.K))

    @property
    def n(self) -> int:
        return self.alphas.size

    @property
    def floors(self) -> np.ndarray:
        return _FLOOR_RATIO * self.K / self.weights


def utility(p: ProductionProblem, u) -> float:
    """Output q = prod u_j^(a_j), evaluated in log space."""
    u = np.asarray(u, dtype=float)
    if u.shape != (p.n,):
        raise DataError(f"allocation must have length {p.n}, got shape {u.shape}")
    if not (u > 0).all():
        raise DataError("allocations must be strictly positive")
    return float(np.exp(p.alphas @ np.log(u)))


def _utility_rows(p: ProductionProblem, U: np.ndarray) -> np.ndarray:
    return np.exp(np.log(U) @ p.alphas)


def analytic_solution(p: ProductionProblem) -> np.ndarray:
    """Closed-form stationary point of the budget-constrained problem.

    Derived by eliminating the multiplier through the first nonzero
    exponent (the pivot); spends the budget exactly.
    """
    pivot = int(np.argmax(p.alphas > 0))
    a_p, w_p = p.alphas[pivot], p.weights[pivot]
    others = p.alphas.sum() - a_p
    u_pivot = p.K / (w_p * (1.0 + others / a_p))
    u = (w_p * p.alphas) / (p.weights * a_p) * u_pivot
    u[pivot] = u_pivot
    return u


def realized_budget(p: ProductionProblem) -> float:
    """K scaled by the run's noise draw: K(1 + beta*eps), eps ~ N(0,1)."""
    if p.beta_noise == 0.0:
        return p.K
    rng = np.random.default_rng(p.seed)
    while True:  # guard the (practically impossible) non-positive budget
        k = p.K * (1.0 + p.beta_noise * rng.standard_normal())
        if k > 0:
            return float(k)


def project_to_budget(U: np.ndarray, weights: np.ndarray, target: float,
                      floors: np.ndarray) -> np.ndarray:
    """Project rows of U onto the budget plane {w . u = target} radially.

    Each positive point is scaled along its ray through the origin until
    it spends the budget exactly, so the projection of any interior box
    point is itself interior; a Euclidean projection instead pins most
    coordinates to the floor whenever the plane passes near the origin
    corner, which strands the search on cliff edges.  Floors are applied
    afterwards as a positivity safety net.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    scale = target / (U @ weights)
    return np.maximum(U * scale[:, None], floors)


def stationarity_residual(p: ProductionProblem, U: np.ndarray) -> np.ndarray:
    """Squared residual of the first-order system at each row of U.

    With g_j = a_j q / u_j, the optimality conditions are g = -lam * w
    for some multiplier lam; the residual uses the least-squares lam,
    so it is zero exactly at stationary points on the budget plane.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    q = _utility_rows(p, U)
    g = q[:, None] * p.alphas / U
    lam = -(g @ p.weights) / (p.weights @ p.weights)
    r = g + lam[:, None] * p.weights
    return np.einsum("ij,ij->i", r, r)


def mean_relative_deviation(u: np.ndarray, u_star: np.ndarray) -> float:
    return float(np.mean(np.abs(u - u_star) / u_star))


def solve_numerically(p: ProductionProblem, cfg: SwarmConfig) -> RunReport:
    """Swarm-search the allocation; report deviation from the oracle.

    Candidates are projected onto the realized-budget plane before
    scoring, so every evaluated point is feasible; the returned
    best_position is the projected allocation.
    """
    if (p.alphas == 0).any():
        raise ConfigError("numerical benchmark requires strictly positive exponents")
    target = realized_budget(p)
    floors = p.floors
    weights = p.weights

    def evaluate_batch(X: np.ndarray) -> np.ndarray:
        return stationarity_residual(p, project_to_budget(X, weights, target, floors))

    spec = ObjectiveSpec(
        dimension=p.n,
        lower_bounds=floors,
        upper_bounds=p.K / weights,
        evaluate=lambda x: float(evaluate_batch(x[None, :])[0]),
        evaluate_batch=evaluate_batch,
    )
    report = optimize(spec, cfg)
    best = project_to_budget(report.best_position[None, :], weights, target, floors)[0]
    u_star = analytic_solution(p)
    return RunReport(
        best_position=best,
        best_fitness=report.best_fitness,
        evaluations=report.evaluations,
        elapsed_ms=report.elapsed_ms,
        seed=report.seed,
        deviation=mean_relative_deviation(best, u_star),
    )


def make_random_problem(n: int, instance_seed: int, beta_noise: float = 0.0,
                        K: float = 100.0) -> ProductionProblem:
    """Deterministic random instance: Dirichlet exponents, costs in [1, 3].

    Dirichlet concentration 5 keeps every exponent comfortably away
    from zero so relative deviations stay well-conditioned.
    """
    rng = np.random.default_rng(instance_seed)
    alphas = rng.dirichlet(np.full(n, 5.0))
    alphas = alphas / alphas.sum()  # exact renormalization to machine precision
    weights = rng.uniform(1.0, 3.0, size=n)
    return ProductionProblem(alphas=alphas, weights=weights, K=K, beta_noise=beta_noise)


@dataclass(frozen=True)
class CobbRow:
    n: int
    iterations: int
    mean_deviation: float
    seeds: int
    elapsed_ms: float

    def to_record(self) -> dict:
        return {
            "n": str(self.n),
            "iterations": str(self.iterations),
            "mean_deviation": format_float(self.mean_deviation),
            "seeds": str(self.seeds),
            "elapsed_ms": format_float(self.elapsed_ms),
        }


DEFAULT_ROWS = ((10, 1000), (20, 5000), (50, 5000), (50, 15000))


def benchmark_table(rows=DEFAULT_ROWS, n_seeds: int = 50, beta_noise: float = 0.01,
                    n_particles: int = 25, base_seed: int = 0) -> list:
    """Mean deviation per (n, iterations) row over ``n_seeds`` runs.

    One fixed instance per problem size (derived from n); each run gets
    its own noise draw and swarm seed.  The noise-decay rate is scaled
    to the iteration budget so longer runs keep refining.
    """
    out = []
    for n, iterations in rows:
        instance = make_random_problem(n, instance_seed=1000 + n, beta_noise=beta_noise)
        start = time.perf_counter()
        deviations = []
        for run in range(n_seeds):
            seed = base_seed + run
            problem = replace(instance, seed=seed)
            cfg = SwarmConfig(
                n_particles=n_particles,
                max_iterations=iterations,
                gamma=geometric_gamma(iterations),
                seed=seed,
            )
            deviations.append(solve_numerically(problem, cfg).deviation)
        out.append(CobbRow(
            n=n,
            iterations=iterations,
            mean_deviation=float(np.mean(deviations)),
            seeds=n_seeds,
            elapsed_ms=(time.perf_counter() - start) * 1000.0,
        ))
    return out


def format_table(rows) -> str:
    lines = [f"{'n':>4} {'iterations':>11} {'mean_deviation':>15} {'seeds':>6}"]
    for r in rows:
        lines.append(f"{r.n:>4} {r.iterations:>11} {r.mean_deviation:>15.6f} {r.seeds:>6}")
    return "\n".join(lines) + "\n"
