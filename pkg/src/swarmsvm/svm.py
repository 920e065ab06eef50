"""Binary soft-margin SVM trained by solving its dual quadratic program.

The dual is

    maximize  W(a) = sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t.      0 <= a_i <= C,   sum_i a_i y_i = 0.

Training uses two-variable coordinate ascent on the maximal violating
pair: the pair of indices whose gradient entries certify the largest
first-order optimality violation.  The maintained gradient is

    g_i = dW/da_i = 1 - y_i sum_j y_j a_j K_ij,

and the violation measure is m - M with m = max over the "can increase"
set of y_i g_i and M = min over the "can decrease" set.  m - M <= tol is
the stopping rule; any bias in [M, m] then satisfies every margin
condition within tol.

``brute_force_dual`` solves the same program by accelerated projected
gradient ascent with an exact projection onto the feasible set, giving
an independent oracle for small instances.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, ConvergenceError, DataError, ParseError
from .report import format_float

KERNEL_KINDS = ("linear", "polynomial", "tanh", "rbf")

# boundary snap width for dual coefficients, relative to max(1, C)
_SNAP = 1e-12


@dataclass(frozen=True)
class Dataset:
    """Labeled points for binary classification, labels in {-1, +1}."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        labels = np.asarray(self.labels, dtype=float)
        if points.ndim != 2:
            raise DataError(f"points must be a 2D matrix, got shape {points.shape}")
        n = points.shape[0]
        if labels.shape != (n,):
            raise DataError(
                f"labels must be a length-{n} vector, got shape {labels.shape}"
            )
        if n < 2:
            raise DataError(f"need at least 2 points, got {n}")
        if not np.isfinite(points).all():
            raise DataError("points contain non-finite values")
        if not np.isin(labels, (-1.0, 1.0)).all():
            raise DataError("labels must be -1 or +1")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class KernelSpec:
    """One of four kernel families.

    kind        parameters
    ----        ----------
    linear      none
    polynomial  degree (positive integer), homogeneous (x . x')^degree
    tanh        k_scale, theta_offset:  tanh(k_scale * (x . x') + theta_offset)
    rbf         gamma > 0:  exp(-gamma * ||x - x'||^2), gamma = 1 / (2 sigma^2)
    """

    kind: str
    degree: int = 1
    k_scale: float = 1.0
    theta_offset: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ConfigError(f"kernel kind must be one of {KERNEL_KINDS}, got {self.kind!r}")
        if self.kind == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise ConfigError(f"polynomial degree must be a positive integer, got {self.degree}")
            object.__setattr__(self, "degree", int(self.degree))
        if self.kind == "rbf" and not self.gamma > 0:
            raise ConfigError(f"rbf gamma must be positive, got {self.gamma}")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls(kind="linear")

    @classmethod
    def polynomial(cls, degree: int) -> "KernelSpec":
        return cls(kind="polynomial", degree=degree)

    @classmethod
    def tanh_kernel(cls, k_scale: float, theta_offset: float) -> "KernelSpec":
        return cls(kind="tanh", k_scale=k_scale, theta_offset=theta_offset)

    @classmethod
    def rbf(cls, gamma: float) -> "KernelSpec":
        return cls(kind="rbf", gamma=gamma)

    def describe(self) -> str:
        if self.kind == "polynomial":
            return f"polynomial degree={self.degree}"
        if self.kind == "tanh":
            return f"tanh k_scale={self.k_scale} theta_offset={self.theta_offset}"
        if self.kind == "rbf":
            return f"rbf gamma={self.gamma}"
        return "linear"


def kernel_matrix(kernel: KernelSpec, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Kernel values for every pair of rows of X and Z, shape (|X|, |Z|)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if X.shape[1] != Z.shape[1]:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs {Z.shape[1]}")
    dots = X @ Z.T
    if kernel.kind == "linear":
        return dots
    if kernel.kind == "polynomial":
        return dots**kernel.degree
    if kernel.kind == "tanh":
        return np.tanh(kernel.k_scale * dots + kernel.theta_offset)
    # rbf: squared distances can go slightly negative in float, clamp
    sq = np.sum(X * X, axis=1)[:, None] + np.sum(Z * Z, axis=1)[None, :] - 2.0 * dots
    np.maximum(sq, 0.0, out=sq)
    K = np.exp(-kernel.gamma * sq)
    if Z is X:  # self-Gram: the diagonal is exactly 1 by definition
        np.fill_diagonal(K, 1.0)
    return K


def kernel_eval(kernel: KernelSpec, x: np.ndarray, z: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if x.shape != z.shape:
        raise DataError(f"dimension mismatch: {x.shape[0]} vs {z.shape[0]}")
    if kernel.kind == "rbf" and np.array_equal(x, z):
        return 1.0
    return float(kernel_matrix(kernel, x[None, :], z[None, :])[0, 0])


class GramCache:
    """Rows of the training Gram matrix, dense for small n, LRU above.

    Dense storage is quadratic; beyond ``dense_limit`` points only
    ``max_rows`` most recently used rows are kept.
    """

    def __init__(self, kernel: KernelSpec, points: np.ndarray,
                 dense_limit: int = 4096, max_rows: int = 512):
        self.kernel = kernel
        self.points = points
        n = points.shape[0]
        self.n = n
        self.dense = n <= dense_limit
        if self.dense:
            self.K = kernel_matrix(kernel, points, points)
            self._rows = None
        else:
            self.K = None
            self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
            self.max_rows = max(2, max_rows)

    def row(self, i: int) -> np.ndarray:
        if self.dense:
            return self.K[i]
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        row = kernel_matrix(self.kernel, self.points[i][None, :], self.points)[0]
        if self.kernel.kind == "rbf":
            row[i] = 1.0
        self._rows[i] = row
        if len(self._rows) > self.max_rows:
            self._rows.popitem(last=False)
        return row


@dataclass(frozen=True)
class TrainDiagnostics:
    iterations: int
    residual: float
    dual_objective: float
    n_support: int


@dataclass(frozen=True)
class SvmModel:
    """Trained classifier: only points with nonzero dual coefficient are kept.

    ``dual_weights[i]`` holds a_i * y_i for support point i, so the label of
    each support vector is the sign of its weight and a_i its magnitude.
    ``support_indices`` maps support rows back to the training set and is
    not serialized.
    """

    support_points: np.ndarray
    dual_weights: np.ndarray
    bias: float
    kernel: KernelSpec
    C: float
    support_indices: Optional[np.ndarray] = field(default=None, compare=False)
    diagnostics: Optional[TrainDiagnostics] = field(default=None, compare=False, repr=False)

    @property
    def n_support(self) -> int:
        return self.support_points.shape[0]

    @property
    def d(self) -> int:
        return self.support_points.shape[1]


def decision_values(model: SvmModel, X: np.ndarray) -> np.ndarray:
    """Pre-sign decision values for each row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if model.n_support == 0:
        return np.full(X.shape[0], model.bias)
    if X.shape[1] != model.d:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs model dimension {model.d}")
    return kernel_matrix(model.kernel, X, model.support_points) @ model.dual_weights + model.bias


def decision_value(model: SvmModel, x: np.ndarray) -> float:
    return float(decision_values(model, np.asarray(x, dtype=float)[None, :])[0])


def predict_batch(model: SvmModel, X: np.ndarray) -> np.ndarray:
    # sign convention: the boundary itself is labeled +1
    return np.where(decision_values(model, X) >= 0.0, 1.0, -1.0)


def predict(model: SvmModel, x: np.ndarray) -> float:
    return float(predict_batch(model, np.asarray(x, dtype=float)[None, :])[0])


def dual_objective(alpha: np.ndarray, data: Dataset, kernel: KernelSpec) -> float:
    """W(a) computed densely from scratch; for oracles and small checks."""
    alpha = np.asarray(alpha, dtype=float)
    K = kernel_matrix(kernel, data.points, data.points)
    ay = alpha * data.labels
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def train(data: Dataset, kernel: KernelSpec, C: float, tol: float = 1e-3,
          max_passes: int = 10_000) -> SvmModel:
    """Solve the dual to tolerance ``tol`` and package the support vectors.

    ``max_passes`` bounds the work: one pass is n pair updates.  Running
    out raises a convergence error carrying the remaining violation.
    """
    if not C > 0:
        raise ConfigError(f"C must be positive, got {C}")
    if not tol > 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    if max_passes < 1:
        raise ConfigError(f"max_passes must be positive, got {max_passes}")
    y = data.labels
    if (y > 0).all() or (y < 0).all():
        raise DataError("training data contains a single class")

    n = data.n
    cache = GramCache(kernel, data.points)
    alpha = np.zeros(n)
    g = np.ones(n)
    pos = y > 0

    budget = max_passes * n
    iterations = 0
    m_val = M_val = 0.0
    for iterations in range(1, budget + 1):
        yg = y * g
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        if not up.any() or not low.any():
            m_val = yg[up].max() if up.any() else -np.inf
            M_val = yg[low].min() if low.any() else np.inf
            break
        yg_up = np.where(up, yg, -np.inf)
        yg_low = np.where(low, yg, np.inf)
        i = int(yg_up.argmax())
        j = int(yg_low.argmin())
        m_val = yg_up[i]
        M_val = yg_low[j]
        if m_val - M_val <= tol:
            break

        K_i = cache.row(i)
        K_j = cache.row(j)
        eta = max(K_i[i] + K_j[j] - 2.0 * K_i[j], 1e-12)
        # transformed coordinates a = y*alpha move by +lam (i) and -lam (j)
        room_i = (C - alpha[i]) if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else (C - alpha[j])
        lam = min(room_i, room_j, (m_val - M_val) / eta)

        if lam == room_i:
            alpha[i] = C if y[i] > 0 else 0.0
        else:
            alpha[i] += y[i] * lam
        if lam == room_j:
            alpha[j] = 0.0 if y[j] > 0 else C
        else:
            alpha[j] -= y[j] * lam
        g += lam * y * (K_j - K_i)
    else:
        raise ConvergenceError(
            f"dual solver did not reach tol={tol} within {max_passes} passes "
            f"(violation {m_val - M_val:.3e})",
            residual=float(m_val - M_val),
        )

    # snap float dust to the exact box boundaries, then restore the
    # equality constraint through a coefficient with slack on both sides
    snap = _SNAP * max(1.0, C)
    alpha[np.abs(alpha) < snap] = 0.0
    alpha[np.abs(alpha - C) < snap] = C
    drift = float(alpha @ y)
    if drift != 0.0:
        free = (alpha > 0) & (alpha < C)
        for k in np.flatnonzero(free):
            fix = np.clip(alpha[k] - y[k] * drift, 0.0, C)
            drift -= y[k] * (alpha[k] - fix)
            alpha[k] = fix
            if drift == 0.0:
                break

    free = (alpha > 0) & (alpha < C)
    if free.any():
        bias = float(np.mean((y * g)[free]))
    elif np.isfinite(m_val) and np.isfinite(M_val):
        bias = float((m_val + M_val) / 2.0)
    else:
        bias = 0.0

    W = float(alpha.sum() - 0.5 * (alpha * (1.0 - g)).sum())
    sv = alpha > 0
    return SvmModel(
        support_points=data.points[sv].copy(),
        dual_weights=(alpha * y)[sv],
        bias=bias,
        kernel=kernel,
        C=float(C),
        support_indices=np.flatnonzero(sv),
        diagnostics=TrainDiagnostics(
            iterations=iterations,
            residual=float(m_val - M_val),
            dual_objective=W,
            n_support=int(sv.sum()),
        ),
    )


@dataclass(frozen=True)
class KktReport:
    """Worst-case residuals of the first-order optimality conditions.

    equality_residual   |sum_i a_i y_i|
    lower_residual      max over a_i = 0 of (1 - y_i f(x_i)), clipped at 0
    free_residual       max over 0 < a_i < C of |y_i f(x_i) - 1|
    upper_residual      max over a_i = C of (y_i f(x_i) - 1), clipped at 0
    """

    equality_residual: float
    lower_residual: float
    free_residual: float
    upper_residual: float
    tol: float
    passed: bool
    violated: tuple

    @property
    def max_residual(self) -> float:
        return max(self.equality_residual, self.lower_residual,
                   self.free_residual, self.upper_residual)


def _alpha_over(data: Dataset, model: SvmModel) -> np.ndarray:
    if model.support_indices is not None:
        idx = np.asarray(model.support_indices)
        if idx.size and (idx.max() >= data.n or idx.min() < 0):
            raise DataError("model support indices do not fit the dataset")
    else:
        # fall back to matching support rows against the data (exact match)
        idx = []
        used = set()
        for p in model.support_points:
            hits = np.flatnonzero((data.points == p).all(axis=1))
            hits = [h for h in hits if h not in used]
            if not hits:
                raise DataError("support point not found in dataset")
            idx.append(hits[0])
            used.add(hits[0])
        idx = np.array(idx, dtype=int)
    alpha = np.zeros(data.n)
    alpha[idx] = np.abs(model.dual_weights)
    return alpha


def verify_kkt(model: SvmModel, data: Dataset, tol: float = 1e-3) -> KktReport:
    """Check the trained model's optimality conditions on its training set."""
    if not tol > 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    alpha = _alpha_over(data, model)
    y = data.labels
    C = model.C
    margins = y * decision_values(model, data.points)

    eq = abs(float(model.dual_weights.sum())) if model.n_support else 0.0
    snap = _SNAP * max(1.0, C)
    at_zero = alpha <= snap
    at_C = alpha >= C - snap
    free = ~at_zero & ~at_C

    lower = float(np.maximum(1.0 - margins[at_zero], 0.0).max()) if at_zero.any() else 0.0
    free_r = float(np.abs(margins[free] - 1.0).max()) if free.any() else 0.0
    upper = float(np.maximum(margins[at_C] - 1.0, 0.0).max()) if at_C.any() else 0.0

    violated = []
    if eq > tol:
        violated.append("dual_equality")
    if lower > tol:
        violated.append("lower_margin")
    if free_r > tol:
        violated.append("free_margin")
    if upper > tol:
        violated.append("upper_margin")
    return KktReport(
        equality_residual=eq,
        lower_residual=lower,
        free_residual=free_r,
        upper_residual=upper,
        tol=tol,
        passed=not violated,
        violated=tuple(violated),
    )


def _project_feasible(v: np.ndarray, y: np.ndarray, C: float) -> np.ndarray:
    """Euclidean projection onto {0 <= a <= C, y . a = 0} by bisection.

    h(mu) = y . clip(v + mu*y, 0, C) is nondecreasing in mu, so the root
    is found by bisection on a bracket wide enough to saturate every
    coordinate.
    """
    span = C + float(np.abs(v).max(initial=0.0)) + 1.0
    lo, hi = -span, span
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if float(y @ np.clip(v + mid * y, 0.0, C)) < 0.0:
            lo = mid
        else:
            hi = mid
    return np.clip(v + 0.5 * (lo + hi) * y, 0.0, C)


def brute_force_dual(data: Dataset, kernel: KernelSpec, C: float,
                     stationarity_tol: float = 1e-6,
                     max_iterations: int = 200_000):
    """Independent dense dual solver for small instances (n <= 50).

    Accelerated projected gradient ascent with restart; returns
    (alpha, objective).  Used to cross-check the pairwise solver.
    """
    if data.n > 50:
        raise DataError(f"brute-force oracle only accepts n <= 50, got {data.n}")
    if not C > 0:
        raise ConfigError(f"C must be positive, got {C}")
    y = data.labels
    K = kernel_matrix(kernel, data.points, data.points)
    Q = (y[:, None] * y[None, :]) * K
    L = float(max(np.linalg.eigvalsh(Q).max(), 1e-12))
    step = 1.0 / L

    alpha = _project_feasible(np.zeros(data.n), y, C)
    momentum = alpha.copy()
    t_prev = 1.0
    last_obj = -np.inf
    residual = float("inf")
    for it in range(max_iterations):
        grad = 1.0 - Q @ momentum
        nxt = _project_feasible(momentum + step * grad, y, C)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_prev * t_prev))
        momentum = nxt + ((t_prev - 1.0) / t_next) * (nxt - alpha)
        alpha, t_prev = nxt, t_next

        if it % 50 == 49:
            obj = float(alpha.sum() - 0.5 * alpha @ Q @ alpha)
            if obj < last_obj:  # restart momentum when it overshoots
                momentum = alpha.copy()
                t_prev = 1.0
            last_obj = obj
            grad_a = 1.0 - Q @ alpha
            residual = float(
                np.abs(alpha - _project_feasible(alpha + step * grad_a, y, C)).max() / step
            )
            if residual <= stationarity_tol:
                return alpha, float(alpha.sum() - 0.5 * alpha @ Q @ alpha)
    raise ConvergenceError(
        f"projected ascent did not reach stationarity {stationarity_tol}",
        residual=residual,
    )


# ------------------------------------------------------------ persistence

_MODEL_HEADER = "svm-model v1"


def dump_model(model: SvmModel) -> str:
    """Flat text form; floats carry 17 significant digits (exact round trip)."""
    lines = [_MODEL_HEADER]
    k = model.kernel
    if k.kind == "linear":
        lines.append("kernel linear")
    elif k.kind == "polynomial":
        lines.append(f"kernel polynomial {k.degree}")
    elif k.kind == "tanh":
        lines.append(f"kernel tanh {format_float(k.k_scale)} {format_float(k.theta_offset)}")
    else:
        lines.append(f"kernel rbf {format_float(k.gamma)}")
    lines.append(f"C {format_float(model.C)}")
    lines.append(f"bias {format_float(model.bias)}")
    lines.append(f"m {model.n_support}")
    lines.append(f"d {model.d}")
    for w, p in zip(model.dual_weights, model.support_points):
        lines.append(" ".join([format_float(w)] + [format_float(c) for c in p]))
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> SvmModel:
    lines = text.splitlines()

    def need(i, what):
        if i >= len(lines):
            raise ParseError(f"model text ended early, expected {what}", line_no=i + 1)
        return lines[i].split()

    if not lines or lines[0].strip() != _MODEL_HEADER:
        raise ParseError(f"expected header {_MODEL_HEADER!r}", line_no=1)
    ktok = need(1, "kernel line")
    try:
        if ktok[0] != "kernel":
            raise ValueError("missing kernel keyword")
        kind = ktok[1]
        if kind == "linear":
            kernel = KernelSpec.linear()
        elif kind == "polynomial":
            kernel = KernelSpec.polynomial(int(ktok[2]))
        elif kind == "tanh":
            kernel = KernelSpec.tanh_kernel(float(ktok[2]), float(ktok[3]))
        elif kind == "rbf":
            kernel = KernelSpec.rbf(float(ktok[2]))
        else:
            raise ValueError(f"unknown kernel kind {kind!r}")
    except (IndexError, ValueError, ConfigError) as exc:
        raise ParseError(f"bad kernel line: {exc}", line_no=2) from exc

    def scalar(i, name, cast):
        tok = need(i, f"{name} line")
        if len(tok) != 2 or tok[0] != name:
            raise ParseError(f"expected '{name} <value>'", line_no=i + 1)
        try:
            return cast(tok[1])
        except ValueError as exc:
            raise ParseError(f"bad {name} value {tok[1]!r}", line_no=i + 1) from exc

    C = scalar(2, "C", float)
    bias = scalar(3, "bias", float)
    m = scalar(4, "m", int)
    d = scalar(5, "d", int)
    if m < 0 or d < 1:
        raise ParseError(f"bad dimensions m={m} d={d}", line_no=5)

    weights = np.empty(m)
    points = np.empty((m, d))
    for r in range(m):
        tok = need(6 + r, f"support row {r + 1}")
        if len(tok) != d + 1:
            raise ParseError(
                f"support row has {len(tok)} fields, expected {d + 1}", line_no=7 + r
            )
        try:
            weights[r] = float(tok[0])
            points[r] = [float(t) for t in tok[1:]]
        except ValueError as exc:
            raise ParseError(f"bad float in support row: {exc}", line_no=7 + r) from exc
    if not C > 0:
        raise ParseError(f"C must be positive, got {C}", line_no=3)
    return SvmModel(support_points=points, dual_weights=weights, bias=bias,
                    kernel=kernel, C=C)


def save_model(model: SvmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_model(model))


def load_model(path) -> SvmModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    return parse_model(text)
