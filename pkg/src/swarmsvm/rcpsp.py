"""Project scheduling benchmark: instance parsing, checking, decoding, search.

Parses single-mode project scheduling instances in the PSPLIB ``.sm``
text layout, computes critical-path time windows, checks schedules
against precedence and resource constraints, decodes priority vectors
into feasible schedules with the serial generation scheme, and searches
priority space with the swarm optimizer.  Deviations are measured
against a sidecar file of best-known makespans (``instance-name
makespan`` per line).

The instance types keep per-mode duration and demand tables so the
checker covers mode choice, but the parser accepts only single-mode
files (one mode per activity), matching the j30-style test set.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .errors import ConfigError, DataError, ParseError
from .report import RunReport, format_float
from .swarm import ObjectiveSpec, SwarmConfig, geometric_gamma, optimize, with_iterations

ENV_DATA_DIR = "SWARMSVM_RCPSP_DIR"
BEST_KNOWN_FILE = "best_known.txt"

SECTION_PRECEDENCE = "PRECEDENCE RELATIONS:"
SECTION_REQUESTS = "REQUESTS/DURATIONS:"
SECTION_AVAILABILITIES = "RESOURCEAVAILABILITIES:"


@dataclass(frozen=True)
class ProjectInstance:
    """Activity-on-node project with dummy source (0) and sink (J-1)."""

    n_activities: int
    durations: tuple          # [j][m] -> periods
    predecessors: tuple       # [j] -> frozenset of activity indices
    successors: tuple         # [j] -> tuple of activity indices
    renewable_capacities: tuple
    nonrenewable_totals: tuple
    renewable_demands: tuple      # [j][m][r] -> units per period
    nonrenewable_demands: tuple   # [j][m][r] -> total units
    horizon: int
    earliest_finish: tuple = ()
    latest_finish: tuple = ()
    name: str = ""

    def __post_init__(self):
        J = self.n_activities
        if J < 2:
            raise DataError(f"need at least source and sink, got {J} activities")
        for tup, label in ((self.durations, "durations"),
                           (self.predecessors, "predecessors"),
                           (self.successors, "successors"),
                           (self.renewable_demands, "renewable demands"),
                           (self.nonrenewable_demands, "nonrenewable demands")):
            if len(tup) != J:
                raise DataError(f"{label} must have {J} entries, got {len(tup)}")
        if self.predecessors[0]:
            raise DataError("dummy source must have no predecessors")
        if self.successors[J - 1]:
            raise DataError("dummy sink must have no successors")
        for j in range(J):
            if not self.durations[j]:
                raise DataError(f"activity {j} has no modes")
            if any(d < 0 for d in self.durations[j]):
                raise DataError(f"activity {j} has a negative duration")
            for m in range(len(self.durations[j])):
                if any(k < 0 for k in self.renewable_demands[j][m]):
                    raise DataError(f"activity {j} has a negative renewable demand")
                if any(k < 0 for k in self.nonrenewable_demands[j][m]):
                    raise DataError(f"activity {j} has a negative nonrenewable demand")
        if any(c < 0 for c in self.renewable_capacities):
            raise DataError("renewable capacities must be non-negative")
        if any(c < 0 for c in self.nonrenewable_totals):
            raise DataError("nonrenewable totals must be non-negative")
        if self.horizon < 0:
            raise DataError("horizon must be non-negative")

        order = topological_order(self.predecessors, self.successors)
        ef, lf = _critical_windows(self, order)
        object.__setattr__(self, "earliest_finish", tuple(int(v) for v in ef))
        object.__setattr__(self, "latest_finish", tuple(int(v) for v in lf))
        for j in range(J):
            if not self.earliest_finish[j] <= self.latest_finish[j] <= self.horizon:
                raise DataError(
                    f"activity {j}: window [{self.earliest_finish[j]}, "
                    f"{self.latest_finish[j]}] incompatible with horizon {self.horizon}")

    @property
    def critical_path_bound(self) -> int:
        return self.earliest_finish[self.n_activities - 1]

    def duration(self, j: int, mode: int = 0) -> int:
        return self.durations[j][mode]


def topological_order(predecessors, successors) -> tuple:
    """Kahn's algorithm; raises on cycles."""
    J = len(predecessors)
    remaining = [len(p) for p in predecessors]
    frontier = [j for j in range(J) if remaining[j] == 0]
    order = []
    while frontier:
        j = frontier.pop()
        order.append(j)
        for h in successors[j]:
            remaining[h] -= 1
            if remaining[h] == 0:
                frontier.append(h)
    if len(order) != J:
        raise DataError("precedence graph contains a cycle")
    return tuple(order)


def _critical_windows(inst: ProjectInstance, order) -> tuple:
    # forward/backward pass with the first mode of each activity
    J = inst.n_activities
    d = [inst.durations[j][0] for j in range(J)]
    ef = [0] * J
    for j in order:
        es = max((ef[h] for h in inst.predecessors[j]), default=0)
        ef[j] = es + d[j]
    lf = [inst.horizon] * J
    for j in reversed(order):
        if inst.successors[j]:
            lf[j] = min(lf[h] - d[h] for h in inst.successors[j])
    return ef, lf


@dataclass(frozen=True)
class Schedule:
    modes: tuple         # chosen mode index per activity
    finish_times: tuple  # finish period per activity

    @property
    def makespan(self) -> int:
        return self.finish_times[-1]


@dataclass(frozen=True)
class Violation:
    kind: str  # assignment, precedence, renewable, nonrenewable
    activity: int = -1
    period: int = -1
    resource: int = -1
    detail: str = ""


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def check_feasible(inst: ProjectInstance, s: Schedule) -> FeasibilityReport:
    """Report every violated constraint; feasible iff none are."""
    J = inst.n_activities
    violations = []
    if len(s.modes) != J or len(s.finish_times) != J:
        violations.append(Violation(
            kind="assignment",
            detail=f"schedule covers {len(s.finish_times)} activities, instance has {J}"))
        return FeasibilityReport(feasible=False, violations=tuple(violations))

    for j in range(J):
        m = s.modes[j]
        if not 0 <= m < len(inst.durations[j]):
            violations.append(Violation(kind="assignment", activity=j,
                                        detail=f"mode {m} out of range"))
            continue
        start = s.finish_times[j] - inst.durations[j][m]
        if start < 0 or s.finish_times[j] > inst.horizon:
            violations.append(Violation(kind="assignment", activity=j,
                                        detail=f"finish {s.finish_times[j]} outside [d, horizon]"))
    if violations:
        return FeasibilityReport(feasible=False, violations=tuple(violations))

    for j in range(J):
        start_j = s.finish_times[j] - inst.durations[j][s.modes[j]]
        for h in inst.predecessors[j]:
            if s.finish_times[h] > start_j:
                violations.append(Violation(
                    kind="precedence", activity=j,
                    detail=f"predecessor {h} finishes at {s.finish_times[h]}, "
                           f"activity {j} starts at {start_j}"))

    R = len(inst.renewable_capacities)
    if R:
        usage = np.zeros((R, inst.horizon + 1), dtype=int)
        for j in range(J):
            m = s.modes[j]
            d = inst.durations[j][m]
            if d == 0:
                continue
            start = s.finish_times[j] - d
            demand = inst.renewable_demands[j][m]
            for r in range(R):
                usage[r, start + 1:s.finish_times[j] + 1] += demand[r]
        for r in range(R):
            for p in np.flatnonzero(usage[r] > inst.renewable_capacities[r]):
                violations.append(Violation(
                    kind="renewable", period=int(p), resource=r,
                    detail=f"usage {int(usage[r, p])} exceeds capacity "
                           f"{inst.renewable_capacities[r]}"))

    for r in range(len(inst.nonrenewable_totals)):
        total = sum(inst.nonrenewable_demands[j][s.modes[j]][r] for j in range(J))
        if total > inst.nonrenewable_totals[r]:
            violations.append(Violation(
                kind="nonrenewable", resource=r,
                detail=f"total {total} exceeds {inst.nonrenewable_totals[r]}"))

    return FeasibilityReport(feasible=not violations, violations=tuple(violations))


def decode_priorities(inst: ProjectInstance, priorities) -> Schedule:
    """Serial generation: highest priority eligible activity first.

    Ties break toward the lower activity index, and each pick starts at
    the earliest period where every renewable resource has capacity for
    its whole duration, so the output is feasible by construction.
    """
    pri = np.asarray(priorities, dtype=float)
    if pri.shape != (inst.n_activities,):
        raise ConfigError(
            f"priorities must have length {inst.n_activities}, got shape {pri.shape}")
    if not np.all(np.isfinite(pri)):
        raise ConfigError("priorities must be finite")

    # plain lists beat numpy here: the arrays are tiny and this routine is
    # the hot path of every budgeted search
    J = inst.n_activities
    horizon = inst.horizon
    p = pri.tolist()
    durations = [inst.durations[j][0] for j in range(J)]
    nonzero_dem = [
        [(r, dem) for r, dem in enumerate(inst.renewable_demands[j][0]) if dem > 0]
        for j in range(J)
    ]
    avail = [[c] * (horizon + 1) for c in inst.renewable_capacities]
    finish = [-1] * J
    preds_left = [len(inst.predecessors[j]) for j in range(J)]
    eligible = [j for j in range(J) if preds_left[j] == 0]

    for _ in range(J):
        j = min(eligible, key=lambda k: (-p[k], k))  # highest priority, lowest index
        eligible.remove(j)
        est = 0
        for h in inst.predecessors[j]:
            f = finish[h]
            if f > est:
                est = f
        d = durations[j]
        dem = nonzero_dem[j]
        t = est
        if d > 0 and dem:
            # scan starts from est; a violating period q blocks every start
            # below q, so jump straight past the last one in the window
            while True:
                if t + d > horizon:
                    raise DataError(f"no feasible start for activity {j} "
                                    f"within horizon {horizon}")
                last_bad = -1
                for r, dr in dem:
                    row = avail[r]
                    for q in range(t + d, t, -1):
                        if row[q] < dr:
                            off = q - t - 1
                            if off > last_bad:
                                last_bad = off
                            break
                if last_bad < 0:
                    break
                t += last_bad + 1
            for r, dr in dem:
                row = avail[r]
                for q in range(t + 1, t + d + 1):
                    row[q] -= dr
        if t + d > horizon:
            raise DataError(
                f"activity {j} would finish at {t + d}, beyond horizon {horizon}")
        finish[j] = t + d
        for h in inst.successors[j]:
            preds_left[h] -= 1
            if preds_left[h] == 0:
                eligible.append(h)

    return Schedule(modes=(0,) * J, finish_times=tuple(finish))


# ---------------------------------------------------------------------------
# PSPLIB-format parsing


def _first_int(text: str, line_no: int) -> int:
    for token in text.replace(":", " ").split():
        try:
            return int(token)
        except ValueError:
            continue
    raise ParseError(f"expected an integer on line {line_no}: {text!r}", line_no=line_no)


def _section_start(lines, header: str) -> int:
    for i, line in enumerate(lines):
        if line.strip() == header:
            return i
    raise ParseError(f"missing section header {header!r}", line_no=0)


def parse_psplib(path) -> ProjectInstance:
    """Parse a single-mode ``.sm`` instance file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    J = horizon = n_renew = n_nonrenew = None
    for i, line in enumerate(lines):
        lower = line.lower()
        if "jobs (incl." in lower:
            J = _first_int(line, i + 1)
        elif lower.strip().startswith("horizon"):
            horizon = _first_int(line, i + 1)
        elif "- renewable" in lower:
            n_renew = _first_int(line, i + 1)
        elif "- nonrenewable" in lower:
            n_nonrenew = _first_int(line, i + 1)
    if J is None or horizon is None or n_renew is None or n_nonrenew is None:
        raise ParseError("missing jobs/horizon/resource count headers", line_no=0)

    successors = [()] * J
    start = _section_start(lines, SECTION_PRECEDENCE)
    row = start + 2  # skip the column header line
    for j in range(J):
        line_no = row + j + 1
        if row + j >= len(lines):
            raise ParseError(f"precedence section ends after {j} of {J} rows",
                             line_no=line_no)
        tokens = lines[row + j].split()
        if len(tokens) < 3:
            raise ParseError(f"precedence row needs jobnr/#modes/#successors",
                             line_no=line_no)
        try:
            jobnr, n_modes, n_succ = int(tokens[0]), int(tokens[1]), int(tokens[2])
            succ = [int(t) for t in tokens[3:]]
        except ValueError as exc:
            raise ParseError(f"non-integer token in precedence row: {exc}",
                             line_no=line_no) from exc
        if jobnr != j + 1:
            raise ParseError(f"expected job {j + 1}, found {jobnr}", line_no=line_no)
        if n_modes != 1:
            raise ParseError(f"job {jobnr} declares {n_modes} modes; only "
                             f"single-mode instances are supported", line_no=line_no)
        if len(succ) != n_succ:
            raise ParseError(f"job {jobnr} declares {n_succ} successors, "
                             f"lists {len(succ)}", line_no=line_no)
        if any(not 1 <= s <= J for s in succ):
            raise ParseError(f"job {jobnr} lists a successor outside 1..{J}",
                             line_no=line_no)
        successors[j] = tuple(s - 1 for s in succ)

    durations = [None] * J
    renew_demands = [None] * J
    nonrenew_demands = [None] * J
    start = _section_start(lines, SECTION_REQUESTS)
    row = start + 2  # skip the column header line
    while row < len(lines) and set(lines[row].strip()) <= {"-"}:
        row += 1  # optional dashed rule under the header
    for j in range(J):
        line_no = row + j + 1
        if row + j >= len(lines):
            raise ParseError(f"requests section ends after {j} of {J} rows",
                             line_no=line_no)
        tokens = lines[row + j].split()
        expected = 3 + n_renew + n_nonrenew
        if len(tokens) != expected:
            raise ParseError(f"requests row needs {expected} fields, got {len(tokens)}",
                             line_no=line_no)
        try:
            values = [int(t) for t in tokens]
        except ValueError as exc:
            raise ParseError(f"non-integer token in requests row: {exc}",
                             line_no=line_no) from exc
        jobnr, mode, dur = values[0], values[1], values[2]
        if jobnr != j + 1:
            raise ParseError(f"expected job {j + 1}, found {jobnr}", line_no=line_no)
        if mode != 1:
            raise ParseError(f"job {jobnr} uses mode {mode}; only mode 1 is supported",
                             line_no=line_no)
        durations[j] = (dur,)
        renew_demands[j] = (tuple(values[3:3 + n_renew]),)
        nonrenew_demands[j] = (tuple(values[3 + n_renew:]),)

    start = _section_start(lines, SECTION_AVAILABILITIES)
    data_idx = start + 2  # the line after the resource-name header
    if data_idx >= len(lines):
        raise ParseError("availability section has no data row", line_no=start + 1)
    tokens = lines[data_idx].split()
    try:
        avail_values = [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"non-integer availability: {exc}",
                         line_no=data_idx + 1) from exc
    if len(avail_values) != n_renew + n_nonrenew:
        raise ParseError(f"expected {n_renew + n_nonrenew} availabilities, "
                         f"got {len(avail_values)}", line_no=data_idx + 1)

    predecessors = [set() for _ in range(J)]
    for j in range(J):
        for h in successors[j]:
            predecessors[h].add(j)

    return ProjectInstance(
        n_activities=J,
        durations=tuple(durations),
        predecessors=tuple(frozenset(p) for p in predecessors),
        successors=tuple(successors),
        renewable_capacities=tuple(avail_values[:n_renew]),
        nonrenewable_totals=tuple(avail_values[n_renew:]),
        renewable_demands=tuple(renew_demands),
        nonrenewable_demands=tuple(nonrenew_demands),
        horizon=horizon,
        name=os.path.splitext(os.path.basename(str(path)))[0],
    )


def read_best_known(path) -> dict:
    """Sidecar of reference makespans: one ``name value`` pair per line."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    out = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 'name makespan', got {line!r}", line_no=line_no)
        try:
            out[tokens[0]] = int(tokens[1])
        except ValueError as exc:
            raise ParseError(f"bad makespan {tokens[1]!r}", line_no=line_no) from exc
    return out


# ---------------------------------------------------------------------------
# Swarm search over priority vectors


def budget_iterations(cfg: SwarmConfig, schedule_budget: int) -> int:
    """Largest iteration count whose decode total stays within budget."""
    if schedule_budget < 2 * cfg.n_particles:
        raise ConfigError(
            f"schedule budget {schedule_budget} allows no search sweep with "
            f"{cfg.n_particles} particles")
    return schedule_budget // cfg.n_particles - 1


def solve(inst: ProjectInstance, cfg: SwarmConfig, schedule_budget: int,
          best_known: float = None) -> RunReport:
    """Minimize decoded makespan; decode count stays within the budget.

    The iteration count is derived from the budget, so cfg.max_iterations
    is ignored.  RunReport.best_fitness is the makespan and deviation the
    relative gap to best_known when one is supplied.
    """
    iterations = budget_iterations(cfg, schedule_budget)
    run_cfg = with_iterations(cfg, iterations)

    spec = ObjectiveSpec(
        dimension=inst.n_activities,
        lower_bounds=np.zeros(inst.n_activities),
        upper_bounds=np.ones(inst.n_activities),
        evaluate=lambda p: float(decode_priorities(inst, p).makespan),
    )
    report = optimize(spec, run_cfg)
    deviation = None
    if best_known is not None:
        if best_known <= 0:
            raise ConfigError(f"best-known makespan must be positive, got {best_known}")
        deviation = (report.best_fitness - best_known) / best_known
    return replace(report, deviation=deviation)


def budget_config(cfg: SwarmConfig, schedule_budget: int) -> SwarmConfig:
    """Scale the noise decay to the iteration count the budget implies."""
    if cfg.schedule != "geometric_decay":
        return cfg
    return replace(cfg, gamma=geometric_gamma(max(budget_iterations(cfg, schedule_budget), 1)))


# ---------------------------------------------------------------------------
# Benchmark driver


def resolve_data_dir(data_dir=None) -> str:
    if data_dir is not None:
        return str(data_dir)
    env = os.environ.get(ENV_DATA_DIR)
    if env:
        return env
    return str(resources.files("swarmsvm").joinpath("data", "rcpsp"))


def load_instances(data_dir=None, pattern: str = "gen30_") -> tuple:
    """Instances whose file name starts with the pattern, plus best-knowns."""
    base = resolve_data_dir(data_dir)
    try:
        names = sorted(os.listdir(base))
    except OSError as exc:
        raise DataError(f"cannot list {base}: {exc}") from exc
    instances = [parse_psplib(os.path.join(base, n))
                 for n in names if n.startswith(pattern) and n.endswith(".sm")]
    if not instances:
        raise DataError(f"no {pattern}*.sm instances under {base}")
    best_known = read_best_known(os.path.join(base, BEST_KNOWN_FILE))
    missing = [i.name for i in instances if i.name not in best_known]
    if missing:
        raise DataError(f"best-known file lacks entries for: {', '.join(missing)}")
    return tuple(instances), best_known


@dataclass(frozen=True)
class RcpspRow:
    budget: int
    mean_deviation_pct: float
    seeds: int
    instances: int

    def to_record(self) -> dict:
        return {
            "budget": str(self.budget),
            "mean_deviation_pct": format_float(self.mean_deviation_pct),
            "seeds": str(self.seeds),
            "instances": str(self.instances),
        }


def benchmark_table(budgets=(1000, 5000), n_seeds: int = 20, base_seed: int = 0,
                    n_particles: int = 25, data_dir=None) -> list:
    """Mean percentage deviation from best-known per schedule budget."""
    instances, best_known = load_instances(data_dir)
    rows = []
    for budget in budgets:
        devs = []
        for inst in instances:
            for s in range(n_seeds):
                cfg = budget_config(
                    SwarmConfig(n_particles=n_particles, seed=base_seed + s), budget)
                rep = solve(inst, cfg, budget, best_known=best_known[inst.name])
                devs.append(rep.deviation)
        rows.append(RcpspRow(
            budget=budget,
            mean_deviation_pct=100.0 * float(np.mean(devs)),
            seeds=n_seeds,
            instances=len(instances),
        ))
    return rows


def format_table(rows) -> str:
    lines = [f"{'budget':>8} {'mean_deviation_pct':>19} {'seeds':>6} {'instances':>10}"]
    for r in rows:
        lines.append(f"{r.budget:>8} {r.mean_deviation_pct:>19.3f} "
                     f"{r.seeds:>6} {r.instances:>10}")
    return "\n".join(lines) + "\n"
