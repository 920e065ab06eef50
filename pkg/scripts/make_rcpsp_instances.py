"""Generate the offline project-scheduling instance files.

Writes src/swarmsvm/data/rcpsp/:

* three hand-sized fixtures (chain3, parallel4, tight2) with known
  makespans,
* five 32-activity single-mode instances (gen30_1..gen30_5) in the
  PSPLIB ``.sm`` text layout, with four renewable resources and
  capacities set between the single-activity maximum and the
  earliest-start peak so resources genuinely bind,
* best_known.txt holding reference makespans: exact values for the
  fixtures, and for the generated instances the best makespan found by
  long multi-seed swarm searches plus random sampling (documented as
  reference values, not proven optima).

Run from the repository root (takes a few minutes for the reference
searches):

    python3 scripts/make_rcpsp_instances.py
"""

from __future__ import annotations

import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from swarmsvm.rcpsp import budget_config, decode_priorities, parse_psplib, solve
from swarmsvm.swarm import SwarmConfig

SEED = 7_2024
N_INSTANCES = 5
J_REAL = 30
N_RESOURCES = 4
RESOURCE_STRENGTH = 0.35

REFERENCE_BUDGET = 20_000
REFERENCE_SEEDS = 8
RANDOM_SAMPLES = 20_000


def psplib_text(name, durations, successors, demands, capacities, horizon):
    """Render one single-mode instance in the .sm layout."""
    J = len(durations)
    sep = "*" * 72
    out = [sep,
           f"file with basedata            : {name}.bas",
           f"initial value random generator: {SEED}",
           sep,
           "projects                      :  1",
           f"jobs (incl. supersource/sink ):  {J}",
           f"horizon                       :  {horizon}",
           "RESOURCES",
           f"  - renewable                 :  {N_RESOURCES}   R",
           "  - nonrenewable              :  0   N",
           "  - doubly constrained        :  0   D",
           sep,
           "PROJECT INFORMATION:",
           "pronr.  #jobs rel.date duedate tardcost  MPM-Time",
           f"    1     {J - 2}      0       {horizon}       0       {horizon}",
           sep,
           "PRECEDENCE RELATIONS:",
           "jobnr.    #modes  #successors   successors"]
    for j in range(J):
        succ = successors[j]
        succ_txt = "  ".join(f"{s + 1:>4}" for s in succ)
        out.append(f"{j + 1:>4}        1          {len(succ)}        {succ_txt}".rstrip())
    out.append(sep)
    out.append("REQUESTS/DURATIONS:")
    header = "jobnr. mode duration" + "".join(f"  R {r + 1}" for r in range(N_RESOURCES))
    out.append(header)
    out.append("-" * 72)
    for j in range(J):
        dem = "".join(f"{demands[j][r]:>5}" for r in range(N_RESOURCES))
        out.append(f"{j + 1:>4}{1:>7}{durations[j]:>9} {dem}")
    out.append(sep)
    out.append("RESOURCEAVAILABILITIES:")
    out.append("".join(f"  R {r + 1}" for r in range(N_RESOURCES)))
    out.append("".join(f"{c:>5}" for c in capacities))
    out.append(sep)
    return "\n".join(out) + "\n"


def fixture_text(name, durations, successors, demands, capacities, horizon, n_res=1):
    global N_RESOURCES
    saved = N_RESOURCES
    N_RESOURCES = n_res
    try:
        return psplib_text(name, durations, successors, demands, capacities, horizon)
    finally:
        N_RESOURCES = saved


def make_generated(rng, index):
    J = J_REAL + 2
    durations = [0] + [int(rng.integers(1, 11)) for _ in range(J_REAL)] + [0]

    successors = [[] for _ in range(J)]
    predecessors = [[] for _ in range(J)]
    for k in range(1, J_REAL + 1):  # real activities, topologically numbered
        pool = list(range(1, k))
        if not pool:
            preds = [0]
        else:
            n_preds = int(min(len(pool), rng.integers(1, 4)))
            preds = sorted(rng.choice(pool, size=n_preds, replace=False).tolist())
        for h in preds:
            predecessors[k].append(h)
            successors[h].append(k)
    for k in range(1, J_REAL + 1):
        if not successors[k]:
            successors[k].append(J - 1)
            predecessors[J - 1].append(k)
    successors = [sorted(s) for s in successors]

    demands = [[0] * N_RESOURCES for _ in range(J)]
    for k in range(1, J_REAL + 1):
        while True:
            row = [0 if rng.random() < 0.4 else int(rng.integers(1, 9))
                   for _ in range(N_RESOURCES)]
            if any(row):
                break
        demands[k] = row

    # earliest-start usage peak per resource sets a binding capacity
    ef = [0] * J
    for j in range(J):
        es = max((ef[h] for h in predecessors[j]), default=0)
        ef[j] = es + durations[j]
    horizon_cp = max(ef)
    usage = np.zeros((N_RESOURCES, horizon_cp + 1), dtype=int)
    for j in range(J):
        if durations[j] == 0:
            continue
        start = ef[j] - durations[j]
        for r in range(N_RESOURCES):
            usage[r, start + 1:ef[j] + 1] += demands[j][r]
    capacities = []
    for r in range(N_RESOURCES):
        k_max = max(demands[j][r] for j in range(J))
        peak = int(usage[r].max())
        cap = int(np.ceil(k_max + RESOURCE_STRENGTH * (peak - k_max)))
        capacities.append(max(cap, k_max, 1))

    horizon = sum(durations)
    return psplib_text(f"gen30_{index}", durations, successors, demands,
                       capacities, horizon)


def reference_makespan(path):
    inst = parse_psplib(path)
    best = None
    t0 = time.perf_counter()
    for s in range(REFERENCE_SEEDS):
        cfg = budget_config(SwarmConfig(n_particles=25, seed=1000 + s), REFERENCE_BUDGET)
        rep = solve(inst, cfg, REFERENCE_BUDGET)
        best = rep.best_fitness if best is None else min(best, rep.best_fitness)
    rng = np.random.default_rng(99)
    for _ in range(RANDOM_SAMPLES // 1000):
        block = rng.random((1000, inst.n_activities))
        for row in block:
            ms = decode_priorities(inst, row).makespan
            if ms < best:
                best = ms
    dt = time.perf_counter() - t0
    print(f"  {inst.name}: best {int(best)} cp-bound {inst.critical_path_bound} "
          f"({dt:.0f}s)")
    return int(best)


def main():
    out_dir = os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "src", "swarmsvm", "data", "rcpsp",
    )
    os.makedirs(out_dir, exist_ok=True)

    # chain: 1 -> 2 -> 3 -> 4 -> 5, durations 2,3,4, single ample resource
    chain = fixture_text(
        "chain3", [0, 2, 3, 4, 0], [[1], [2], [3], [4], []],
        [[0], [1], [1], [1], [0]], [10], horizon=9)
    # four independent activities, capacity far above any overlap
    parallel = fixture_text(
        "parallel4", [0, 3, 5, 2, 4, 0],
        [[1, 2, 3, 4], [5], [5], [5], [5], []],
        [[0], [1], [2], [1], [2], [0]], [100], horizon=14)
    # two unit-duration activities on a capacity-1 resource: forced serial
    tight = fixture_text(
        "tight2", [0, 1, 1, 0], [[1, 2], [3], [3], []],
        [[0], [1], [1], [0]], [1], horizon=2)
    for name, text in (("chain3", chain), ("parallel4", parallel), ("tight2", tight)):
        with open(os.path.join(out_dir, f"{name}.sm"), "w", encoding="utf-8") as fh:
            fh.write(text)

    rng = np.random.default_rng(SEED)
    for i in range(1, N_INSTANCES + 1):
        text = make_generated(rng, i)
        with open(os.path.join(out_dir, f"gen30_{i}.sm"), "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote gen30_{i}.sm")

    print("computing reference makespans")
    best_lines = ["# reference makespans: fixtures exact, gen30 from long searches"]
    best_lines.append("chain3 9")
    best_lines.append("parallel4 5")
    best_lines.append("tight2 2")
    for i in range(1, N_INSTANCES + 1):
        best = reference_makespan(os.path.join(out_dir, f"gen30_{i}.sm"))
        best_lines.append(f"gen30_{i} {best}")
    with open(os.path.join(out_dir, "best_known.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(best_lines) + "\n")
    print("wrote best_known.txt")


if __name__ == "__main__":
    main()
