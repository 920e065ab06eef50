"""Command-line entry point dispatching the optimizer, SVM, and benchmarks.

One subcommand per task.  Every run prints a banner to stderr echoing
the resolved configuration and seed, writes machine-readable output
(``records``: one ``key=value`` line per record; ``table``: aligned
columns) to stdout or ``--out``, and exits with a category-specific
code on failure: 2 usage, 3 configuration, 4 data, 5 convergence.
Timing lives in its own ``elapsed_ms`` key so determinism checks can
drop it.  Relative paths inside a config file resolve against the
config file's directory.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import adult as adult_mod
from . import cobb_douglas as cobb_mod
from . import rcpsp as rcpsp_mod
from .config import ConfigView, read_config
from .errors import ConfigError, DataError, ParseError, SwarmSvmError
from .report import format_float, format_record
from .svm import Dataset, KernelSpec, load_model, predict, save_model, train
from .swarm import ObjectiveSpec, SwarmConfig, optimize, swarm_config_from_mapping
from .tuning import TunerConfig, tune

EXIT_OK = 0
EXIT_USAGE = 2  # argparse default
EXIT_CONFIG = 3
EXIT_DATA = 4
EXIT_CONVERGENCE = 5

_CATEGORY_EXIT = {"config": EXIT_CONFIG, "data": EXIT_DATA,
                  "convergence": EXIT_CONVERGENCE}


def _sphere(x):
    return float(np.sum(x * x))


def _rastrigin(x):
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def _rosenbrock(x):
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


OBJECTIVES = {"sphere": _sphere, "rastrigin": _rastrigin, "rosenbrock": _rosenbrock}


def load_view(config_path) -> ConfigView:
    if config_path is None:
        raise ConfigError("this subcommand requires --config")
    return ConfigView(read_config(config_path), source=str(config_path))


def resolve_path(view: ConfigView, key: str, default=None):
    """Config-relative resolution for input paths named in a config.

    Output paths (files a run creates) are taken as written instead, so
    runs driven by bundled configs write into the working directory.
    """
    if not view.has(key):
        if default is None:
            raise ConfigError(f"{view.source}: missing required key {key!r}")
        return default
    raw = view.get_str(key)
    if os.path.isabs(raw):
        return raw
    return os.path.normpath(os.path.join(os.path.dirname(view.source), raw))


def resolved_seed(args, view) -> int:
    """--seed wins over the config key; default 0."""
    if args.seed is not None:
        return args.seed
    if view is not None and view.has("seed"):
        return view.get_int("seed")
    return 0


def swarm_from(view: ConfigView, seed: int) -> SwarmConfig:
    return replace(swarm_config_from_mapping(view), seed=seed)


def read_labeled_points(path) -> Dataset:
    """Rows of ``label x1 .. xd``; builds a training dataset."""
    rows = _read_numeric_rows(path)
    if any(len(r) < 2 for r in rows):
        raise DataError(f"{path}: each row needs a label and at least one coordinate")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataError(f"{path}: inconsistent row widths")
    arr = np.array(rows)
    return Dataset(points=arr[:, 1:], labels=arr[:, 0])


def read_points(path) -> np.ndarray:
    """Rows of ``x1 .. xd`` for prediction."""
    rows = _read_numeric_rows(path)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataError(f"{path}: inconsistent row widths")
    return np.array(rows)


def _read_numeric_rows(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(t) for t in line.split()])
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line_no=line_no) from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def kernel_from(view: ConfigView) -> KernelSpec:
    kind = view.get_choice("kernel", ("linear", "polynomial", "tanh", "rbf"),
                           default="rbf")
    if kind == "linear":
        return KernelSpec.linear()
    if kind == "polynomial":
        return KernelSpec.polynomial(view.get_int("degree", default=2))
    if kind == "tanh":
        return KernelSpec.tanh_kernel(view.get_float("tanh_scale", default=1.0),
                                      view.get_float("tanh_offset", default=0.0))
    return KernelSpec.rbf(view.get_float("gamma_kernel", default=0.5))


# ---------------------------------------------------------------------------
# subcommand handlers: each returns a list of flat record dicts


def cmd_optimize(args, view, seed):
    name = view.get_choice("objective", tuple(sorted(OBJECTIVES)))
    dimension = view.get_int("dimension")
    lower = view.get_float("lower")
    upper = view.get_float("upper")
    spec = ObjectiveSpec(
        dimension=dimension,
        lower_bounds=np.full(dimension, lower),
        upper_bounds=np.full(dimension, upper),
        evaluate=OBJECTIVES[name],
    )
    report = optimize(spec, swarm_from(view, seed))
    return [report.to_record()]


def cmd_svm_train(args, view, seed):
    data = read_labeled_points(resolve_path(view, "train_path"))
    model = train(
        data,
        kernel_from(view),
        C=view.get_float("C", default=1.0),
        tol=view.get_float("tol", default=1e-3),
        max_passes=view.get_int("max_passes", default=10_000),
    )
    model_path = view.get_str("model_path")  # output: taken as written
    save_model(model, model_path)
    d = model.diagnostics
    return [{
        "model_path": str(model_path),
        "n_support": str(d.n_support),
        "iterations": str(d.iterations),
        "residual": format_float(d.residual),
        "dual_objective": format_float(d.dual_objective),
    }]


def cmd_svm_predict(args, view, seed):
    model = load_model(resolve_path(view, "model_path"))
    points = read_points(resolve_path(view, "data_path"))
    records = []
    for i, x in enumerate(points):
        records.append({
            "index": str(i),
            "prediction": format_float(predict(model, x)),
        })
    return records


def cmd_tune(args, view, seed):
    data = read_labeled_points(resolve_path(view, "train_path"))
    swarm = swarm_from(view, seed)
    cfg = TunerConfig(
        log2_C_range=(view.get_float("log2_c_low", default=-5.0),
                      view.get_float("log2_c_high", default=15.0)),
        log2_gamma_range=(view.get_float("log2_gamma_low", default=-15.0),
                          view.get_float("log2_gamma_high", default=3.0)),
        folds=view.get_int("folds", default=5),
        swarm=swarm,
        seed=seed,
        svm_tol=view.get_float("svm_tol", default=1e-3),
        svm_max_passes=view.get_int("svm_max_passes", default=10_000),
    )
    trace_path = view.get_str("trace_path", default="") or None  # output path
    tuned = tune(data, cfg, trace_path=trace_path)
    return [{
        "best_C": format_float(tuned.best_C),
        "best_gamma": format_float(tuned.best_gamma),
        "sigma_squared": format_float(tuned.sigma_squared),
        "cv_error": format_float(tuned.cv_error),
        "evaluations": str(tuned.evaluations),
        "n_support": str(tuned.model.diagnostics.n_support),
    }]


def cmd_cobb(args, view, seed):
    problem = cobb_mod.ProductionProblem(
        alphas=np.array(view.get_floats("alphas")),
        weights=np.array(view.get_floats("weights")),
        K=view.get_float("K"),
        beta_noise=view.get_float("beta_noise", default=0.0),
        seed=seed,
    )
    report = cobb_mod.solve_numerically(problem, swarm_from(view, seed))
    return [report.to_record()]


def cmd_adult(args, view, seed):
    data_dir = resolve_path(view, "data_dir", default="") or None
    report = adult_mod.run_benchmark(
        train_size=view.get_int("train_size", default=512),
        test_size=view.get_int("test_size", default=256),
        C=view.get_float("C", default=1.25),
        seed=seed,
        data_dir=data_dir,
    )
    rec = report.to_record()
    rec["error_pct"] = rec.pop("best_fitness")
    return [rec]


def cmd_rcpsp(args, view, seed):
    inst = rcpsp_mod.parse_psplib(resolve_path(view, "instance"))
    best_known = None
    side_path = resolve_path(view, "best_known_path", default="") or None
    if side_path:
        table = rcpsp_mod.read_best_known(side_path)
        if inst.name not in table:
            raise DataError(f"{side_path} has no entry for {inst.name}")
        best_known = table[inst.name]
    budget = view.get_int("schedule_budget", default=1000)
    cfg = rcpsp_mod.budget_config(swarm_from(view, seed), budget)
    report = rcpsp_mod.solve(inst, cfg, budget, best_known=best_known)
    rec = report.to_record()
    rec["instance"] = inst.name
    rec["makespan"] = format_float(report.best_fitness)
    rec["critical_path_bound"] = str(inst.critical_path_bound)
    return [rec]


HANDLERS = {
    "optimize": cmd_optimize,
    "svm-train": cmd_svm_train,
    "svm-predict": cmd_svm_predict,
    "tune": cmd_tune,
    "cobb": cmd_cobb,
    "adult": cmd_adult,
    "rcpsp": cmd_rcpsp,
}


def render_records(records, fmt: str) -> str:
    if fmt == "records":
        return "\n".join(format_record(r) for r in records) + "\n"
    keys = list(records[0])
    widths = {k: max(len(k), *(len(r.get(k, "")) for r in records)) for k in keys}
    lines = ["  ".join(k.ljust(widths[k]) for k in keys)]
    for r in records:
        lines.append("  ".join(r.get(k, "").ljust(widths[k]) for k in keys))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmsvm",
        description="Swarm optimization, kernel SVM training, and benchmarks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        ("optimize", "minimize a built-in objective with the swarm"),
        ("svm-train", "train a kernel SVM and save the model"),
        ("svm-predict", "predict labels with a saved model"),
        ("tune", "search (C, gamma) by swarm over cross-validation error"),
        ("cobb", "budget-allocation benchmark against the closed form"),
        ("adult", "census income classification benchmark"),
        ("rcpsp", "project scheduling benchmark"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", type=int, default=None,
                       help="overrides the config seed (default 0)")
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--format", choices=("table", "records"), default="records")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        view = load_view(args.config)
        seed = resolved_seed(args, view)
        print(f"# swarmsvm {args.subcommand} config={view.source} seed={seed}",
              file=sys.stderr)
        records = HANDLERS[args.subcommand](args, view, seed)
        unused = view.unused_keys()
        if unused:
            print(f"# warning: unused config keys: {', '.join(sorted(unused))}",
                  file=sys.stderr)
        text = render_records(records, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        elapsed = (time.perf_counter() - start) * 1000.0
        print(f"# elapsed_ms={format_float(elapsed)}", file=sys.stderr)
        return EXIT_OK
    except SwarmSvmError as exc:
        print(f'error category={exc.category} message="{exc}"', file=sys.stderr)
        return _CATEGORY_EXIT.get(exc.category, EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
