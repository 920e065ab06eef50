"""Census income benchmark: ingest, encode, subsample, train, report.

Works on the census income file format: 15 comma-separated fields per
row, ``?`` for missing values, and a test variant whose label field
carries a trailing period and whose first line may be a ``|`` comment.
Only five attributes are used: age, education level (the ordinal
education number), occupation, gender, and weekly hours.  Rows missing
any of the five are dropped and counted; structurally broken rows are
recorded with their line number and skipped.

Encoding scales the three numeric features into [0, 1] with
training-set min/max only and one-hot encodes the two categoricals in
lexicographic order, so test data never influences the representation.
The repository ships a small offline fixture; point the benchmark at a
directory with the full files to reproduce the large-scale numbers
(see scripts/fetch_adult.py).
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigError, DataError
from .report import RunReport, format_float
from .svm import Dataset, KernelSpec, predict_batch, train
from .tuning import TunerConfig, tune

ENV_DATA_DIR = "SWARMSVM_ADULT_DIR"
TRAIN_FILE = "adult.data"
TEST_FILE = "adult.test"

AGE_RANGE = (17, 100)
HOURS_RANGE = (1, 99)

# column positions in the 15-field format
_COL_AGE = 0
_COL_EDU_NUM = 4
_COL_OCCUPATION = 6
_COL_GENDER = 9
_COL_HOURS = 12
_COL_LABEL = 14
_N_COLS = 15


@dataclass(frozen=True)
class AdultRecord:
    age: int
    education_level: int
    occupation: str
    gender: str
    hours_per_week: int
    label: float  # -1: at most 50K, +1: above 50K


@dataclass(frozen=True)
class IngestResult:
    records: tuple
    kept: int
    dropped_missing: int
    malformed: tuple  # (line_no, reason) pairs

    @property
    def total_rows(self) -> int:
        return self.kept + self.dropped_missing + len(self.malformed)


def _parse_label(text: str, split: str):
    if split == "test" and text.endswith("."):
        text = text[:-1]
    if text == ">50K":
        return 1.0
    if text == "<=50K":
        return -1.0
    return None


def ingest(path, split: str = "train") -> IngestResult:
    """Parse one census file into records plus cleaning diagnostics."""
    if split not in ("train", "test"):
        raise ConfigError(f"split must be 'train' or 'test', got {split!r}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    records = []
    dropped = 0
    malformed = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("|"):
            if split == "test":
                continue  # comment header of the test variant
            malformed.append((line_no, "comment line in train split"))
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != _N_COLS:
            malformed.append((line_no, f"expected {_N_COLS} fields, got {len(fields)}"))
            continue
        selected = (fields[_COL_AGE], fields[_COL_EDU_NUM], fields[_COL_OCCUPATION],
                    fields[_COL_GENDER], fields[_COL_HOURS])
        if "?" in selected:
            dropped += 1
            continue
        label = _parse_label(fields[_COL_LABEL], split)
        if label is None:
            malformed.append((line_no, f"bad label {fields[_COL_LABEL]!r}"))
            continue
        try:
            age = int(fields[_COL_AGE])
            edu = int(fields[_COL_EDU_NUM])
            hours = int(fields[_COL_HOURS])
        except ValueError:
            malformed.append((line_no, "non-integer numeric field"))
            continue
        if not AGE_RANGE[0] <= age <= AGE_RANGE[1]:
            malformed.append((line_no, f"age {age} outside {AGE_RANGE}"))
            continue
        if not HOURS_RANGE[0] <= hours <= HOURS_RANGE[1]:
            malformed.append((line_no, f"hours {hours} outside {HOURS_RANGE}"))
            continue
        records.append(AdultRecord(
            age=age,
            education_level=edu,
            occupation=fields[_COL_OCCUPATION],
            gender=fields[_COL_GENDER],
            hours_per_week=hours,
            label=label,
        ))
    return IngestResult(records=tuple(records), kept=len(records),
                        dropped_missing=dropped, malformed=tuple(malformed))


@dataclass(frozen=True)
class EncodingStats:
    """Min/max of the numerics and category orderings, train-derived."""

    numeric_min: np.ndarray  # age, education_level, hours
    numeric_max: np.ndarray
    occupations: tuple
    genders: tuple

    @property
    def dimension(self) -> int:
        return 3 + len(self.occupations) + len(self.genders)


@dataclass(frozen=True)
class EncodedDataset:
    dataset: Dataset
    stats: EncodingStats
    unseen_categories: int = 0


def _numeric_matrix(records) -> np.ndarray:
    return np.array(
        [[r.age, r.education_level, r.hours_per_week] for r in records], dtype=float
    )


def compute_stats(records) -> EncodingStats:
    if not records:
        raise DataError("cannot compute encoding statistics from zero records")
    numeric = _numeric_matrix(records)
    return EncodingStats(
        numeric_min=numeric.min(axis=0),
        numeric_max=numeric.max(axis=0),
        occupations=tuple(sorted({r.occupation for r in records})),
        genders=tuple(sorted({r.gender for r in records})),
    )


def encode(records, stats: EncodingStats = None) -> EncodedDataset:
    """Min-max scale numerics, one-hot the categoricals.

    Without ``stats`` the statistics are computed from these records
    (the training path); with ``stats`` they are applied as-is and
    out-of-range numerics are clipped into [0, 1].  Unseen categories
    encode as an all-zero block and are counted.
    """
    if not records:
        raise DataError("cannot encode zero records")
    if stats is None:
        stats = compute_stats(records)
    numeric = _numeric_matrix(records)
    span = stats.numeric_max - stats.numeric_min
    span = np.where(span > 0, span, 1.0)
    scaled = np.clip((numeric - stats.numeric_min) / span, 0.0, 1.0)

    occ_index = {c: i for i, c in enumerate(stats.occupations)}
    gen_index = {c: i for i, c in enumerate(stats.genders)}
    n = len(records)
    occ_block = np.zeros((n, len(stats.occupations)))
    gen_block = np.zeros((n, len(stats.genders)))
    unseen = 0
    for row, r in enumerate(records):
        i = occ_index.get(r.occupation)
        if i is None:
            unseen += 1
        else:
            occ_block[row, i] = 1.0
        j = gen_index.get(r.gender)
        if j is None:
            unseen += 1
        else:
            gen_block[row, j] = 1.0

    points = np.hstack([scaled, occ_block, gen_block])
    labels = np.array([r.label for r in records])
    return EncodedDataset(
        dataset=Dataset(points=points, labels=labels),
        stats=stats,
        unseen_categories=unseen,
    )


def stratified_sample(records, size: int, seed) -> tuple:
    """Deterministic subsample preserving the label base rate.

    The positive count is the rounded proportional share, so balance
    stays within one sample of the pool's rate.
    """
    if size < 2:
        raise ConfigError(f"subsample size must be at least 2, got {size}")
    if size > len(records):
        raise DataError(f"requested {size} records but only {len(records)} available")
    labels = np.array([r.label for r in records])
    pos = np.flatnonzero(labels > 0)
    neg = np.flatnonzero(labels < 0)
    if pos.size == 0 or neg.size == 0:
        raise DataError("subsampling needs both classes in the pool")
    n_pos = int(round(size * pos.size / len(records)))
    n_pos = min(max(n_pos, 1), size - 1, pos.size)
    n_neg = size - n_pos
    if n_neg > neg.size:
        raise DataError(f"pool has only {neg.size} negative records, need {n_neg}")
    rng = np.random.default_rng(seed)
    pick_pos = pos[rng.permutation(pos.size)[:n_pos]]
    pick_neg = neg[rng.permutation(neg.size)[:n_neg]]
    chosen = np.sort(np.concatenate([pick_pos, pick_neg]))
    return tuple(records[i] for i in chosen)


def resolve_data_dir(data_dir=None) -> str:
    """Explicit argument, then the environment variable, then the fixture."""
    if data_dir is not None:
        return str(data_dir)
    env = os.environ.get(ENV_DATA_DIR)
    if env:
        return env
    return str(resources.files("swarmsvm").joinpath("data", "adult"))


def load_pools(data_dir=None) -> tuple:
    """Ingest the train and test files from the resolved directory."""
    base = resolve_data_dir(data_dir)
    train_res = ingest(os.path.join(base, TRAIN_FILE), split="train")
    test_res = ingest(os.path.join(base, TEST_FILE), split="test")
    if not train_res.records or not test_res.records:
        raise DataError(f"no usable records under {base}")
    return train_res, test_res


def run_benchmark(train_size: int, test_size: int, C: float = 1.25,
                  tuner: TunerConfig = None, seed: int = 0,
                  data_dir=None) -> RunReport:
    """Train on a stratified subsample, report test error percentage.

    The report packs: best_position = (C, gamma) actually used,
    best_fitness = misclassification percentage on the test subsample,
    evaluations = tuner evaluation count (1 when C and gamma are fixed).
    """
    start = time.perf_counter()
    train_res, test_res = load_pools(data_dir)
    train_records = stratified_sample(train_res.records, train_size, seed=(seed, 0))
    test_records = stratified_sample(test_res.records, test_size, seed=(seed, 1))

    enc_train = encode(train_records)
    enc_test = encode(test_records, enc_train.stats)

    if tuner is not None:
        tuned = tune(enc_train.dataset, tuner)
        model = tuned.model
        used_C, used_gamma = tuned.best_C, tuned.best_gamma
        evaluations = tuned.evaluations
    else:
        used_gamma = 1.0 / enc_train.stats.dimension
        model = train(enc_train.dataset, KernelSpec.rbf(used_gamma), C)
        used_C = C
        evaluations = 1

    wrong = predict_batch(model, enc_test.dataset.points) != enc_test.dataset.labels
    error_pct = 100.0 * float(wrong.mean())
    return RunReport(
        best_position=np.array([used_C, used_gamma]),
        best_fitness=error_pct,
        evaluations=evaluations,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
        seed=seed if isinstance(seed, int) else 0,
    )


@dataclass(frozen=True)
class AdultRow:
    train_size: int
    test_size: int
    error_pct: float
    seeds: int

    def to_record(self) -> dict:
        return {
            "train_size": str(self.train_size),
            "test_size": str(self.test_size),
            "error_pct": format_float(self.error_pct),
            "seeds": str(self.seeds),
        }


DEFAULT_ROWS = ((512, 256), (1024, 256))


def benchmark_table(rows=DEFAULT_ROWS, C: float = 1.25, n_seeds: int = 1,
                    base_seed: int = 0, data_dir=None) -> list:
    """Mean test error per (train size, test size) row over seeds."""
    out = []
    for train_size, test_size in rows:
        errors = [
            run_benchmark(train_size, test_size, C=C, seed=base_seed + s,
                          data_dir=data_dir).best_fitness
            for s in range(n_seeds)
        ]
        out.append(AdultRow(
            train_size=train_size,
            test_size=test_size,
            error_pct=float(np.mean(errors)),
            seeds=n_seeds,
        ))
    return out


def format_table(rows) -> str:
    lines = [f"{'train_size':>10} {'test_size':>9} {'error_pct':>10} {'seeds':>6}"]
    for r in rows:
        lines.append(f"{r.train_size:>10} {r.test_size:>9} {r.error_pct:>10.2f} {r.seeds:>6}")
    return "\n".join(lines) + "\n"
