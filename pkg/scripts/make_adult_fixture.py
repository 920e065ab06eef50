"""Generate the offline census-income fixture files.

Writes src/swarmsvm/data/adult/adult.data (train) and adult.test in the
exact 15-field format of the public census income files, including a
``|`` comment line and trailing label periods in the test file, plus a
sprinkle of ``?`` missing values.  Rows are drawn from a fixed-seed
model over the five attributes the benchmark uses (age, education
level, occupation, gender, weekly hours); the income label follows a
logistic score over those attributes so a kernel classifier reaches
error rates comparable to the real data at small training sizes.  The
remaining ten fields are filled with plausible values; the benchmark
ignores them.

Run from the repository root:

    python3 scripts/make_adult_fixture.py
"""

from __future__ import annotations

import os

import numpy as np

N_TRAIN = 2000
N_TEST = 1000
SEED = 20240901
MISSING_RATE = 0.02

OCCUPATIONS = (
    "Adm-clerical", "Armed-Forces", "Craft-repair", "Exec-managerial",
    "Farming-fishing", "Handlers-cleaners", "Machine-op-inspct",
    "Other-service", "Priv-house-serv", "Prof-specialty",
    "Protective-serv", "Sales", "Tech-support", "Transport-moving",
)
OCC_WEIGHTS = np.array(
    [12.0, 0.1, 13.0, 13.0, 3.2, 4.4, 6.4, 10.5, 0.5, 13.2, 2.1, 11.7, 3.0, 5.1]
)
# per-occupation shift of the income score, roughly white-collar vs not
OCC_SCORE = {
    "Adm-clerical": -0.2, "Armed-Forces": 0.0, "Craft-repair": -0.1,
    "Exec-managerial": 1.1, "Farming-fishing": -0.9, "Handlers-cleaners": -1.0,
    "Machine-op-inspct": -0.7, "Other-service": -1.2, "Priv-house-serv": -1.5,
    "Prof-specialty": 1.0, "Protective-serv": 0.3, "Sales": 0.1,
    "Tech-support": 0.4, "Transport-moving": -0.3,
}

WORKCLASSES = ("Private", "Self-emp-not-inc", "Local-gov", "State-gov", "Federal-gov")
WORKCLASS_WEIGHTS = np.array([75.0, 8.0, 7.0, 4.0, 3.0])
MARITALS = ("Married-civ-spouse", "Never-married", "Divorced", "Widowed", "Separated")
MARITAL_WEIGHTS = np.array([46.0, 33.0, 14.0, 3.0, 3.0])
RELATIONSHIPS = ("Husband", "Not-in-family", "Own-child", "Unmarried", "Wife")
RELATIONSHIP_WEIGHTS = np.array([40.0, 26.0, 16.0, 11.0, 5.0])
RACES = ("White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other")
RACE_WEIGHTS = np.array([85.0, 10.0, 3.0, 1.0, 1.0])
COUNTRIES = ("United-States", "Mexico", "Philippines", "Germany", "Canada")
COUNTRY_WEIGHTS = np.array([91.0, 2.0, 1.0, 1.0, 1.0])

EDUCATION_NAMES = {
    1: "Preschool", 2: "1st-4th", 3: "5th-6th", 4: "7th-8th", 5: "9th",
    6: "10th", 7: "11th", 8: "12th", 9: "HS-grad", 10: "Some-college",
    11: "Assoc-voc", 12: "Assoc-acdm", 13: "Bachelors", 14: "Masters",
    15: "Prof-school", 16: "Doctorate",
}
EDU_LEVELS = np.arange(1, 17)
EDU_WEIGHTS = np.array(
    [0.2, 0.5, 1.0, 2.0, 1.6, 2.9, 3.7, 1.3, 32.3, 22.4, 4.2, 3.3, 16.4, 5.3, 1.8, 1.3]
)


def _choice(rng, values, weights, n):
    p = np.asarray(weights, dtype=float)
    return rng.choice(np.asarray(values, dtype=object), size=n, p=p / p.sum())


def sample_rows(rng, n):
    age = np.clip(np.rint(rng.normal(38.6, 13.6, n)), 17, 90).astype(int)
    edu = rng.choice(EDU_LEVELS, size=n, p=EDU_WEIGHTS / EDU_WEIGHTS.sum())
    occ = _choice(rng, OCCUPATIONS, OCC_WEIGHTS, n)
    gender = np.where(rng.random(n) < 0.669, "Male", "Female").astype(object)
    hours = np.where(
        rng.random(n) < 0.47,
        40,
        np.clip(np.rint(rng.normal(41.0, 12.0, n)), 1, 99),
    ).astype(int)

    occ_shift = np.array([OCC_SCORE[o] for o in occ])
    score = (
        0.045 * (age - 38.6)
        + 0.38 * (edu - 10.0)
        + 0.035 * (hours - 40.0)
        + occ_shift
        + 0.85 * (gender == "Male").astype(float)
    )
    prob = 1.0 / (1.0 + np.exp(-(2.0 * score - 3.6)))
    label = np.where(rng.random(n) < prob, ">50K", "<=50K").astype(object)

    workclass = _choice(rng, WORKCLASSES, WORKCLASS_WEIGHTS, n)
    fnlwgt = rng.integers(20_000, 500_000, n)
    marital = _choice(rng, MARITALS, MARITAL_WEIGHTS, n)
    relationship = _choice(rng, RELATIONSHIPS, RELATIONSHIP_WEIGHTS, n)
    race = _choice(rng, RACES, RACE_WEIGHTS, n)
    cap_gain = np.where(rng.random(n) < 0.08, rng.integers(1000, 20_000, n), 0)
    cap_loss = np.where(rng.random(n) < 0.04, rng.integers(500, 3000, n), 0)
    country = _choice(rng, COUNTRIES, COUNTRY_WEIGHTS, n)

    rows = []
    for i in range(n):
        occupation = occ[i]
        if rng.random() < MISSING_RATE:
            occupation = "?"
        rows.append([
            str(age[i]), workclass[i], str(fnlwgt[i]), EDUCATION_NAMES[int(edu[i])],
            str(int(edu[i])), marital[i], occupation, relationship[i], race[i],
            gender[i], str(int(cap_gain[i])), str(int(cap_loss[i])),
            str(hours[i]), country[i], label[i],
        ])
    return rows


def main():
    rng = np.random.default_rng(SEED)
    out_dir = os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "src", "swarmsvm", "data", "adult",
    )
    os.makedirs(out_dir, exist_ok=True)

    train_rows = sample_rows(rng, N_TRAIN)
    with open(os.path.join(out_dir, "adult.data"), "w", encoding="utf-8") as fh:
        for row in train_rows:
            fh.write(", ".join(row) + "\n")

    test_rows = sample_rows(rng, N_TEST)
    with open(os.path.join(out_dir, "adult.test"), "w", encoding="utf-8") as fh:
        fh.write("|1x3 Cross validator\n")
        for row in test_rows:
            fh.write(", ".join(row[:-1]) + ", " + row[-1] + ".\n")

    n_pos = sum(1 for r in train_rows if r[-1] == ">50K")
    print(f"train rows: {N_TRAIN} positives: {n_pos} ({100.0 * n_pos / N_TRAIN:.1f}%)")
    n_pos_t = sum(1 for r in test_rows if r[-1] == ">50K")
    print(f"test rows: {N_TEST} positives: {n_pos_t} ({100.0 * n_pos_t / N_TEST:.1f}%)")


if __name__ == "__main__":
    main()
