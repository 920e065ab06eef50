"""Download the full census income data files.

The repository only ships a small offline fixture.  To reproduce the
large-scale benchmark numbers, download the real files and point the
benchmark at them:

    python3 scripts/fetch_adult.py --out ~/data/adult
    SWARMSVM_ADULT_DIR=~/data/adult swarmsvm adult --train-size 16400 --test-size 8200

Requires network access.  The files land as adult.data (train split,
32561 rows) and adult.test (test split, 16281 rows plus a comment
header).
"""

from __future__ import annotations

import argparse
import os
import urllib.request

BASE_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/adult"
FILES = ("adult.data", "adult.test")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="target directory")
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for name in FILES:
        url = f"{BASE_URL}/{name}"
        dest = os.path.join(args.out, name)
        print(f"fetching {url} -> {dest}")
        urllib.request.urlretrieve(url, dest)
        size = os.path.getsize(dest)
        print(f"  {size} bytes")
    print("done")


if __name__ == "__main__":
    main()
