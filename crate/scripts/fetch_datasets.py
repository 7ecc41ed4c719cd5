#!/usr/bin/env python3
"""Build benchmark CSVs under data/ (not checked in).

mileage.csv: the 406-car auto-mpg table (same records as MATLAB's carbig),
taken from the `vega_datasets` wheel. Cues: cylinders, displacement,
horsepower, weight, acceleration, year. Criterion: mpg. Origin and name are
dropped. Missing values are left empty; the loader drops those rows, which
leaves 392 cars.

The homeless, profsalary and city datasets come from
https://github.com/ericschulz/TTBABC (originally the heuristica R package).
They are not fetched automatically: convert them to CSV with a header row,
one numeric column per cue plus the criterion column, and put them in data/.
"""

import argparse
import csv
import json
import pathlib
import subprocess
import sys
import tempfile
import zipfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
VEGA = "vega_datasets==0.9.0"
FIELDS = [
    ("mpg", "Miles_per_Gallon"),
    ("cylinders", "Cylinders"),
    ("displacement", "Displacement"),
    ("horsepower", "Horsepower"),
    ("weight", "Weight_in_lbs"),
    ("acceleration", "Acceleration"),
    ("year", "Year"),
]


def read_cars(wheel):
    with zipfile.ZipFile(wheel) as z:
        return json.loads(z.read("vega_datasets/_data/cars.json"))


def cars_json(wheel=None):
    if wheel:
        return read_cars(wheel)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", VEGA, "--no-deps", "-q", "-d", tmp],
            check=True,
        )
        return read_cars(next(pathlib.Path(tmp).glob("vega_datasets-*.whl")))


def year(value):
    # "1970-01-01" in the vega copy
    return value[:4] if isinstance(value, str) else value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--wheel", help="use an already downloaded vega_datasets wheel")
    args = ap.parse_args()
    DATA.mkdir(exist_ok=True)
    rows = cars_json(args.wheel)
    out = DATA / "mileage.csv"
    with out.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow([name for name, _ in FIELDS])
        for r in rows:
            cells = []
            for name, key in FIELDS:
                v = r.get(key)
                if name == "year":
                    v = year(v)
                cells.append("" if v is None else v)
            w.writerow(cells)
    print(f"wrote {out} ({len(rows)} rows before dropping missing values)")
    for name in ("homeless", "profsalary", "city"):
        if not (DATA / f"{name}.csv").exists():
            print(f"{name}.csv not present; see the module docstring for its source")


if __name__ == "__main__":
    main()
