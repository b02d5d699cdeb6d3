#!/usr/bin/env python3
"""Rebuild the CSV files under data/ from redistributed copies of the UCI sources.

The raw UCI files are taken from two PyPI wheels that ship them verbatim:

  responsibly  -> adult.data          (UCI Adult / Census Income)
  keel-ds      -> mammographic.dat    (UCI Mammographic Mass, complete cases)
               -> contraceptive.dat   (UCI Contraceptive Method Choice)

Values are not altered beyond adding a header row, stripping the blank after
each comma in adult.data and naming the coded target classes. Missing values
stay in the file ('?') and are dropped by the loader.

The California housing file (Kaggle "california-housing-prices", housing.csv)
is not redistributed in any wheel; copy it to data/cahousing.csv by hand.
"""

import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "salary-class",
]
MGM_COLUMNS = ["bi_rads_assessment", "age", "shape", "margin", "density", "severity"]
CMC_COLUMNS = [
    "wife_age", "wife_edu", "husband_edu", "num_children", "wife_religion",
    "wife_working", "husband_occupation", "standard_of_living",
    "media_exposure", "contraceptive_method",
]
SEVERITY = {"0": "benign", "1": "malignant"}
METHOD = {"1": "no_use", "2": "long-term", "3": "short-term"}


def download(package: str, version: str, dest: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
         f"{package}=={version}", "-d", str(dest)],
        check=True,
    )
    return next(dest.glob(f"{package.replace('-', '_')}-{version}-*.whl"))


def keel_rows(text: str):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("@"):
            yield [tok.strip() for tok in line.split(",")]


def write_csv(path: pathlib.Path, header, rows) -> int:
    count = 0
    with path.open("w", encoding="utf-8", newline="\n") as out:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")
            count += 1
    return count


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent / "data",
                        type=pathlib.Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        responsibly = zipfile.ZipFile(download("responsibly", "0.1.2", tmp))
        keel = zipfile.ZipFile(download("keel-ds", "0.2.5", tmp))

        adult = responsibly.read("responsibly/dataset/adult/adult.data").decode()
        adult_rows = ([tok.strip() for tok in line.split(",")]
                      for line in adult.splitlines() if line.strip())
        n = write_csv(args.out / "adult.csv", ADULT_COLUMNS, adult_rows)
        print(f"adult.csv: {n} rows")

        mgm = keel.read("keel_ds/data/balanced/raw/mammographic.dat").decode()
        n = write_csv(args.out / "mgm.csv", MGM_COLUMNS,
                      (r[:-1] + [SEVERITY[r[-1]]] for r in keel_rows(mgm)))
        print(f"mgm.csv: {n} rows")

        cmc = keel.read("keel_ds/data/balanced/raw/contraceptive.dat").decode()
        n = write_csv(args.out / "cmc.csv", CMC_COLUMNS,
                      (r[:-1] + [METHOD[r[-1]]] for r in keel_rows(cmc)))
        print(f"cmc.csv: {n} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
