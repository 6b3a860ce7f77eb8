# Copyright 2026 The PolicyScope Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Recomputes summary.csv from run CSVs with the statistics module."""

import csv
import pathlib
import shutil
import statistics
import subprocess
import sys


def main():
    cli, workdir = sys.argv[1], pathlib.Path(sys.argv[2])
    shutil.rmtree(workdir, ignore_errors=True)
    subprocess.run([cli, "suite", "--optimizer", "random", "--benchmark", "rosenbrock",
                    "--budget", "20", "--seed", "3", "--reps", "4", "--output", str(workdir)],
                   check=True)

    best = {}
    for path in sorted(workdir.glob("run_*.csv")):
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                best.setdefault(int(row["iteration"]), []).append(float(row["best_so_far"]))

    with open(workdir / "summary.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    if len(rows) != len(best):
        sys.exit(f"expected {len(best)} summary rows, found {len(rows)}")

    errors = 0
    for row in rows:
        values = best[int(row["iteration"])]
        q25, _, q75 = statistics.quantiles(values, n=4, method="inclusive")
        expected = {"runs": len(values), "median_best": statistics.median(values),
                    "q25_best": q25, "q75_best": q75}
        for key, want in expected.items():
            got = float(row[key])
            if got != want:
                print(f"iteration {row['iteration']} {key}: got {got!r}, want {want!r}")
                errors += 1
    if errors:
        sys.exit(1)
    print(f"{len(rows)} summary rows match")


if __name__ == "__main__":
    main()
