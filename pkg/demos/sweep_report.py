"""The command-line runner end to end: an r-sweep of character moments and
the report that joins it. Files go to a temporary directory.

Run: python3 demos/sweep_report.py
"""

import math
import os
import tempfile

from lowmoments.cli import main as cli


def main():
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for r in (10007, 100003, 1000003):
            out = os.path.join(tmp, f"char_{r}.csv")
            cli(["char-moments", "--r", str(r), "--x", str(math.isqrt(r)), "--q", "0.5,1", "--out", out])
            paths.append(out)
        report = os.path.join(tmp, "report.csv")
        cli(["report", *paths, "--sweep", "r", "--out", report])
        with open(report) as fh:
            for line in fh:
                cols = line.rstrip("\n").split(",")
                print(", ".join(cols[i] for i in (0, 1, 2, 5, 9, 11, 13, 16, 17)))


if __name__ == "__main__":
    main()
