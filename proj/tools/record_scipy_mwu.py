"""Record scipy Mann-Whitney U reference values for the statistics tests."""

import json
import sys

import scipy
from scipy.stats import mannwhitneyu

CASES = [
    ("no_ties_exact", [1.5, 3.2, 4.8, 7.1], [2.2, 5.9, 8.4, 9.3, 10.1]),
    ("separated_exact", [1, 2, 3, 4, 5, 6], [7, 8, 9, 10, 11, 12, 13]),
    ("normal_no_ties", [0.11 * i + 0.013 * (i % 4) for i in range(14)], [0.095 * i + 0.3 for i in range(13)]),
    ("normal_ties", [i % 5 for i in range(15)], [(i % 7) + 1 for i in range(12)]),
    ("normal_shifted", [float(i) for i in range(20)], [float(i) + 6.5 for i in range(20)]),
    ("normal_identical", [0.2, 0.4, 0.4, 0.6] * 6, [0.2, 0.4, 0.4, 0.6] * 6),
]


def main(path):
    values = {}
    for name, a, b in CASES:
        method = "exact" if name.endswith("_exact") else "asymptotic"
        res = mannwhitneyu(a, b, alternative="two-sided", method=method, use_continuity=True)
        values[name] = {"a": a, "b": b, "u": float(res.statistic), "p": float(res.pvalue), "method": method}
    doc = {"recorded_with": {"python": sys.version.split()[0], "scipy": scipy.__version__}, "values": values}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/golden/scipy_mannwhitney.json")
