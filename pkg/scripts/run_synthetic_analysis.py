#!/usr/bin/env python3
"""End-to-end analysis on synthetic data.

Generates a labeled dataset, cross-validates all seven classifiers, fits the
PCA projection, explains the designated classifier, and renders the figure
tables. Every step goes through the command-line interface so the run leaves
a replayable manifest behind.
"""

import argparse
import sys

from loudclass.cli import main as cli


def run(argv: list[str]) -> None:
    print("+ loudclass " + " ".join(argv))
    rc = cli(argv)
    if rc != 0:
        sys.exit(rc)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="analysis")
    ap.add_argument("--per-class", type=int, default=150)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--designated", default="lr",
                    help="classifier receiving confusion/ROC/PR/SHAP detail")
    args = ap.parse_args()

    out = args.out_dir
    run(["generate", "--out-dir", out, "--per-class", str(args.per_class),
         "--seed", str(args.seed), "--csv"])
    run(["evaluate", "--out-dir", out, "--k", str(args.k),
         "--classifier", args.designated])
    run(["pca", "--out-dir", out, "--components", "2"])
    run(["explain", "--out-dir", out, "--classifier", args.designated,
         "--k", str(args.k)])
    run(["report", "--out-dir", out])
    print(f"analysis complete; outputs and manifest under {out}/")


if __name__ == "__main__":
    main()
