"""Helpers shared by the experiment scripts."""

import argparse
import csv
import sys


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--reps", type=int, default=200, help="replications per cell (500 for full scale)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=20240607)
    p.add_argument("--output", default=None, help="CSV path for the comparison table")
    return p


def emit(header, rows, path):
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            out.close()
