#!/usr/bin/env python3
"""Regenerate the receiver comparison dataset (error exponent versus M).

Defaults reproduce the committed golden file tests/golden/comparison_sweep.csv:
bright background N_B = 20, weak source N_S = N_I = 0.01 at the quantum
correlation limit, reflectivity 0.01, M log-spaced from 1e5 to 1e8.
"""
import argparse
import sys

from qillum.cli import main as qi_main


def run() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="comparison_sweep.csv")
    parser.add_argument("--m-log", default="1e5,1e8,13")
    parser.add_argument("--kappa", default="0.01")
    parser.add_argument("--nb", default="20")
    args = parser.parse_args()
    return qi_main([
        "sweep", "--ns", "0.01", "--ni", "0.01", "--c", "quantum",
        "--kappa", args.kappa, "--nb", args.nb,
        "--m-log", args.m_log, "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(run())
