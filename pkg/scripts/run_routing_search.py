#!/usr/bin/env python3
"""Brute-force routing searches for both preset robots.

The stiff preset enumerates 625 tip-mounted constant-pitch designs over five
disks; the soft preset enumerates 20,000 helical designs (ten disks, two twist
rates).  Pass --samples / --seed to change the workspace draw.
"""

import argparse
import pathlib
import sys

from stringshape.cli import main

parser = argparse.ArgumentParser()
parser.add_argument("--samples", type=int, default=200)
parser.add_argument("--seed", type=int, default=777)
parser.add_argument("--preset", choices=("stiff", "soft", "both"), default="both")
args = parser.parse_args()

OUT = pathlib.Path("results/routing")
OUT.mkdir(parents=True, exist_ok=True)

presets = ("stiff", "soft") if args.preset == "both" else (args.preset,)
for preset in presets:
    rc = main(["routing-opt", "--preset", preset,
               "--samples", str(args.samples), "--seed", str(args.seed),
               "-o", str(OUT / f"{preset}_designs.csv"),
               "--output-top", str(OUT / f"{preset}_top.json")])
    if rc != 0:
        sys.exit(rc)
sys.exit(0)
