#!/usr/bin/env python3
"""Run the planar anchor-placement studies and the reconstruction convergence
study; writes CSV tables plus a JSON summary into results/planar/."""

import pathlib
import sys

from stringshape.cli import main

OUT = pathlib.Path("results/planar")
OUT.mkdir(parents=True, exist_ok=True)

sys.exit(main([
    "planar-study", "--table1", "--table2", "--convergence",
    "--samples", "200",
    "-o", str(OUT / "anchor_study_config_index.csv"),
    "--output-full", str(OUT / "anchor_study_tip_index.csv"),
    "--output-convergence", str(OUT / "convergence.csv"),
]))
