#!/usr/bin/env python3
"""Reproduce every bundled figure: run the wedgewh pipelines and render PNGs.

Usage: python3 scripts/make_figures.py --out runs/ [--quick]

--quick shrinks truncations so the whole set finishes in ~2 minutes; without
it the full-scale pipelines (M = 1000, 201^2 grids) take ~15 minutes.
"""

import argparse
import json
import pathlib
import subprocess
import sys

# the comparison window must stay inside the truncated-oracle footprint
# (|R_8| = 0.8 at s = 0.1), else the scatterer masks of the two fields differ
QUICK = {
    "M": 60, "lambda_M": 80, "rho_M": 24, "j_max": 15,
    "rho_alphas": [0.5, 0.9, 1.3, 1.7, 2.1, 2.6],
    "oracle_n_per_face": 8,
    "grid": {"x0": -0.5, "x1": 0.5, "y0": -0.5, "y1": 0.5,
             "nx": 41, "ny": 41, "include_incident": False},
}

JOBS = [
    ("fig3", [("field", "fig3_field.csv", "fig3.json")]),
    ("fig4", [("rho_sweep", "fig4_rho.csv", "fig4.json")]),
    ("fig5", [("convergence", "fig5_convergence.csv", None)]),
    ("fig6", [("field", "fig6_field_iterative.csv", "fig6.json"),
              ("field", "fig6_field_oracle.csv", "fig6.json")]),
    ("fig7", [("field", "fig7_difference.csv", "fig7.json")]),
    ("fig8", [("convergence", "fig8_rates.csv", None)]),
    ("fig10", [("lambda_plane", "fig10_lambda.csv", None)]),
]


def run(cmd):
    print("+", " ".join(cmd))
    subprocess.run(cmd, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs")
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    override = []
    if args.quick:
        cfg = out / "quick.json"
        cfg.write_text(json.dumps(QUICK))
        override = ["--config", str(cfg)]
    for fig, renders in JOBS:
        fig_dir = out / fig
        run(["wedgewh", "repro", fig, "--out", str(fig_dir)] + override)
        for kind, csv_name, sidecar in renders:
            png = fig_dir / (csv_name.rsplit(".", 1)[0] + ".png")
            cmd = ["plots", kind, "--in", str(fig_dir / csv_name), "--out", str(png)]
            if sidecar:
                cmd += ["--sidecar", str(fig_dir / sidecar)]
            run(cmd)
    print("figures written under", out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
