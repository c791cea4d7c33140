"""Write the data behind the ERB-rate, Q-factor and coverage plots, and print headline numbers.

Usage: python scripts/reproduce_figures.py [OUT_DIR]
"""

import sys
from pathlib import Path

from auditory_fb.cli import main as cli
from auditory_fb.design import coverage_closed_form_linear_erb, coverage_closed_form_log, solve_n_bands, ErbScaled, ConstantQ
from auditory_fb.gammatone import gammatone_q_factor, k_of_n
from auditory_fb.scales import GLASBERG_MOORE


def headline():
    k = k_of_n(4)
    eta = gammatone_q_factor(4, 7.7)
    print(f"k(4)                         {k:.4f}")
    print(f"gammatone Q, A=7.7           {eta:.3f}")
    for nb in (16, 24):
        log = coverage_closed_form_log(200, 3600, nb, eta)
        lin = coverage_closed_form_linear_erb(200, 3600, nb, 24.7, 0.108, k)
        print(f"coverage N_b={nb:<3d}  log {log:.3f}   linear-ERB {lin:.3f}")
    print(f"bands for coverage >= 1      log {solve_n_bands(200, 3600, 1.0, ConstantQ(eta))}"
          f"   linear-ERB {solve_n_bands(200, 3600, 1.0, ErbScaled(k, GLASBERG_MOORE))}")


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "figure_data")
    out.mkdir(parents=True, exist_ok=True)
    cli(["scale-export", "--out", str(out / "erbs_curves.csv")])
    cli(["qfactor-sweep", "--out", str(out / "qfactor_sweep.csv")])
    cli(["coverage-sweep", "--nbands-max", "40", "--out", str(out / "coverage_sweep.csv")])
    cli(["design", "--scale", "log", "--reproducible", "--out", str(out / "design_log_16.json")])
    cli(["design", "--scale", "linear-erb", "--reproducible", "--out", str(out / "design_linear_erb_16.json")])
    headline()
    print(f"wrote CSV/JSON to {out}/")
