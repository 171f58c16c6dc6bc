"""Ramp-time scans: full vs adiabatic model, and the photon-cutoff study.

Prints -log10(1-F) tables and writes ramp_scan.csv, cutoff_scan.csv plus SVGs.

    python scripts/ramp_and_cutoff.py --out results/ramp
"""

import argparse
from pathlib import Path

import numpy as np

from cavity_anneal import svgplot, sweeps
from cavity_anneal.hamiltonians import AnnealParams
from cavity_anneal.output import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="results/ramp")
    ap.add_argument("--tf-grid", default="100,200,400,800,1300,2000")
    ap.add_argument("--cutoff-tf-grid", default="50,100,150,200,400,800,1000,1300,2000,3000")
    ap.add_argument("--nc-set", default="1,2,3,4")
    ap.add_argument("--workers", type=int, default=sweeps.default_workers())
    args = ap.parse_args()
    out = Path(args.out)
    base = AnnealParams()

    tf = sweeps.grid_from_spec(args.tf_grid)
    models = ("full", "adiabatic")
    res = sweeps.ramp_time_scan(models, tf, base, workers=args.workers)
    write_csv(out / "ramp_scan.csv", res.rows(), res.provenance)
    nli = res.grid("neg_log_infidelity")
    svgplot.line_plot(out / "ramp_scan.svg", tf, {m: nli[i] for i, m in enumerate(models)},
                      title="-log10(1-F)", xlabel="t_f", ylabel="-log10 infidelity")
    print("t_f        " + " ".join(f"{t:>8g}" for t in tf))
    for i, m in enumerate(models):
        print(f"{m:<10} " + " ".join(f"{v:8.3f}" for v in nli[i]))

    tf = sweeps.grid_from_spec(args.cutoff_tf_grid)
    ncs = tuple(int(n) for n in sweeps.grid_from_spec(args.nc_set))
    res = sweeps.cutoff_scan(ncs, tf, base, workers=args.workers)
    write_csv(out / "cutoff_scan.csv", res.rows(), res.provenance)
    nli = res.grid("neg_log_infidelity")
    svgplot.line_plot(out / "cutoff_scan.svg", tf, {f"nc={n}": nli[i] for i, n in enumerate(ncs)},
                      title="-log10(1-F) by cutoff", xlabel="t_f", ylabel="-log10 infidelity")
    ent = {**{f"final nc={n}": res.grid("final_entropy")[i] for i, n in enumerate(ncs)},
           **{f"max nc={n}": res.grid("max_entropy")[i] for i, n in enumerate(ncs)}}
    svgplot.line_plot(out / "cutoff_entropy.svg", tf, ent,
                      title="Entanglement by cutoff", xlabel="t_f", ylabel="S [nats]")
    print("t_f        " + " ".join(f"{t:>8g}" for t in tf))
    for i, n in enumerate(ncs):
        print(f"nc={n:<7} " + " ".join(f"{v:8.3f}" for v in nli[i]))
    print(f"best per cutoff: {dict(zip(ncs, np.nanmax(nli, axis=1).round(3)))}")


if __name__ == "__main__":
    main()
