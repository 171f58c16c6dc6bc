"""U-V phase diagrams: semiclassical (Delta=-1, Jt=1) vs full quantum (Delta=-5, Jt=sqrt 5).

Writes phase_diagram_semiclassical.csv, phase_diagram_full.csv and SVG heatmaps of
the fidelities and of the full model's maximal entanglement.

    python scripts/phase_diagrams.py --out results/phase_diagrams --workers 4
"""

import argparse
import math
import time
from pathlib import Path

from cavity_anneal import svgplot, sweeps
from cavity_anneal.hamiltonians import AnnealParams
from cavity_anneal.output import write_csv

SETTINGS = {
    "semiclassical": dict(Delta=-1.0, Jt_final=1.0),
    "full": dict(Delta=-5.0, Jt_final=math.sqrt(5.0)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="results/phase_diagrams")
    ap.add_argument("--grid-U", default="0:1:0.05")
    ap.add_argument("--grid-V", default="1.0:1.2:0.01")
    ap.add_argument("--t_f", type=float, default=1000.0)
    ap.add_argument("--workers", type=int, default=sweeps.default_workers())
    args = ap.parse_args()
    out = Path(args.out)
    U = sweeps.grid_from_spec(args.grid_U)
    V = sweeps.grid_from_spec(args.grid_V)
    for model, kw in SETTINGS.items():
        t0 = time.time()
        params = AnnealParams(t_f=args.t_f, **kw)
        res = sweeps.phase_diagram(model, U, V, params, workers=args.workers)
        write_csv(out / f"phase_diagram_{model}.csv", res.rows(), res.provenance)
        svgplot.heatmap(out / f"phase_diagram_{model}.svg", U, V, res.grid("final_fidelity"),
                        title=f"Final fidelity ({model})", xlabel="U", ylabel="V", label="F")
        if model == "full":
            svgplot.heatmap(out / "max_entropy_full.svg", U, V, res.grid("max_entropy"),
                            title="Max entanglement (full)", xlabel="U", ylabel="V", label="S")
        print(f"{model}: {len(res.cells)} cells in {time.time() - t0:.0f} s")


if __name__ == "__main__":
    main()
