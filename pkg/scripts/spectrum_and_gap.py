"""Low-lying spectrum along the pump ramp and the minimal gap as a function of V.

    python scripts/spectrum_and_gap.py --out results/spectrum
"""

import argparse
from pathlib import Path

import numpy as np

from cavity_anneal import svgplot
from cavity_anneal.hamiltonians import AnnealParams
from cavity_anneal.output import columns_to_rows, write_csv
from cavity_anneal.spectrum import gap_vs_impurity, minimal_gap, spectrum_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="results/spectrum")
    ap.add_argument("--n-grid", type=int, default=201)
    args = ap.parse_args()
    out = Path(args.out)

    for V in (1.1, 1.0):
        p = AnnealParams(V=V)
        sw = spectrum_sweep(p, n_levels=10, n_grid=args.n_grid)
        g = minimal_gap(sw)
        cols = {"s": sw.s, "Jt": sw.Jt, **{f"E{k + 1}_rel": sw.levels[:, k] for k in range(10)}}
        tag = f"V{V:g}"
        write_csv(out / f"spectrum_{tag}.csv", columns_to_rows(cols), {**p.to_dict(), "minimal_gap": g.gap})
        svgplot.line_plot(out / f"spectrum_{tag}.svg", sw.Jt,
                          {f"E{k + 1}-E1": sw.levels[:, k] for k in range(1, 10)},
                          title=f"Spectrum, V={V:g}", xlabel="pump Jt", ylabel="E - E0")
        print(f"V={V:g}: minimal gap {g.gap:.6f} at s={g.s_at_min:.4f}, E1-E0 at s=1 {sw.gaps()[-1]:.3e}")

    V_grid = np.round(np.linspace(1.0, 1.2, 21), 10)
    pairs = gap_vs_impurity(AnnealParams(), V_grid, n_grid=args.n_grid)
    write_csv(out / "gap_vs_V.csv", [{"V": v, "minimal_gap": g} for v, g in pairs], AnnealParams().to_dict())
    svgplot.line_plot(out / "gap_vs_V.svg", V_grid, {"gap": [g for _, g in pairs]},
                      title="Minimal gap vs impurity", xlabel="V", ylabel="min(E1-E0)")
    gaps = np.array([g for _, g in pairs])
    print(f"gap vs V: {gaps[0]:.4g} .. {gaps[-1]:.4g}, monotone={bool(np.all(np.diff(gaps) > 0))}")


if __name__ == "__main__":
    main()
