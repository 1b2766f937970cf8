"""Write p_max, p_error and p_inconclusive against the margin for several overlaps.

One CSV per overlap, in the same format as ``errmargin sweep``, plus a short
summary of the critical margins on stdout.
"""
import argparse
from pathlib import Path

from errmargin.analytic import critical_margins
from errmargin.cli import CSV_HEADER, fmt, sweep_rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gammas", type=float, nargs="+", default=[-0.5, -0.25, 0.0, 0.5, 0.9])
    parser.add_argument("--r", type=float, default=1.0)
    parser.add_argument("--steps", type=int, default=400)
    parser.add_argument("--outdir", type=Path, default=Path("results/fig1"))
    args = parser.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    print("gamma,m_lower,m_upper,file")
    for gamma in args.gammas:
        cm = critical_margins(args.r, gamma)
        path = args.outdir / f"sweep_r{args.r:g}_g{gamma:g}.csv"
        path.write_text("\n".join([CSV_HEADER, *sweep_rows(args.r, gamma, args.steps)]) + "\n")
        print(f"{fmt(gamma)},{fmt(cm.m_lower)},{fmt(cm.m_upper)},{path}")


if __name__ == "__main__":
    main()
