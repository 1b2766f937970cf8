"""Run the pure and mixed agreement grids and print a summary of each."""
import argparse
import json
import time

from errmargin.grids import MixedGridConfig, PureGridConfig, mixed_grid, pure_grid


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--which", choices=["pure", "mixed", "both"], default="both")
    parser.add_argument("--n", type=int, default=None, help="points per axis (overrides defaults)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    runs = []
    if args.which in ("pure", "both"):
        cfg = PureGridConfig() if args.n is None else PureGridConfig(args.n, args.n)
        runs.append(("pure", lambda: pure_grid(cfg)))
    if args.which in ("mixed", "both"):
        cfg_m = MixedGridConfig(seed=args.seed)
        if args.n is not None:
            cfg_m = MixedGridConfig(args.n, args.n, args.n, seed=args.seed)
        runs.append(("mixed", lambda: mixed_grid(cfg_m)))

    ok = True
    for name, run in runs:
        start = time.perf_counter()
        res = run()
        ok &= res.passed
        print(json.dumps({
            "grid": name,
            "points": res.points,
            "max_agreement": res.max_agreement,
            "max_residual": res.max_residual,
            "max_gap": res.max_gap,
            "failures": len(res.failures),
            "seconds": round(time.perf_counter() - start, 2),
        }))
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
