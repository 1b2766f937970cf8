"""Monte Carlo error of the optimal measurement against the shot count."""
import argparse

import numpy as np

from errmargin.analytic import solve
from errmargin.montecarlo import simulate
from errmargin.states import build_family, to_ensemble


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma", type=float, default=0.0)
    parser.add_argument("--r", type=float, default=1.0)
    parser.add_argument("--margin", type=float, default=0.25)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--shots", type=int, nargs="+", default=[10**4, 10**5, 10**6])
    args = parser.parse_args()

    sol = solve(args.r, args.gamma, args.margin)
    ens = to_ensemble(build_family(args.r, args.gamma))
    print("shots,mean_abs_error,rms_error,expected_rms")
    for shots in args.shots:
        errs = np.array([
            simulate(ens, sol.povm, shots, seed=s).p_success_hat - sol.p_success
            for s in range(args.seeds)
        ])
        expected = np.sqrt(sol.p_success * (1 - sol.p_success) / shots)
        print(f"{shots},{np.abs(errs).mean():.3e},{np.sqrt((errs**2).mean()):.3e},{expected:.3e}")


if __name__ == "__main__":
    main()
