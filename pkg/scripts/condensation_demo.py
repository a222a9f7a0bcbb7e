"""Largest and second-largest component sizes over an n-grid."""

import argparse
import json

from gibbslog.limits import condensation_stats, sample_many
from gibbslog.models import get_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="cube")
    ap.add_argument("--grid", type=int, nargs="+", default=[100, 500, 2000, 5000])
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    model = get_model(args.model, max(args.grid))
    for n in args.grid:
        st = condensation_stats(sample_many(model, n, args.reps, args.seed, args.threads))
        print(json.dumps({"n": n, **st}))


if __name__ == "__main__":
    main()
