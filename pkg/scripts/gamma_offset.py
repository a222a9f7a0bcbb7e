"""Two-point gamma estimate next to the offset-corrected fit, over n."""

import argparse

from gibbslog.limits import gamma_estimate, gamma_estimate_offset
from gibbslog.models import get_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", nargs="+", default=["cube", "delannoy", "bridges-m2"])
    ap.add_argument("--grid", type=int, nargs="+", default=[500, 1000, 4000, 10000])
    args = ap.parse_args()
    print("model,n,gamma_hat,offset_b,gamma_offset_fit")
    for name in args.models:
        model = get_model(name, max(args.grid))
        for n in args.grid:
            b, g = gamma_estimate_offset(model, n)
            print(f"{name},{n},{gamma_estimate(model, n):.6f},{b:.4f},{g:.6f}")


if __name__ == "__main__":
    main()
