"""Write return-count tables a_{n,j} for the shipped walk models as CSV."""

import argparse
from pathlib import Path

from gibbslog.walks import cube_return_profiles, profiles_csv, return_profiles


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=20)
    ap.add_argument("--outdir", type=Path, default=Path("results/tables"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name in ("cube", "delannoy", "delannoy-face", "bridges-m2", "cube-colored-2"):
        profiles = cube_return_profiles(args.nmax) if name == "cube" else return_profiles(name, args.nmax)
        path = args.outdir / f"{name}.csv"
        path.write_text(profiles_csv(profiles))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
