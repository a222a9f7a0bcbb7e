"""Command-line interface: ``gibbslog {enum,dist,sample,verify,bijection}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .gibbs import exact_Nn_pmf, gibbs_sampler
from .limits import point_process_extract, top_two
from .models import get_model
from .replicates import DEFAULT_SEED, map_replicates
from .series import MAX_TRUNCATION
from .walks import card_game_thinning, cube_return_profiles, return_profiles

BIJECTION_MAX_N = 3

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class CliError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str = "cube"
    n: tuple[int, ...] = (10,)
    reps: int = 10
    seed: int = DEFAULT_SEED
    mode: str = "exact"
    trunc: int | None = None
    format: str = "csv"
    out: str | None = None
    long: bool = False
    threads: int = 1
    map: str = "phi"
    m: int = 2
    force: bool = False

    @property
    def truncation(self) -> int:
        return max(self.n) if self.trunc is None else self.trunc


def _parse_n(text: str) -> tuple[int, ...]:
    try:
        if ":" in text:
            a, b = text.split(":")
            ns = tuple(range(int(a), int(b) + 1))
        else:
            ns = (int(text),)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range a:b, got {text!r}")
    if not ns or min(ns) < 0:
        raise argparse.ArgumentTypeError("n must be a non-negative integer or non-empty range")
    return ns


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gibbslog", description=__doc__)
    p.add_argument("--version", action="version", version=f"gibbslog {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_default="10"):
        sp.add_argument("--model", default="cube")
        sp.add_argument("--n", type=_parse_n, default=_parse_n(n_default))
        sp.add_argument("--trunc", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--force", action="store_true", help="allow out-of-hypothesis models")

    sp = sub.add_parser("enum", help="return-count table a_{n,j}")
    common(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("dist", help="law of the number of components N_n")
    common(sp)
    sp.add_argument("--mode", choices=("exact", "float"), default="exact")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("sample", help="seeded Gibbs partition samples as JSON lines")
    common(sp, "100")
    sp.add_argument("--reps", type=int, default=10)
    sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    sp.add_argument("--long", action="store_true", help="also run the n = 5 DFS oracle")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("bijection", help="exhaustive bijection check")
    sp.add_argument("--map", choices=("phi", "psi", "diag", "cube4"), default="phi")
    sp.add_argument("--n", type=_parse_n, default=_parse_n("2"))
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--out", default=None)
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    if ns.command in ("enum", "dist", "sample"):
        if cfg.trunc is not None and max(cfg.n) > cfg.trunc:
            raise CliError(f"n = {max(cfg.n)} exceeds truncation {cfg.trunc}")
        if cfg.truncation > MAX_TRUNCATION:
            raise CliError(f"truncation {cfg.truncation} exceeds the limit {MAX_TRUNCATION}")
    if cfg.reps < 0 or cfg.threads < 1:
        raise CliError("reps must be >= 0 and threads >= 1")
    return cfg


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[str(x) for x in r] for r in rows])
    return buf.getvalue()


def _json_rows(header, rows) -> str:
    return "".join(json.dumps(dict(zip(header, r))) + "\n" for r in rows)


def cmd_enum(cfg: RunConfig) -> tuple[int, str]:
    nmax = max(cfg.n)
    if cfg.model == "cube":
        profiles = cube_return_profiles(nmax)
    else:
        get_model(cfg.model, max(nmax, 1))  # validates the name
        profiles = return_profiles(cfg.model, nmax)
    header = ("n", "j", "a_nj", "total")
    rows = [r for n in cfg.n for r in profiles[n].rows()]
    if cfg.format == "json":
        rows = [tuple(None if x == "" else x for x in r) for r in rows]
        return EXIT_OK, _json_rows(header, rows)
    return EXIT_OK, _csv(header, rows)


def _prob_str(p) -> str:
    return str(p) if isinstance(p, Fraction) else f"{p:.17g}"


def cmd_dist(cfg: RunConfig) -> tuple[int, str]:
    model = get_model(cfg.model, max(cfg.truncation, 1))
    rows = []
    for n in cfg.n:
        if n < 1:
            raise CliError("dist needs n >= 1")
        pmf = exact_Nn_pmf(model, n, exact=cfg.mode == "exact", force=cfg.force)
        rows += [(n, k, _prob_str(p)) for k, p in enumerate(pmf.probs) if k >= 1]
    header = ("n", "k", "probability")
    if cfg.format == "json":
        return EXIT_OK, _json_rows(header, rows)
    return EXIT_OK, _csv(header, rows)


def cmd_sample(cfg: RunConfig) -> tuple[int, str]:
    if len(cfg.n) != 1 or cfg.n[0] < 1:
        raise CliError("sample needs a single n >= 1")
    n = cfg.n[0]
    model = get_model(cfg.model, max(cfg.truncation, 1))
    sampler = gibbs_sampler(model, n, force=cfg.force)
    cards = cfg.model == "cube"

    def one(rep, rng):
        s = sampler.sample(rng)
        k1, k2 = top_two(s)
        rec = {"rep": rep, "N": s.N, "K1": k1, "K2": k2,
               "points": point_process_extract(s) if n >= 2 else []}
        if cards:
            rec["C33"] = card_game_thinning(n, rng, s.N)
        return json.dumps(rec) + "\n"

    return EXIT_OK, "".join(map_replicates(one, cfg.reps, cfg.seed, cfg.threads))


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    from .acceptance import Settings, run_all

    report = run_all(Settings(seed=cfg.seed, long=cfg.long, threads=cfg.threads),
                     log=lambda line: print(line, file=sys.stderr, flush=True))
    return (EXIT_OK if report["all_passed"] else EXIT_FAIL), json.dumps(report, indent=2) + "\n"


def cmd_bijection(cfg: RunConfig) -> tuple[int, str]:
    from .bijections import check

    reports = []
    for n in cfg.n:
        if not 1 <= n <= BIJECTION_MAX_N:
            raise CliError(f"exhaustive checks need 1 <= n <= {BIJECTION_MAX_N}")
        reports.append(check(cfg.map, n, cfg.m).as_dict())
    ok = all(r["ok"] for r in reports)
    body = reports[0] if len(reports) == 1 else {"map": cfg.map, "reports": reports, "ok": ok}
    return (EXIT_OK if ok else EXIT_FAIL), json.dumps(body) + "\n"


COMMANDS = {"enum": cmd_enum, "dist": cmd_dist, "sample": cmd_sample,
            "verify": cmd_verify, "bijection": cmd_bijection}


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run a command; returns ``(exit code, stdout text, stderr text)``.

    Output is built completely before anything is written, so a failure
    never leaves a partial table behind.
    """
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), "", ""
    try:
        cfg = _config(ns)
        code, text = COMMANDS[cfg.command](cfg)
    except (ValueError, ArithmeticError) as e:
        return EXIT_ERROR, "", f"error: {e}\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return code, "", ""
    return code, text, ""


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
