"""Command-line front end: ``pgbayes sample | fit | bench``.

Exit codes: 0 success, 2 usage or input-schema error, 3 numerical failure.
The default seed is 0 unless the ``PGBAYES_SEED`` environment variable is set.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import diagnostics, models
from .errors import NumericalError, PGDomainError
from .sampler import SamplerStats, make_rng, sample_pg

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
MODELS = ("logit", "mixed", "negbin", "mlogit", "tables", "gp-negbin")
SUITES = ("pg-speed", "logit-ess")


class UsageError(Exception):
    """Bad arguments or an input file that does not match its schema."""


def _default_seed() -> int:
    raw = os.environ.get("PGBAYES_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"PGBAYES_SEED must be an integer, got {raw!r}") from None


# --- CSV input -------------------------------------------------------------------

def read_table(path: str) -> dict[str, np.ndarray | list[str]]:
    """Header-driven CSV; numeric columns become float arrays, others stay strings."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if not rows or not rows[0]:
        raise UsageError(f"{path}: missing header row")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise UsageError(f"{path}: duplicate column names")
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise UsageError(f"{path}: line {i} has {len(r)} fields, header has {len(header)}")
    out = {}
    for j, name in enumerate(header):
        raw = [r[j].strip() for r in body]
        try:
            out[name] = np.array([float(v) for v in raw], dtype=float)
        except ValueError:
            out[name] = raw
    return out


def _numeric(table, name, path) -> np.ndarray:
    if name not in table:
        raise UsageError(f"{path}: required column '{name}' is missing")
    col = table[name]
    if isinstance(col, list):
        raise UsageError(f"{path}: column '{name}' must be numeric")
    if not np.all(np.isfinite(col)):
        raise UsageError(f"{path}: column '{name}' has non-finite values")
    return col


def _design(table, skip, path, intercept) -> tuple[np.ndarray, list[str]]:
    names = [c for c in table if c not in skip]
    cols = [_numeric(table, c, path) for c in names]
    N = len(next(iter(table.values()))) if table else 0
    X = np.column_stack(cols) if cols else np.empty((N, 0))
    if intercept:
        X = np.column_stack([np.ones(N), X])
        names = ["(intercept)"] + names
    return X, names


def _group_codes(col) -> tuple[np.ndarray, list[str]]:
    labels = [f"{v:g}" for v in col] if isinstance(col, np.ndarray) else list(col)
    keys = sorted(set(labels), key=lambda s: (0, float(s), s) if _isnum(s) else (1, 0.0, s))
    index = {k: i for i, k in enumerate(keys)}
    return np.array([index[s] for s in labels], dtype=np.int64), keys


def _isnum(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


# --- model dispatch ----------------------------------------------------------------

def _prior(args, p) -> models.GaussianPrior:
    return models.GaussianPrior.isotropic(p, args.prior_var)


def _build(args, path):
    """Returns (fit(cfg) -> PosteriorDraws, extra summary fields)."""
    table = read_table(path)
    intercept = not args.no_intercept
    m = args.model
    try:
        if m == "logit":
            y, n = _numeric(table, "y", path), _numeric(table, "n", path)
            X, cols = _design(table, {"y", "n"}, path, intercept)
            data = models.RegressionData(X, y, n)
            prior = _prior(args, X.shape[1])
            return (lambda cfg: models.fit_logit_gibbs(data, prior, cfg)), {"columns": cols}
        if m == "mixed":
            y, n = _numeric(table, "y", path), _numeric(table, "n", path)
            if "group" not in table:
                raise UsageError(f"{path}: required column 'group' is missing")
            g, labels = _group_codes(table["group"])
            X, cols = _design(table, {"y", "n", "group"}, path, False)
            data = models.MixedData(g, X, y, n, n_groups=len(labels))
            prior = _prior(args, X.shape[1])
            return (lambda cfg: models.fit_mixed_gibbs(data, prior, cfg)), {"columns": cols, "groups": labels}
        if m == "negbin":
            y = _numeric(table, "y", path)
            X, cols = _design(table, {"y"}, path, intercept)
            data = models.NegBinData(X, y, args.d)
            prior = _prior(args, X.shape[1])
            return (lambda cfg: models.fit_negbin_gibbs(data, prior, cfg, sample_d=not args.fix_d)), \
                {"columns": cols}
        if m == "mlogit":
            ycols = sorted((c for c in table if re.fullmatch(r"y\d+", c)), key=lambda c: int(c[1:]))
            expected = [f"y{j}" for j in range(1, len(ycols) + 1)]
            if len(ycols) < 2 or ycols != expected:
                missing = next((e for e in expected + [f"y{len(ycols) + 1}"] if e not in ycols), "y2")
                raise UsageError(f"{path}: required column '{missing}' is missing "
                                 "(need y1..yJ with J >= 2)")
            Y = np.column_stack([_numeric(table, c, path) for c in ycols])
            X, cols = _design(table, set(ycols), path, intercept)
            data = models.MultinomialData(X, Y)
            prior = _prior(args, X.shape[1])
            return (lambda cfg: models.fit_multinomial_gibbs(data, prior, cfg)), {"columns": cols}
        if m == "tables":
            cols = {c: _numeric(table, c, path) for c in ("y1", "n1", "y2", "n2")}
            B = np.array(args.wishart_scale, dtype=float).reshape(2, 2)
            data = models.TablesData(**cols, d=args.wishart_df, B=B, k0=args.k0)
            return (lambda cfg: models.fit_tables_gibbs(data, cfg)), {}
        if m == "gp-negbin":
            y = _numeric(table, "y", path)
            coords, cols = _design(table, {"y"}, path, False)
            if coords.shape[1] == 0:
                raise UsageError(f"{path}: need at least one coordinate column besides 'y'")
            data = models.GPData(coords, y, args.length_scale, args.nugget, args.d)
            return (lambda cfg: models.fit_gp_negbin_gibbs(data, cfg)), {"columns": cols}
    except PGDomainError as exc:
        raise UsageError(f"{path}: {exc}") from None
    raise UsageError(f"unknown model {m!r}")


def write_draws(path: str, draws) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(draws.names)
        for row in draws.draws:
            w.writerow(["%.17g" % v for v in row])


def read_draws(path: str) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(rows[0]))


def _summary(draws, model, extra, probs) -> dict:
    report = diagnostics.EfficiencyReport.from_draws(draws)
    out = {
        "model": model,
        "seed": draws.meta.get("seed"),
        "n_samples": draws.meta.get("n_samples"),
        "n_burn": draws.meta.get("n_burn"),
        "thin": draws.meta.get("thin"),
        "n_draws": int(draws.draws.shape[0]),
        "runtime_seconds": draws.sampling_seconds,
        "parameters": diagnostics.summarize(draws, probs),
        "efficiency": report.to_dict(),
        "meta": {k: v for k, v in draws.meta.items() if k not in ("seed", "n_samples", "n_burn", "thin")},
    }
    if model == "tables":
        lor = [n for n in draws.names if n.startswith("lor[")]
        out["log_odds_ratios"] = {n: out["parameters"][n] for n in lor}
    out.update(extra)
    return out


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False, allow_nan=True)
        fh.write("\n")


# --- subcommands ------------------------------------------------------------------

def cmd_sample(args) -> int:
    if not args.b > 0:
        raise UsageError("--b must be positive")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    stats = SamplerStats()
    x = sample_pg(args.b, args.z, make_rng(args.seed), stats=stats, size=args.n)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join("%.17g" % v for v in x))
            fh.write("\n")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    print(f"proposals={stats.proposals} acceptances={stats.acceptances} "
          f"acceptance_rate={stats.acceptance_rate:.6f} P(L>1)={stats.prob_more_than(1):.3e}",
          file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.n_samples < 1:
        raise UsageError("--n-samples must be at least 1")
    if args.n_burn < 0 or args.thin < 1 or args.chains < 1:
        raise UsageError("--n-burn must be >= 0, --thin and --chains >= 1")
    fit, extra = _build(args, args.data)
    prefix = args.out
    out_dir = os.path.dirname(prefix) or "."
    if not os.path.isdir(out_dir):
        raise UsageError(f"output directory {out_dir} does not exist")
    seeds = [args.seed + k for k in range(args.chains)]
    cfgs = [models.GibbsConfig(args.n_samples, args.n_burn, args.thin, s) for s in seeds]
    if args.chains == 1:
        results = [fit(cfgs[0])]
    else:
        with ThreadPoolExecutor(max_workers=args.chains) as pool:
            results = list(pool.map(fit, cfgs))
    for k, draws in enumerate(results):
        stem = prefix if args.chains == 1 else f"{prefix}_chain{k}"
        write_draws(f"{stem}_draws.csv", draws)
        _write_json(f"{stem}_summary.json", _summary(draws, args.model, extra, args.probs))
        print(f"wrote {stem}_draws.csv and {stem}_summary.json", file=sys.stderr)
    return EXIT_OK


def bench_pg_speed(n_draws: int, seed: int) -> list[dict]:
    rng = make_rng(seed)
    sample_pg(1.0, 1.0, rng, size=10)  # compile outside the timing
    rows = []
    for b in (1.0, 10.0, 100.0):
        t0 = time.perf_counter()
        sample_pg(b, 1.0, rng, size=n_draws)
        dt = time.perf_counter() - t0
        rows.append({"b": b, "z": 1.0, "draws": n_draws, "seconds": dt, "draws_per_second": n_draws / dt})
    return rows


def bench_logit_ess(n_samples: int, n_burn: int, seed: int) -> list[dict]:
    data, _ = models.synthetic_logit()
    prior = models.GaussianPrior.isotropic(data.n_coef, 100.0)
    cfg = models.GibbsConfig(n_samples, n_burn, 1, seed)
    rows = []
    for label, fitter in (("PG", models.fit_logit_gibbs), ("IndMH", models.fit_logit_metropolis)):
        draws = fitter(data, prior, cfg)
        rep = diagnostics.EfficiencyReport.from_draws(draws)
        rows.append({"method": label, "seconds": draws.sampling_seconds,
                     "ess": rep.ess_summary, "esr": rep.esr_summary,
                     "acceptance_rate": draws.meta.get("acceptance_rate")})
    return rows


def cmd_bench(args) -> int:
    if args.suite == "pg-speed":
        if args.draws < 1:
            raise UsageError("--draws must be at least 1")
        rows = bench_pg_speed(args.draws, args.seed)
        print(f"{'b':>6} {'draws':>10} {'seconds':>10} {'draws/s':>12} {'ratio':>7}")
        for r in rows:
            print(f"{r['b']:>6g} {r['draws']:>10d} {r['seconds']:>10.3f} "
                  f"{r['draws_per_second']:>12.4g} {r['seconds'] / rows[0]['seconds']:>7.2f}")
    else:
        if args.n_samples < 10:
            raise UsageError("--n-samples must be at least 10")
        rows = bench_logit_ess(args.n_samples, args.n_burn, args.seed)
        print(f"{'method':<7} {'time':>8} {'ESS.min':>9} {'ESS.med':>9} {'ESS.max':>9} "
              f"{'ESR.min':>9} {'ESR.med':>9} {'ESR.max':>9}")
        for r in rows:
            e, s = r["ess"], r["esr"]
            print(f"{r['method']:<7} {r['seconds']:>8.3f} {e['min']:>9.0f} {e['median']:>9.0f} "
                  f"{e['max']:>9.0f} {s['min']:>9.0f} {s['median']:>9.0f} {s['max']:>9.0f}")
    if args.json:
        _write_json(args.json, {"suite": args.suite, "rows": rows})
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{s} is not positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pgbayes", description="Polya-Gamma sampling and Bayesian model fitting.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="draw Polya-Gamma variates")
    s.add_argument("--dist", choices=("pg",), default="pg")
    s.add_argument("--b", type=float, default=1.0, help="shape (> 0)")
    s.add_argument("--z", type=float, default=0.0, help="tilt")
    s.add_argument("--n", type=int, default=1, help="number of draws")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", required=True, help="output file, one draw per line")

    f = sub.add_parser("fit", help="fit a model to a CSV file")
    f.add_argument("model", choices=MODELS)
    f.add_argument("--data", required=True, help="input CSV with a header row")
    f.add_argument("--out", required=True, help="output prefix")
    f.add_argument("--n-samples", type=int, default=10_000)
    f.add_argument("--n-burn", type=int, default=2_000)
    f.add_argument("--thin", type=int, default=1)
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("--chains", type=int, default=1)
    f.add_argument("--no-intercept", action="store_true")
    f.add_argument("--prior-var", type=_positive_float, default=100.0,
                   help="isotropic prior variance for regression coefficients")
    f.add_argument("--probs", type=float, nargs="+", default=[0.025, 0.05, 0.25, 0.5, 0.75, 0.95, 0.975])
    f.add_argument("--d", type=int, default=1, help="NB dispersion (initial value for negbin)")
    f.add_argument("--fix-d", action="store_true", help="hold the negbin dispersion fixed")
    f.add_argument("--length-scale", type=_positive_float, default=1.0)
    f.add_argument("--nugget", type=float, default=0.0)
    f.add_argument("--wishart-df", type=float, default=4.0)
    f.add_argument("--wishart-scale", type=float, nargs=4, default=[0.754, 0.857, 0.857, 1.480],
                   metavar=("B11", "B12", "B21", "B22"))
    f.add_argument("--k0", type=_positive_float, default=0.1, help="prior precision scale for mu")

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("suite", choices=SUITES)
    b.add_argument("--draws", type=int, default=1_000_000)
    b.add_argument("--n-samples", type=int, default=10_000)
    b.add_argument("--n-burn", type=int, default=2_000)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--json", default=None, help="also write results to this JSON file")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        handler = {"sample": cmd_sample, "fit": cmd_fit, "bench": cmd_bench}[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PGDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
