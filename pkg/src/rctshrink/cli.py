"""Command-line front end: ``rctshrink {fit,analyze,shrink,simulate,report}``.

Model files are the only hand-off between ``fit`` and the other commands.
Any failure prints one JSON line ``{"error": <code>, "message": ...}`` to
stderr, removes the files written so far and exits with status 1 (2 for
usage errors).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io as rio
from .analytics import DEFAULT_PROBS, summary_table
from .deconv import ClampWarning, convolve, deconvolve
from .em import EmConfig, fit_em, select_components
from .errors import InvalidInputError, RctShrinkError
from .model import SnrPrior, ZMixture
from .posterior import (conditional_coverage, credible_interval, ratio_quartiles_given_z,
                        shrink_estimate)
from .sim import SDistSpec, sample_trials

SEED_ENV = "RCTSHRINK_SEED"


class _UsageError(InvalidInputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _k_range(text):
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b if sep else a)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if not 1 <= lo <= hi <= 8:
        raise argparse.ArgumentTypeError("component range must satisfy 1 <= A <= B <= 8")
    return range(lo, hi + 1)


def _probs(text):
    try:
        ps = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad probability list {text!r}") from None
    if any(not 0 < q < 1 for q in ps) or any(b <= a for a, b in zip(ps, ps[1:])):
        raise argparse.ArgumentTypeError("probabilities must increase strictly within (0, 1)")
    return ps


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _level(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("level must lie in (0, 1)")
    return v


def build_parser():
    default_seed = int(os.environ.get(SEED_ENV, 0))
    p = _Parser(prog="rctshrink", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit a zero-mean normal mixture to z = b/s")
    f.add_argument("--input", required=True, type=Path)
    g = f.add_mutually_exclusive_group(required=True)
    g.add_argument("--components", type=_positive_int)
    g.add_argument("--select-k", type=_k_range, metavar="A..B")
    f.add_argument("--restarts", type=_positive_int, default=10)
    f.add_argument("--max-iter", type=_positive_int, default=2000)
    f.add_argument("--rel-tol", type=float, default=1e-8)
    f.add_argument("--seed", type=int, default=default_seed)
    f.add_argument("--out", required=True, type=Path)

    a = sub.add_parser("analyze", help="summary table and curve files for a model")
    a.add_argument("--model", required=True, type=Path)
    a.add_argument("--out-dir", required=True, type=Path)
    a.add_argument("--probs", type=_probs, default=DEFAULT_PROBS)
    a.add_argument("--seed", type=int, default=default_seed)
    a.add_argument("--power-draws", type=_positive_int, default=1_000_000)

    s = sub.add_parser("shrink", help="shrunken estimates and calibrated intervals")
    s.add_argument("--model", required=True, type=Path)
    s.add_argument("--b", type=float)
    s.add_argument("--s", type=float)
    s.add_argument("--input", type=Path)
    s.add_argument("--out", type=Path)
    s.add_argument("--level", type=_level, default=0.95)

    m = sub.add_parser("simulate", help="draw a synthetic trial table from a model")
    m.add_argument("--model", required=True, type=Path)
    m.add_argument("--n", required=True, type=_positive_int)
    m.add_argument("--s-dist", default="fixed:1", metavar="SPEC")
    m.add_argument("--seed", type=int, default=default_seed)
    m.add_argument("--out", required=True, type=Path)

    r = sub.add_parser("report", help="z-value histograms with the fitted mixture")
    r.add_argument("--input", required=True, type=Path)
    r.add_argument("--model", required=True, type=Path)
    r.add_argument("--symmetrize", action="store_true")
    r.add_argument("--bins", type=_positive_int, default=60)
    r.add_argument("--out-dir", required=True, type=Path)
    return p


def _validate(args):
    if args.command == "shrink":
        single = args.b is not None or args.s is not None
        if single == (args.input is not None):
            raise _UsageError("shrink needs either --b and --s, or --input")
        if single and (args.b is None or args.s is None):
            raise _UsageError("--b and --s go together")
        if args.input is not None and args.out is None:
            raise _UsageError("batch shrink needs --out")
    if getattr(args, "seed", 0) < 0:
        raise _UsageError("seed must be nonnegative")


def _load_prior(path):
    rec = rio.read_model(path)
    m = rec.model
    if isinstance(m, ZMixture):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ClampWarning)
            m = deconvolve(m)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    return m


def _load_zmixture(path):
    m = rio.read_model(path).model
    return convolve(m) if isinstance(m, SnrPrior) else m


def _cmd_fit(args, written):
    trials, report = rio.read_trials(args.input)
    zs = np.array([t.z for t in trials])
    cfg = EmConfig(max_iter=args.max_iter, rel_tol=args.rel_tol, restarts=args.restarts,
                   seed=args.seed)
    if args.components is not None:
        mix, diag = fit_em(zs, args.components, cfg)
        k = args.components
    else:
        mix, diag, k = select_components(zs, args.select_k, cfg)
    config = cfg.to_dict()
    config["components"] = args.components
    config["select_k"] = [args.select_k.start, args.select_k.stop - 1] if args.select_k else None
    written.append(args.out)
    rio.write_model(mix, args.out, diag, rio.file_sha256(args.input), config)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ClampWarning)
        prior = deconvolve(mix)
    summary = {
        "rows_accepted": report.n_accepted,
        "rows_rejected": report.n_rejected,
        "components": k,
        "loglik": diag.loglik,
        "bic": diag.bic,
        "iterations": diag.n_iter,
        "converged": diag.converged,
        "restart": diag.restart_index,
        "weights": list(mix.weights),
        "z_sds": list(mix.sigmas),
        "snr_sds": list(prior.taus),
        "clamped_components": [w.message.index for w in caught],
    }
    for key, val in summary.items():
        print(f"{key}: {json.dumps(val)}")


def _cmd_analyze(args, written):
    prior = _load_prior(args.model)
    table = summary_table(prior, args.probs)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    header, rows = table.rows()
    path = args.out_dir / "summary_table.csv"
    written.append(path)
    rio.write_table(path, header, rows, "table: |SNR| quantiles with power and exaggeration")
    path = args.out_dir / "summary.json"
    written.append(path)
    path.write_text(json.dumps({
        "probabilities": table.probabilities,
        "abs_snr": table.snr_abs_quantiles,
        "power": table.power_at_quantiles,
        "exaggeration": table.exaggeration_at_quantiles,
        "mean_power": table.mean_power,
        "frac_power_below_0.80": table.frac_power_below_080,
    }, indent=2) + "\n")
    grid = rio.GridSpec(power_draws=args.power_draws, seed=args.seed)
    written.extend(args.out_dir / f for f in rio.CURVE_FILES.values())
    rio.emit_curves(prior, args.out_dir, grid)
    print(",".join(header))
    for row in rows:
        print(",".join([row[0]] + [f"{v:.4g}" for v in row[1:]]))
    print(f"mean_power: {table.mean_power:.4f}")
    print(f"frac_power_below_0.80: {table.frac_power_below_080:.4f}")


def _shrink_row(prior, b, s, level):
    z = b / s
    lo, hi = credible_interval(prior, b, s, level)
    if z != 0:
        raw = ratio_quartiles_given_z(prior, z, "raw")
        shr = ratio_quartiles_given_z(prior, z, "shrunk")
    else:
        raw = shr = (math.nan,) * 3
    return [z, shrink_estimate(prior, b, s), lo, hi, conditional_coverage(prior, z), *raw, *shr]


_SHRINK_COLS = ["z", "estimate", "lower", "upper", "naive_coverage",
                "raw_ratio_q25", "raw_ratio_q50", "raw_ratio_q75",
                "shrunk_ratio_q25", "shrunk_ratio_q50", "shrunk_ratio_q75"]


def _cmd_shrink(args, written):
    prior = _load_prior(args.model)
    if args.input is None:
        if not args.s > 0:
            raise InvalidInputError("--s must be > 0")
        vals = _shrink_row(prior, args.b, args.s, args.level)
        for key, val in zip(_SHRINK_COLS, vals):
            print(f"{key}: {val!r}")
        return
    trials, report = rio.read_trials(args.input)
    rows = ([t.id, t.b, t.s, *_shrink_row(prior, t.b, t.s, args.level)] for t in trials)
    written.append(args.out)
    rio.write_table(args.out, ["id", "b", "s", *_SHRINK_COLS], rows,
                    f"shrinkage, {args.level} intervals")
    print(f"rows_written: {report.n_accepted}")
    print(f"rows_rejected: {report.n_rejected}")


def _cmd_simulate(args, written):
    prior = _load_prior(args.model)
    trials = sample_trials(prior, SDistSpec.parse(args.s_dist), args.n, args.seed)
    written.append(args.out)
    rio.write_trials(trials, args.out)
    print(f"rows_written: {len(trials)}")


def _cmd_report(args, written):
    trials, _ = rio.read_trials(args.input)
    overlay = _load_zmixture(args.model)
    zs = [t.z for t in trials]
    args.out_dir.mkdir(parents=True, exist_ok=True)
    outputs = [(args.out_dir / "z_histogram.csv", False)]
    if args.symmetrize:
        outputs.append((args.out_dir / "z_histogram_symmetrized.csv", True))
    for path, sym in outputs:
        written.append(path)
        rio.emit_histogram(zs, args.bins, sym, overlay, path)
        print(path)


_COMMANDS = {
    "fit": _cmd_fit,
    "analyze": _cmd_analyze,
    "shrink": _cmd_shrink,
    "simulate": _cmd_simulate,
    "report": _cmd_report,
}


def _fail(code, message):
    print(json.dumps({"error": code, "message": " ".join(str(message).split())}),
          file=sys.stderr)


def main(argv=None) -> int:
    written = []
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
    except _UsageError as exc:
        _fail("usage", exc)
        return 2
    try:
        _COMMANDS[args.command](args, written)
    except BaseException as exc:
        for path in written:
            Path(path).unlink(missing_ok=True)
        if isinstance(exc, RctShrinkError):
            _fail(exc.code, exc)
        elif isinstance(exc, FileNotFoundError):
            _fail("file-not-found", f"{exc.filename}: {exc.strerror}")
        elif isinstance(exc, OSError):
            _fail("io-error", exc)
        elif isinstance(exc, (KeyboardInterrupt, SystemExit)):
            raise
        else:
            _fail("internal-error", f"{type(exc).__name__}: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
