"""Command-line surface: analyze, simulate, report, accept.

Exit codes: 0 success/accept, 1 usage error, 2 data error, 3 reject.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from . import acceptance as acc
from . import simulate as sim
from .core import Pcm, PcmFormatError, PriorityVector, is_reciprocal, read_pcm
from .indices import compute_report, estimate_asi
from .loss import avg_absolute_error, avg_relative_error
from .prioritize import ConvergenceError, gm_estimate, rev_estimate
from .stats import pearson, spearman, summarize_classes

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REJECT = 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pcmkit", description="Pairwise-comparison matrix toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", parents=[], help="indices and estimates for a PCM file")
    p_an.add_argument("pcm_path")
    p_an.add_argument("--true-pv", help="comma-separated true priority vector for error reporting")
    p_an.add_argument("--seed", type=int, default=None, help="seed for the ASI sample behind CR")
    p_an.add_argument("--format", choices=("table", "jsonl"), default="table")
    p_an.add_argument("--out", default=None)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo framework")
    p_sim.add_argument("framework", choices=("mse", "nee", "msobe"))
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--runs", type=int, default=1000, help="MSE runs")
    p_sim.add_argument("--ne", type=int, default=25, help="MSE error increments")
    p_sim.add_argument("--nr", type=int, default=200, help="NEE random vectors")
    p_sim.add_argument("--np", type=int, default=5, dest="n_p", help="NEE permutations per vector")
    p_sim.add_argument("--total", type=int, default=240_000, help="MSOBE record count")
    p_sim.add_argument("--big-prob", type=float, default=0.75)
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_sim.add_argument("--out", required=True)

    p_rep = sub.add_parser("report", help="class-summary table and correlation grid")
    p_rep.add_argument("database_path")
    p_rep.add_argument("--index", choices=sim.INDEX_NAMES, default="ati")
    p_rep.add_argument("--error", choices=sim.ERROR_NAMES, default="ae_rev")
    p_rep.add_argument("--classes", type=int, default=15)
    p_rep.add_argument("--format", choices=("table", "csv"), default="table")
    p_rep.add_argument("--out", default=None)

    p_acc = sub.add_parser("accept", help="ATI-based acceptance verdict for a PCM file")
    p_acc.add_argument("pcm_path")
    p_acc.add_argument("--method", choices=("rev", "gm"), default="rev")
    p_acc.add_argument("--threshold", type=float, required=True)
    p_acc.add_argument("--quantile", choices=acc.QUANTILE_CHOICES, default="q90")
    p_acc.add_argument("--table", default=None, help="custom quantile table CSV")

    return parser


def _emit(text: str, out_path):
    if out_path:
        Path(out_path).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _load_pcm(path) -> Pcm:
    try:
        return read_pcm(path)
    except (OSError, PcmFormatError, ValueError) as exc:
        raise DataError(str(exc)) from exc


def _require_reciprocal(pcm: Pcm):
    a = pcm.entries
    dev = np.abs(a * a.T - 1.0)
    if dev.max() > 1e-9:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise DataError(
            f"PCM is not reciprocal: a[{i + 1},{j + 1}]={a[i, j]:.6g} vs "
            f"a[{j + 1},{i + 1}]={a[j, i]:.6g}"
        )


def _resolve_seed(seed):
    return secrets.randbits(32) if seed is None else seed


def cmd_analyze(args) -> int:
    pcm = _load_pcm(args.pcm_path)
    _require_reciprocal(pcm)
    seed = _resolve_seed(args.seed)
    asi = estimate_asi(pcm.n, seed=seed)
    try:
        rev = rev_estimate(pcm)
    except ConvergenceError as exc:
        raise DataError(str(exc)) from exc
    gm = gm_estimate(pcm)
    report = compute_report(pcm, asi=asi)
    payload = {
        "n": pcm.n,
        "asi_seed": seed,
        "asi": asi,
        "lambda_max": rev.lambda_max,
        "rev_estimate": list(rev.weights.weights),
        "gm_estimate": list(gm.weights),
        **report.as_dict(),
    }
    if args.true_pv:
        try:
            v = PriorityVector.normalized([float(t) for t in args.true_pv.split(",")])
        except ValueError as exc:
            raise UsageError(f"bad --true-pv: {exc}") from exc
        if v.n != pcm.n:
            raise UsageError("--true-pv dimension does not match the PCM order")
        payload["ae_rev"] = avg_absolute_error(v, rev.weights)
        payload["re_rev"] = avg_relative_error(v, rev.weights)
        payload["ae_gm"] = avg_absolute_error(v, gm)
        payload["re_gm"] = avg_relative_error(v, gm)
    if args.format == "jsonl":
        _emit(json.dumps(payload), args.out)
        return EXIT_OK
    lines = [f"PCM {args.pcm_path} (n={pcm.n})"]
    lines.append(f"  lambda_max = {rev.lambda_max:.6f}")
    for key in ("si", "cr", "gi", "ki", "ati"):
        lines.append(f"  {key.upper():<3} = {payload[key]:.6f}")
    lines.append(f"  (ASI = {asi:.4f}, sample seed {seed}; CR is informational only)")
    lines.append("  REV estimate: " + ", ".join(f"{w:.6f}" for w in payload["rev_estimate"]))
    lines.append("  GM  estimate: " + ", ".join(f"{w:.6f}" for w in payload["gm_estimate"]))
    if "ae_rev" in payload:
        lines.append(
            f"  errors vs true PV: AE(REV)={payload['ae_rev']:.4f} "
            f"RE(REV)={payload['re_rev']:.4f} ({payload['re_rev'] * 100:.2f}%)"
        )
        lines.append(
            f"                     AE(GM)={payload['ae_gm']:.4f} "
            f"RE(GM)={payload['re_gm']:.4f} ({payload['re_gm'] * 100:.2f}%)"
        )
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def _write_manifest(out_path, config: dict, skipped: int):
    manifest = {"config": config, "skipped": skipped}
    Path(str(out_path) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def cmd_simulate(args) -> int:
    if min(args.runs, args.ne, args.nr, args.n_p, args.total, args.workers) <= 0:
        raise UsageError("all counts must be positive")
    seed = _resolve_seed(args.seed)
    config = {
        "subcommand": f"simulate {args.framework}",
        "n": args.n,
        "seed": seed,
        "format": args.format,
        "out": str(args.out),
    }
    try:
        if args.framework == "mse":
            config.update(runs=args.runs, ne=args.ne)
            summary = sim.run_mse_sf(args.n, n_runs=args.runs, n_e=args.ne, seed=seed)
            _emit(json.dumps(summary.as_dict(), indent=2), args.out)
            _write_manifest(args.out, config, summary.skipped)
        elif args.framework == "nee":
            config.update(nr=args.nr, np=args.n_p)
            summary = sim.run_nee_sf(args.n, n_r=args.nr, n_p=args.n_p, seed=seed)
            _emit(json.dumps(summary.as_dict(), indent=2), args.out)
            _write_manifest(args.out, config, summary.skipped)
        else:
            config.update(total=args.total, big_prob=args.big_prob, workers=args.workers)
            result = sim.run_msobe_sf(
                args.n,
                args.total,
                big=sim.BigErrorModel(apply_probability=args.big_prob),
                seed=seed,
                workers=args.workers,
            )
            writer = sim.write_records_csv if args.format == "csv" else sim.write_records_jsonl
            writer(result.records, args.out)
            _write_manifest(args.out, config, result.skipped)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    except OSError as exc:
        raise DataError(f"cannot write output: {exc}") from exc
    return EXIT_OK


def _format_cell(value, width=10):
    return (" " * width if value is None else f"{value:{width}.4f}")


def cmd_report(args) -> int:
    try:
        records = sim.read_records_csv(args.database_path)
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    if len(records) < args.classes:
        raise DataError("fewer records than classes")
    summaries = summarize_classes(records, args.index, args.error, args.classes)
    populated = [s for s in summaries if s.count > 0]
    mean_idx = [s.mean_index_value for s in populated]
    corr = {}
    for stat in ("q10", "median", "q90", "mean_error"):
        vals = [getattr(s, stat) for s in populated]
        try:
            corr[stat] = {"spearman": spearman(mean_idx, vals), "pearson": pearson(mean_idx, vals)}
        except ValueError:
            corr[stat] = {"spearman": None, "pearson": None}
    if args.format == "csv":
        lines = ["class,lo,hi,count,mean_index,q10,median,q90,mean_error"]
        for s in summaries:
            cells = [str(s.class_index), f"{s.lower:.8g}",
                     "inf" if s.upper == float("inf") else f"{s.upper:.8g}", str(s.count)]
            for v in (s.mean_index_value, s.q10, s.median, s.q90, s.mean_error):
                cells.append("" if v is None else f"{v:.8g}")
            lines.append(",".join(cells))
        lines.append("")
        lines.append("statistic,spearman,pearson")
        for stat, c in corr.items():
            sp = "" if c["spearman"] is None else f"{c['spearman']:.6f}"
            pe = "" if c["pearson"] is None else f"{c['pearson']:.6f}"
            lines.append(f"{stat},{sp},{pe}")
        _emit("\n".join(lines), args.out)
        return EXIT_OK
    lines = [
        f"index {args.index} vs error {args.error} over {len(records)} records, "
        f"{args.classes} classes"
    ]
    lines.append(f"{'i':>3} {'class':>21} {'count':>7} {'mean idx':>10} "
                 f"{'q10':>10} {'median':>10} {'q90':>10} {'mean':>10}")
    for s in summaries:
        hi = "inf" if s.upper == float("inf") else f"{s.upper:.4f}"
        lines.append(
            f"{s.class_index:>3} {f'{s.lower:.4f} - {hi}':>21} {s.count:>7}"
            f"{_format_cell(s.mean_index_value, 11)}{_format_cell(s.q10, 11)}"
            f"{_format_cell(s.median, 11)}{_format_cell(s.q90, 11)}{_format_cell(s.mean_error, 11)}"
        )
    lines.append("")
    lines.append("correlation of class-mean index values with error statistics:")
    for stat, c in corr.items():
        sp = "undefined" if c["spearman"] is None else f"{c['spearman']:.4f}"
        pe = "undefined" if c["pearson"] is None else f"{c['pearson']:.4f}"
        lines.append(f"  {stat:<11} spearman {sp:>10}   pearson {pe:>10}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_accept(args) -> int:
    pcm = _load_pcm(args.pcm_path)
    _require_reciprocal(pcm)
    method = args.method.upper()
    if args.threshold < 0:
        raise UsageError("--threshold must be nonnegative")
    try:
        if args.table:
            table = acc.read_table(args.table)
        else:
            table = acc.builtin_table(pcm.n, method)
        verdict = acc.assess_pcm(pcm, method, args.threshold, args.quantile, table)
    except acc.UnsupportedOrderError as exc:
        raise DataError(str(exc)) from exc
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    mean_s = "suspect, unused" if verdict.estimated_mean is None else f"{verdict.estimated_mean:.4f}"
    print(f"ATI = {verdict.ati:.4f} -> class {verdict.class_index} of the {method} table")
    print(
        f"estimated {table.loss} quantiles: q10={verdict.estimated_q10:.4f} "
        f"median={verdict.estimated_median:.4f} q90={verdict.estimated_q90:.4f} "
        f"mean={mean_s}"
    )
    print(
        f"verdict: {'ACCEPT' if verdict.accepted else 'REJECT'} "
        f"({verdict.quantile_choice} vs threshold {verdict.threshold:g})"
    )
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "report":
            return cmd_report(args)
        return cmd_accept(args)
    except UsageError as exc:
        print(f"pcmkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"pcmkit: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
