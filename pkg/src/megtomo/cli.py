"""Command line front end: ``megtomo track|bench|sweep``.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""
import argparse
import datetime
import os
import sys
from pathlib import Path

from . import __version__
from .bench import aggregate, noise_sweep, run_ensemble, run_member
from .config import (
    ConfigError,
    apply_overrides,
    list_presets,
    load_config_file,
    load_preset,
    scenario_from_dict,
    scenario_to_dict,
)
from .exceptions import EnsembleError, EstimatorStepError
from .io import (
    sha256,
    stats_dict,
    trace_dict,
    write_aggregate_csv,
    write_json,
    write_rows,
    write_trace_csv,
)
from .photons import write_counts_csv


class UsageError(Exception):
    pass


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = (datetime.datetime.fromtimestamp(int(epoch), datetime.timezone.utc) if epoch
           else datetime.datetime.now(datetime.timezone.utc))
    return now.replace(microsecond=0).isoformat()


def resolve_config(args):
    if bool(args.config) == bool(args.preset):
        raise UsageError("give exactly one of --config or --preset")
    if args.config:
        data, lines = load_config_file(args.config)
        source = args.config
    else:
        data, lines = load_preset(args.preset)
        source = f"preset {args.preset}"
    data = apply_overrides(data, args.set)
    if args.seed is not None:
        data["master_seed"] = args.seed
    return scenario_from_dict(data, lines, source)


def write_manifest(out_dir, command, cfg, files, extra=None):
    """Record how to reproduce ``out_dir``: version, resolved config, seed and file digests."""
    manifest = {
        "tool": "megtomo",
        "version": __version__,
        "command": command,
        "config": scenario_to_dict(cfg),
        "master_seed": cfg.master_seed,
        "timestamp": _timestamp(),
        "outputs": [{"path": str(f.relative_to(out_dir)), "sha256": sha256(f)} for f in files],
    }
    if extra:
        manifest.update(extra)
    write_json(out_dir / "manifest.json", manifest)


def cmd_track(args, cfg, out_dir):
    trace = run_member(cfg, 0, 0)
    files = [out_dir / "trace.csv", out_dir / "counts.csv", out_dir / "trace.json"]
    write_trace_csv(files[0], trace)
    write_counts_csv(files[1], trace.count_records())
    write_json(files[2], trace_dict(trace, scenario_to_dict(cfg)))
    write_manifest(out_dir, "track", cfg, files, {"member": {"state": 0, "repeat": 0}})
    print(f"final infidelity {trace.infidelity[-1]:.3e}; wrote {out_dir}")


def _bench_outputs(out_dir, cfg, traces, stats, write_traces=True):
    files = []
    if write_traces:
        trace_dir = out_dir / "traces"
        trace_dir.mkdir(exist_ok=True)
        for trace in traces:
            _, s, r = trace.seed
            path = trace_dir / f"trace_s{s:03d}_r{r:02d}.csv"
            write_trace_csv(path, trace)
            files.append(path)
    agg = out_dir / "aggregate.csv"
    write_aggregate_csv(agg, stats)
    summary = out_dir / "summary.json"
    write_json(summary, {"config": scenario_to_dict(cfg), "master_seed": cfg.master_seed,
                         "stats": stats_dict(stats)})
    return files + [agg, summary]


def cmd_bench(args, cfg, out_dir):
    traces = run_ensemble(cfg, args.jobs)
    stats = aggregate(traces, cfg.threshold)
    files = _bench_outputs(out_dir, cfg, traces, stats)
    write_manifest(out_dir, "bench", cfg, files)
    its = stats.iterations_to_threshold
    print(f"{stats.n_traces} traces; iterations to {cfg.threshold:g}: median {its.median} "
          f"(q25 {its.q25}, q75 {its.q75}); wrote {out_dir}")


def parse_levels(text):
    try:
        levels = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--levels must be comma-separated numbers, got {text!r}") from None
    if not levels:
        raise UsageError("--levels is empty")
    if any(level < 0 for level in levels):
        raise UsageError("--levels must be >= 0")
    return levels


def cmd_sweep(args, cfg, out_dir):
    levels = parse_levels(args.levels)
    points = noise_sweep(cfg, levels, args.jobs)
    files = []
    rows = []
    for level, point in points.items():
        sub = out_dir / f"level_{level:g}"
        sub.mkdir(exist_ok=True)
        agg = sub / "aggregate.csv"
        write_aggregate_csv(agg, point.stats)
        files.append(agg)
        rows.append({"level": level, "snr": point.snr, "snr_total": point.snr_total,
                     "stats": stats_dict(point.stats)})
    table = out_dir / "sweep.csv"
    write_rows(table, ["level", "snr", "snr_total", "median_tail_infidelity",
                        "median_iterations_to_threshold", "censored_fraction"],
                [[r["level"], r["snr"], r["snr_total"], r["stats"]["tail_infidelity"]["median"],
                  r["stats"]["iterations_to_threshold"]["median"], r["stats"]["censored_fraction"]]
                 for r in rows])
    summary = out_dir / "summary.json"
    write_json(summary, {"config": scenario_to_dict(cfg), "master_seed": cfg.master_seed,
                         "levels": rows})
    files += [table, summary]
    write_manifest(out_dir, "sweep", cfg, files, {"levels": levels})
    for r in rows:
        print(f"level {r['level']:g}: snr {r['snr']:.3g}, median tail infidelity "
              f"{r['stats']['tail_infidelity']['median']:.3g}")


COMMANDS = {"track": cmd_track, "bench": cmd_bench, "sweep": cmd_sweep}


def build_parser():
    parser = argparse.ArgumentParser(prog="megtomo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"megtomo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML scenario config")
        p.add_argument("--preset", help=f"shipped preset ({', '.join(list_presets())})")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="override master_seed")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="dotted-path override, e.g. noise.signal_rate=1e6")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (output unaffected)")
        if name == "sweep":
            p.add_argument("--levels", required=True,
                           help="comma-separated extra background rates, e.g. 0,1000,2500")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if args.command == "sweep":
            parse_levels(args.levels)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, UsageError) as exc:
        print(f"megtomo: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"megtomo: error: cannot create output directory: {exc}", file=sys.stderr)
        return 2
    try:
        COMMANDS[args.command](args, cfg, out_dir)
    except (EstimatorStepError, EnsembleError) as exc:
        print(f"megtomo: run failed: {exc}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(f"megtomo: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
