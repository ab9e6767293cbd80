"""CSV and JSON writers for traces, aggregates and run summaries.

Numbers are written with 12 significant digits so files diff cleanly
across platforms. Every CSV has exactly one header row.
"""
import csv
import hashlib
import json

import numpy as np

SIG_DIGITS = 12


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{SIG_DIGITS}g}"


def _round(x):
    return float(f"{float(x):.{SIG_DIGITS}g}")


def jsonable(obj):
    """Recursively convert to JSON types, rounding floats to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(obj)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def write_trace_csv(path, trace):
    """``iteration, basis_label, infidelity, purity, p_true_*, p_pred_*``."""
    d = trace.p_true.shape[1]
    header = (["iteration", "basis_label", "infidelity", "purity"]
              + [f"p_true_{i}" for i in range(d)] + [f"p_pred_{i}" for i in range(d)])
    rows = (
        [int(t), trace.basis_labels[k], trace.infidelity[k], trace.purity[k],
         *trace.p_true[k], *trace.p_pred[k]]
        for k, t in enumerate(trace.iterations)
    )
    write_rows(path, header, rows)


def trace_dict(trace, config=None):
    """JSON form of a trace with an optional config echo."""
    out = {
        "seed": list(trace.seed) if isinstance(trace.seed, tuple) else trace.seed,
        "iteration": trace.iterations,
        "basis_label": trace.basis_labels,
        "infidelity": trace.infidelity,
        "purity": trace.purity,
        "p_true": trace.p_true,
        "p_pred": trace.p_pred,
    }
    if config is not None:
        out["config"] = config
    return out


def write_aggregate_csv(path, stats, extra=None):
    """Pointwise ``iteration, median, q25, q75``; ``extra`` adds constant columns."""
    extra = extra or {}
    header = ["iteration", "median", "q25", "q75"] + list(extra)
    rows = (
        [k + 1, stats.median[k], stats.q25[k], stats.q75[k], *extra.values()]
        for k in range(len(stats.median))
    )
    write_rows(path, header, rows)


def stats_dict(stats):
    """Table-1-style summary of an ``AggregateStats``."""
    return {
        "n_traces": stats.n_traces,
        "threshold": stats.threshold,
        "iterations_to_threshold": stats.iterations_to_threshold.as_dict(),
        "censored_fraction": stats.censored_fraction,
        "mean_infidelity": stats.mean_infidelity.as_dict(),
        "mean_infidelity_full": stats.mean_infidelity_full.as_dict(),
        "tail_infidelity": stats.tail_infidelity.as_dict(),
        "median_purity_final": stats.median_purity,
        "quartile_method": "linear interpolation between order statistics",
        "censored_convention": "traces that never cross the threshold rank above all others",
        "final_median_infidelity": stats.median[-1],
    }


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
