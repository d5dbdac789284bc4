"""CSV / JSON writers for sweep results and per-epoch loss logs."""

import csv
import io
import json
import math

from .arrays import atomic_write_bytes

METRICS_HEADER = ("variant", "seed", "psnr_db", "ssim", "seconds")
LOSS_HEADER = ("epoch", "total", "dc", "tv", "lambda", "lambda_s")


def _num(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_bytes(path, buf.getvalue().encode())


def write_metrics_csv(path, runs):
    """One line per run record; missing cells leave the metric fields empty."""
    _write_csv(path, METRICS_HEADER,
               [(r.label, r.seed, _num(r.psnr), _num(r.ssim), _num(r.seconds)) for r in runs])


def write_loss_log(path, history):
    _write_csv(path, LOSS_HEADER, [[h["epoch"]] + [repr(float(h[k])) for k in LOSS_HEADER[1:]]
                                   for h in history])


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, obj):
    """Strict JSON (NaN and infinities become ``null``)."""
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    atomic_write_bytes(path, text.encode())


def write_sweep(result, csv_path, json_path):
    write_metrics_csv(csv_path, result.runs)
    write_json(json_path, result.to_dict())
