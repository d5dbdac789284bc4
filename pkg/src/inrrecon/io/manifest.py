"""Run manifest: what was run, with which settings, and what it wrote."""

import datetime as _dt
import hashlib
import json
import os

from .arrays import atomic_write_bytes

MANIFEST_NAME = "manifest.json"
# files holding wall-clock timings; listed without size or hash
VOLATILE = ("metrics.csv",)


def toolkit_version():
    from .. import __version__
    return __version__


def utc_now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def list_outputs(run_dir):
    """Every file under ``run_dir`` except the manifest, sorted by relative path.

    Files named in ``VOLATILE`` carry timings, so only their path is
    recorded and manifests of repeated runs still match.
    """
    entries = []
    for root, _, files in os.walk(run_dir):
        for name in files:
            full = os.path.join(root, name)
            rel = os.path.relpath(full, run_dir).replace(os.sep, "/")
            if rel == MANIFEST_NAME or name.startswith(".tmp-"):
                continue
            if name in VOLATILE:
                entries.append({"path": rel, "volatile": True})
            else:
                entries.append({"path": rel, "bytes": os.path.getsize(full),
                                "sha256": _sha256(full)})
    return sorted(entries, key=lambda e: e["path"])


def write_manifest(run_dir, command, fingerprint, started, inputs=(), metrics=None):
    """Write ``manifest.json`` into ``run_dir`` and return its content.

    Timestamps live under ``"timestamps"``; everything else is a pure
    function of the run's inputs and deterministic outputs.
    """
    manifest = {
        "command": command,
        "fingerprint": fingerprint,
        "version": toolkit_version(),
        "timestamps": {"started": started, "finished": utc_now()},
        "inputs": [os.fspath(p) for p in inputs],
        "outputs": list_outputs(run_dir),
        "metrics": metrics or {},
    }
    text = json.dumps(manifest, indent=2, sort_keys=True, allow_nan=True) + "\n"
    atomic_write_bytes(os.path.join(run_dir, MANIFEST_NAME), text.encode())
    return manifest
