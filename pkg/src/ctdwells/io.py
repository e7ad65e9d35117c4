"""Output files: a header block with version and config, then CSV or JSON.

Floats are written with 17 significant digits so values round-trip exactly.
Files are written to a temporary sibling and renamed into place, so a failed
run never leaves a partial file behind.
"""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import os
import sys
import tempfile
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .config import ExperimentConfig

TIMESTAMP_PREFIX = "# timestamp:"


def library_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def header_lines(cfg: ExperimentConfig, timestamp: str | None = None) -> list[str]:
    lines = [
        f"# ctdwells {library_version()}",
        f"# command: {cfg.command}",
        f"{TIMESTAMP_PREFIX} {timestamp or _now()}",
    ]
    lines += [f"# config: {k}={v}" for k, v in cfg.items()]
    return lines


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return v


def format_csv(rows: list[dict], cfg: ExperimentConfig, timestamp: str | None = None) -> str:
    buf = io.StringIO()
    buf.write("\n".join(header_lines(cfg, timestamp)) + "\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def format_json(payload: dict, cfg: ExperimentConfig, timestamp: str | None = None) -> str:
    doc = {
        "header": {
            "library": f"ctdwells {library_version()}",
            "command": cfg.command,
            "timestamp": timestamp or _now(),
            "config": dict(cfg.items()),
        },
        **payload,
    }
    return json.dumps(doc, indent=2, default=_json_default) + "\n"


def render(cfg: ExperimentConfig, rows: list[dict], extra: dict | None = None, timestamp: str | None = None) -> str:
    if cfg.format == "json":
        return format_json({"rows": rows, **(extra or {})}, cfg, timestamp)
    return format_csv(rows, cfg, timestamp)


def write_output(text: str, out: str) -> None:
    """Write ``text`` to ``out`` atomically ('-' means stdout)."""
    if out in ("-", ""):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    d = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(prefix=".ctdwells-", dir=d)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def strip_timestamp(text: str) -> str:
    """Drop the timestamp line (CSV) or field (JSON) so reruns can be compared."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        doc.get("header", {}).pop("timestamp", None)
        return json.dumps(doc, indent=2)
    return "\n".join(ln for ln in text.splitlines() if not ln.startswith(TIMESTAMP_PREFIX))
