"""Deterministic report serialization and run manifests.

Reports are {"manifest": ..., "body": ...}: the body holds every number a
verdict depends on; the manifest records what produced it.  Bodies are
serialized canonically (sorted keys, repr floats, trailing newline), so two
runs with identical manifests (up to timestamp) emit byte-identical bodies
regardless of the --threads setting.
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import io
import json
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def body_bytes(body) -> bytes:
    return canonical_json(body).encode()


def sha256_of_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def sha256_of_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    command: str
    scenario_hash: str
    grid: dict
    thresholds: dict
    threads: int = 1
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "scenario_hash": self.scenario_hash,
            "grid": self.grid,
            "thresholds": self.thresholds,
            "threads": self.threads,
            "versions": {
                "pcgrav": __version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
            "timestamp": datetime.datetime.now(
                datetime.timezone.utc).isoformat(),
            **self.extras,
        }


def assemble_report(manifest: RunManifest, body: dict) -> dict:
    return {"manifest": manifest.as_dict(), "body": body}


def write_report(out_dir, name: str, manifest: RunManifest, body: dict,
                 echo=False) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.json"
    path.write_text(canonical_json(assemble_report(manifest, body)))
    if echo:
        sys.stdout.write(canonical_json(body))
    return path


def write_csv(out_dir, name: str, header, rows) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    path = out_dir / f"{name}.csv"
    path.write_text(buffer.getvalue())
    return path
