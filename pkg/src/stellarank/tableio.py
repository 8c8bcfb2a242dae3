"""CSV and JSON persistence of threshold tables with a run manifest."""

import csv
import json
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .engine import OptimizerConfig, ThresholdTable

CSV_COLUMNS = ("m", "raw", "normalized", "converged", "dim_used")


@dataclass
class RunManifest:
    family: dict
    m_max: int
    optimizer: dict
    outputs: dict = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    version: str = __version__
    python: str = field(default_factory=platform.python_version)
    converged: bool = True

    @classmethod
    def for_table(cls, table, cfg, outputs=None):
        return cls(
            family=table.family.to_dict(),
            m_max=table.max_rank,
            optimizer=cfg.to_dict(),
            outputs=dict(outputs or {}),
            converged=table.converged,
        )

    def config(self):
        return OptimizerConfig.from_dict(self.optimizer)


def write_csv(table, path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for e, raw, norm in zip(table.entries, table.raw, table.normalized):
            w.writerow([e.m, repr(float(raw)), repr(float(norm)), int(bool(e.converged)), e.dim_used])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        {"m": int(r["m"]), "raw": float(r["raw"]), "normalized": float(r["normalized"]),
         "converged": bool(int(r["converged"])), "dim_used": int(r["dim_used"]) if r["dim_used"] else None}
        for r in rows
    ]


def write_json(table, path, manifest=None):
    path = Path(path)
    doc = {"table": table.to_dict()}
    if manifest is not None:
        doc["manifest"] = asdict(manifest)
    path.write_text(json.dumps(doc, indent=2))
    return path


def read_json(path):
    """Load ``(table, manifest)``; the manifest is ``None`` if absent."""
    doc = json.loads(Path(path).read_text())
    table = ThresholdTable.from_dict(doc["table"])
    manifest = doc.get("manifest")
    if manifest is not None:
        manifest = RunManifest(**manifest)
    return table, manifest
