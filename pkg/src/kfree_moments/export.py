"""CSV / JSON serialization and run manifests.

Every file is written atomically (temp file in the target directory, then
``os.replace``).  Floats in CSV use 17 significant digits so a round trip
through text is exact.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__

SCHEMA_VERSION = 1

MOMENT_COLUMNS = ("k", "p", "N", "M", "value", "err", "label")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def atomic_write(path, data: str | bytes) -> Path:
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def csv_text(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def export_csv(rows: Iterable[dict], path, columns: Sequence[str]) -> Path:
    """Header row plus one record per row; missing keys become empty cells."""
    return atomic_write(path, csv_text(rows, columns))


def read_csv(path) -> list[dict]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def json_text(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(body, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if hasattr(o, "numerator") and hasattr(o, "denominator"):
        return f"{o.numerator}/{o.denominator}"
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def export_json(payload: dict, path) -> Path:
    return atomic_write(path, json_text(payload))


def moment_row(res) -> dict:
    return {"k": res.k, "p": res.p, "N": res.n, "M": res.m, "value": res.value,
            "err": res.err_estimate, "label": res.label}


def moment_from_row(row: dict):
    from .quad import MomentResult

    k = int(row["k"]) if row.get("k") not in (None, "") else None
    return MomentResult(k, float(row["p"]), int(row["N"]), int(row["M"]),
                        float(row["value"]), float(row["err"]), row.get("label", ""))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    params: dict
    threads: int
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    input_hashes: dict = field(default_factory=dict)
    wall_time: float = 0.0
    outputs: list = field(default_factory=list)

    def add_input(self, path) -> None:
        self.input_hashes[str(path)] = sha256_file(path)

    def to_json(self) -> str:
        return json_text({"manifest": asdict(self)})

    @staticmethod
    def sidecar(path) -> Path:
        path = Path(path)
        return path.with_name(path.name + ".manifest.json")

    def write_for(self, artifact) -> Path:
        """Write this manifest next to ``artifact`` as ``<artifact>.manifest.json``."""
        return atomic_write(self.sidecar(artifact), self.to_json())
