"""Dataset records and ingestion from jsonl files or directories of .lean files."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_DECL = re.compile(r"^\s*(theorem|lemma)\s", re.M)


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    formal_statement: str
    nl_description: Optional[str] = None
    source: str = ""
    domain_label: Optional[str] = None

    def __post_init__(self):
        if not self.formal_statement.strip():
            raise ValueError(f"record {self.id!r}: empty formal_statement")

    def to_dict(self) -> dict:
        return {"id": self.id, "formal_statement": self.formal_statement,
                "nl_description": self.nl_description, "source": self.source,
                "domain": self.domain_label}


@dataclass
class IngestReport:
    records: int = 0
    skipped: int = 0
    diagnostics: list[str] = field(default_factory=list)

    def skip(self, msg: str) -> None:
        self.skipped += 1
        self.diagnostics.append(msg)
        log.warning(msg)


def detect_format(path: Path) -> str:
    return "lean-dir" if path.is_dir() else "jsonl"


def _from_json(obj: dict, fallback_id: str, source: str) -> DatasetRecord:
    stmt = obj.get("formal_statement")
    if not isinstance(stmt, str) or not stmt.strip():
        raise ValueError("missing formal_statement")
    rid = obj.get("id", fallback_id)
    return DatasetRecord(
        id=str(rid),
        formal_statement=stmt,
        nl_description=obj.get("nl_description"),
        source=str(obj.get("source", source)),
        domain_label=obj.get("domain", obj.get("domain_label")),
    )


def ingest(path, fmt: str = "auto", report: IngestReport | None = None) -> Iterator[DatasetRecord]:
    """Yield records; malformed entries are skipped and noted in ``report``."""
    path = Path(path)
    report = report if report is not None else IngestReport()
    if not path.exists():
        raise FileNotFoundError(f"input {path} does not exist")
    fmt = detect_format(path) if fmt == "auto" else fmt
    seen: set[str] = set()

    def emit(rec: DatasetRecord):
        if rec.id in seen:
            report.skip(f"{path}: duplicate id {rec.id!r}")
            return None
        seen.add(rec.id)
        report.records += 1
        return rec

    if fmt == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    if not isinstance(obj, dict):
                        raise ValueError("not an object")
                    rec = _from_json(obj, f"{path.stem}:{n}", path.stem)
                except ValueError as exc:
                    report.skip(f"{path}:{n}: {exc}")
                    continue
                if (rec := emit(rec)) is not None:
                    yield rec
    elif fmt in ("lean-dir", "lean"):
        for f in sorted(path.rglob("*.lean")):
            text = f.read_text(encoding="utf-8")
            n = len(_DECL.findall(text))
            rid = f.relative_to(path).as_posix()
            if n != 1:
                report.skip(f"{rid}: expected one theorem, found {n}")
                continue
            if (rec := emit(DatasetRecord(rid, text.strip(), source=path.name))) is not None:
                yield rec
    else:
        raise ValueError(f"unknown input format {fmt!r}")


def load_records(path, fmt: str = "auto") -> tuple[list[DatasetRecord], IngestReport]:
    report = IngestReport()
    return list(ingest(path, fmt, report)), report


def read_jsonl(path) -> list[dict]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def write_jsonl(path, rows) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(dumps(row) + "\n")
