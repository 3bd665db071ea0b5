"""Labeled text corpora with generation provenance: CSV/JSON persistence,
deduplication, class statistics, and stratified holdout splits."""

from __future__ import annotations

import csv
import json
import random
import re
from dataclasses import dataclass
from pathlib import Path

from .feature_model import SynthlineError

CSV_COLUMNS = [
    "id",
    "text",
    "label",
    "label_description",
    "requirement_type",
    "specification_level",
    "requirement_source",
    "specification_format",
    "language",
    "domain",
    "llm",
    "temperature",
    "top_p",
    "run_id",
    "created_at",
]

_FLOAT_COLUMNS = {"temperature", "top_p"}
_WS_RE = re.compile(r"\s+")


class DatasetError(SynthlineError):
    pass


@dataclass(frozen=True)
class SyntheticSample:
    """One generated text with its label and full provenance metadata."""

    id: str
    text: str
    label: str
    label_description: str = ""
    requirement_type: str = ""
    specification_level: str = ""
    requirement_source: str = ""
    specification_format: str = ""
    language: str = ""
    domain: str = ""
    llm: str = ""
    temperature: float = 0.0
    top_p: float = 1.0
    run_id: str = ""
    created_at: str = ""  # RFC 3339 UTC

    def __post_init__(self):
        if not self.text:
            raise DatasetError(f"sample {self.id!r} has empty text")
        if not self.label:
            raise DatasetError(f"sample {self.id!r} has empty label")
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            # NUL cannot be represented in the CSV interchange format
            if isinstance(value, str) and "\x00" in value:
                raise DatasetError(f"sample {self.id!r}: field '{name}' contains NUL")

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_COLUMNS}

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticSample":
        kwargs = {}
        for name in CSV_COLUMNS:
            v = data.get(name, "")
            if name in _FLOAT_COLUMNS:
                v = float(v) if v not in ("", None) else 0.0
            kwargs[name] = v
        return cls(**kwargs)


@dataclass(frozen=True)
class Dataset:
    samples: tuple[SyntheticSample, ...] = ()
    source: str = "synthetic"  # synthetic | real | mixed

    def __post_init__(self):
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise DatasetError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def texts(self) -> list[str]:
        return [s.text for s in self.samples]

    def labels(self) -> list[str]:
        return [s.label for s in self.samples]

    def class_stats(self) -> "ClassStats":
        per_class: dict[str, int] = {}
        for s in self.samples:
            per_class[s.label] = per_class.get(s.label, 0) + 1
        return ClassStats(per_class=per_class, total=len(self.samples))

    @staticmethod
    def concat(*datasets: "Dataset") -> "Dataset":
        samples = tuple(s for d in datasets for s in d.samples)
        sources = {d.source for d in datasets}
        return Dataset(samples, source=sources.pop() if len(sources) == 1 else "mixed")


@dataclass(frozen=True)
class ClassStats:
    per_class: dict[str, int]
    total: int

    def __post_init__(self):
        if sum(self.per_class.values()) != self.total:
            raise DatasetError("per-class counts do not sum to total")


# ---------------------------------------------------------------------------
# Writers (streaming: used as generation sinks) and whole-dataset I/O

class DatasetWriter:
    """Streaming sink; write() appends one sample, close() finalizes."""

    def write(self, sample: SyntheticSample) -> None:
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class CsvDatasetWriter(DatasetWriter):
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._fh = self.path.open("w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(CSV_COLUMNS)

    def write(self, sample: SyntheticSample) -> None:
        row = sample.to_dict()
        self._writer.writerow([_format_cell(row[c]) for c in CSV_COLUMNS])

    def close(self) -> None:
        self._fh.close()


class JsonDatasetWriter(DatasetWriter):
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._rows: list[dict] = []

    def write(self, sample: SyntheticSample) -> None:
        self._rows.append(sample.to_dict())

    def close(self) -> None:
        with self.path.open("w", encoding="utf-8") as fh:
            json.dump(self._rows, fh, ensure_ascii=False, indent=2)
            fh.write("\n")


class ListSink(DatasetWriter):
    def __init__(self):
        self.samples: list[SyntheticSample] = []

    def write(self, sample: SyntheticSample) -> None:
        self.samples.append(sample)

    def close(self) -> None:
        pass

    def dataset(self, source: str = "synthetic") -> Dataset:
        return Dataset(tuple(self.samples), source=source)


def open_dataset_writer(path: str | Path, format: str) -> DatasetWriter:
    fmt = format.lower()
    if fmt == "csv":
        return CsvDatasetWriter(path)
    if fmt == "json":
        return JsonDatasetWriter(path)
    raise DatasetError(f"unknown dataset format '{format}'")


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_dataset(dataset: Dataset, format: str, path: str | Path) -> None:
    """Write the whole dataset; CSV uses the fixed 15-column header with
    RFC 4180 quoting, JSON an array of objects with the same keys."""
    with open_dataset_writer(path, format) as w:
        for s in dataset.samples:
            w.write(s)


def read_dataset(
    path: str | Path,
    format: str | None = None,
    column_mapping: dict[str, str] | None = None,
    source: str = "synthetic",
) -> Dataset:
    """Read a dataset file; the inverse of :func:`write_dataset` on its own
    output.

    `column_mapping` ingests external corpora: a map from our column names
    (at least ``text`` and ``label``) to the file's column names. Unmapped
    provenance columns default to empty and `source` defaults to ``real``.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"no such file: {path}")
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if column_mapping is not None and source == "synthetic":
        source = "real"

    fmt = format.lower()
    if fmt == "csv":
        rows = _read_csv_rows(path, column_mapping)
    elif fmt == "json":
        rows = _read_json_rows(path, column_mapping)
    else:
        raise DatasetError(f"unknown dataset format '{format}'")

    samples = []
    for line_no, row in rows:
        try:
            samples.append(SyntheticSample.from_dict(row))
        except (DatasetError, ValueError) as e:
            raise DatasetError(f"{path}:{line_no}: malformed row: {e}") from None
    return Dataset(tuple(samples), source=source)


def _apply_mapping(row: dict, column_mapping: dict[str, str] | None, ordinal: int) -> dict:
    if column_mapping is None:
        return row
    mapped = {ours: row.get(theirs, "") for ours, theirs in column_mapping.items()}
    if not mapped.get("id"):
        mapped["id"] = f"row-{ordinal:06d}"
    return mapped


def _read_csv_rows(path: Path, column_mapping: dict[str, str] | None):
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if column_mapping is None:
            missing = [c for c in ("text", "label") if c not in header]
        else:
            for ours in ("text", "label"):
                if ours not in column_mapping:
                    raise DatasetError(f"column mapping must map '{ours}'")
            missing = [c for c in (column_mapping["text"], column_mapping["label"]) if c not in header]
        if missing:
            raise DatasetError(f"{path}: missing required column(s): {', '.join(missing)}")
        out = []
        for i, row in enumerate(reader):
            if None in row:
                raise DatasetError(f"{path}:{reader.line_num}: row has more cells than the header")
            out.append((reader.line_num, _apply_mapping(row, column_mapping, i)))
        return out


def _read_json_rows(path: Path, column_mapping: dict[str, str] | None):
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DatasetError(f"{path}: invalid JSON: {e}") from None
    if not isinstance(data, list):
        raise DatasetError(f"{path}: expected a JSON array of objects")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, dict):
            raise DatasetError(f"{path}: element {i} is not an object")
        for col in ("text", "label") if column_mapping is None else ():
            if col not in row:
                raise DatasetError(f"{path}: element {i} missing required key '{col}'")
        out.append((i, _apply_mapping(row, column_mapping, i)))
    return out


# ---------------------------------------------------------------------------
# Deduplication

def normalize_text(text: str) -> str:
    """Dedup key: trim, collapse whitespace runs, case-fold."""
    return _WS_RE.sub(" ", text.strip()).casefold()


def deduplicate(dataset: Dataset, strict: bool = False) -> tuple[Dataset, int]:
    """Drop repeated texts, keeping the first occurrence in stable order.

    Default mode compares whitespace-collapsed, case-folded text; `strict`
    compares raw bytes.
    """
    seen: set[str] = set()
    kept: list[SyntheticSample] = []
    for s in dataset.samples:
        key = s.text if strict else normalize_text(s.text)
        if key in seen:
            continue
        seen.add(key)
        kept.append(s)
    return Dataset(tuple(kept), source=dataset.source), len(dataset.samples) - len(kept)


# ---------------------------------------------------------------------------
# Stratified split

def stratified_split(
    dataset: Dataset, test_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Deterministic per-class holdout split.

    Per class c with n_c samples: the test side gets round(test_fraction *
    n_c), clamped to [1, n_c - 1] when n_c >= 2; singleton classes go to
    train. Selection is a seeded shuffle; both sides keep dataset order.
    """
    if not 0 < test_fraction < 1:
        raise DatasetError("test_fraction must be in (0, 1)")
    if len(dataset) == 0:
        raise DatasetError("cannot split an empty dataset")

    by_class: dict[str, list[int]] = {}
    for i, s in enumerate(dataset.samples):
        by_class.setdefault(s.label, []).append(i)

    rng = random.Random(seed)
    test_idx: set[int] = set()
    for label in sorted(by_class):
        indices = list(by_class[label])
        n = len(indices)
        if n < 2:
            continue
        k = min(max(round(test_fraction * n), 1), n - 1)
        rng.shuffle(indices)
        test_idx.update(indices[:k])

    train = tuple(s for i, s in enumerate(dataset.samples) if i not in test_idx)
    test = tuple(s for i, s in enumerate(dataset.samples) if i in test_idx)
    return (
        Dataset(train, source=dataset.source),
        Dataset(test, source=dataset.source),
    )
