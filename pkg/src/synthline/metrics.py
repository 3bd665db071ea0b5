"""Direct diversity evaluation of a labeled corpus: vocabulary statistics,
average pairwise cosine similarity (overall and within classes), n-gram
repetition, and the same-class similarity histogram."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset
from .embedding import Embedder
from .feature_model import SynthlineError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_NGRAM_SIZES = (2, 3, 4)
DEFAULT_BIN_COUNT = 20


class MetricsError(SynthlineError):
    pass


def tokenize(text: str) -> list[str]:
    """Case-fold, then split on maximal runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.casefold())


def vocabulary_stats(dataset: Dataset) -> tuple[int, float]:
    """(distinct token count, distinct tokens per sample) over the corpus."""
    if len(dataset) == 0:
        raise MetricsError("vocabulary stats need a non-empty dataset")
    vocab: set[str] = set()
    for text in dataset.texts():
        vocab.update(tokenize(text))
    return len(vocab), len(vocab) / len(dataset)


# ---------------------------------------------------------------------------
# Embedding-based similarity

def _normalized(vectors: np.ndarray) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise MetricsError("vectors must form a 2-D array")
    if not np.all(np.isfinite(vectors)):
        raise MetricsError("vectors must be finite")
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0):
        raise MetricsError("zero-norm vector has no cosine similarity")
    return vectors / norms[:, None]


def average_pairwise_similarity(vectors: np.ndarray) -> float:
    """Mean cosine similarity over all unordered distinct pairs.

    Uses the identity sum_{i<j} u_i . u_j = (|sum u|^2 - n) / 2 on the
    normalized rows, which is O(n d) and deterministic.
    """
    unit = _normalized(vectors)
    n = unit.shape[0]
    if n < 2:
        raise MetricsError("pairwise similarity needs at least 2 vectors")
    total = np.dot(unit.sum(axis=0), unit.sum(axis=0))
    return float((total - n) / (n * (n - 1)))


def _class_vectors(dataset: Dataset, vectors: np.ndarray) -> dict[str, np.ndarray]:
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(dataset.labels()):
        by_class.setdefault(label, []).append(i)
    return {label: vectors[idx] for label, idx in by_class.items()}


def intra_class_aps(
    dataset: Dataset, embedder: Embedder, vectors: np.ndarray | None = None
) -> tuple[dict[str, float], float]:
    """Per-class APS over classes with at least 2 samples, and their
    unweighted (macro) mean. Smaller classes are omitted from the map."""
    if vectors is None:
        vectors = embedder.embed(dataset.texts())
    per_class: dict[str, float] = {}
    for label, rows in _class_vectors(dataset, vectors).items():
        if rows.shape[0] >= 2:
            per_class[label] = average_pairwise_similarity(rows)
    if not per_class:
        raise MetricsError("no class has at least 2 samples")
    macro = sum(per_class.values()) / len(per_class)
    return per_class, macro


def _same_class_pair_similarities(dataset: Dataset, vectors: np.ndarray) -> np.ndarray:
    unit = _normalized(vectors)
    chunks = []
    for label, rows in _class_vectors(dataset, unit).items():
        n = rows.shape[0]
        if n < 2:
            continue
        sims = rows @ rows.T
        chunks.append(sims[np.triu_indices(n, k=1)])
    if not chunks:
        raise MetricsError("no class has at least 2 samples")
    return np.concatenate(chunks)


def similarity_histogram(
    dataset: Dataset,
    embedder: Embedder,
    bin_count: int = DEFAULT_BIN_COUNT,
    vectors: np.ndarray | None = None,
) -> list[tuple[float, int]]:
    """Equal-width bins over [-1, 1] of all same-class pair similarities.

    Returns (bin lower edge, count) pairs; the last bin is closed above so
    similarity 1.0 lands in it.
    """
    if bin_count < 1:
        raise MetricsError("bin_count must be positive")
    if vectors is None:
        vectors = embedder.embed(dataset.texts())
    sims = _same_class_pair_similarities(dataset, vectors)
    width = 2.0 / bin_count
    idx = np.minimum(((sims + 1.0) / width).astype(int), bin_count - 1)
    counts = np.bincount(idx, minlength=bin_count)
    return [(-1.0 + i * width, int(counts[i])) for i in range(bin_count)]


def histogram_to_csv(histogram: list[tuple[float, int]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("bin_lower,count\n")
        for lower, count in histogram:
            fh.write(f"{lower},{count}\n")


# ---------------------------------------------------------------------------
# N-gram repetition

def ngram_counts(token_streams: Iterable[Sequence[str]], n_sizes: Iterable[int]) -> Counter:
    counts: Counter = Counter()
    sizes = sorted(set(n_sizes))
    if not sizes or any(n < 1 for n in sizes):
        raise MetricsError("n-gram sizes must be a non-empty set of integers >= 1")
    for tokens in token_streams:
        for n in sizes:
            for i in range(len(tokens) - n + 1):
                counts[tuple(tokens[i : i + n])] += 1
    return counts


def ingf(dataset: Dataset, n_sizes: Iterable[int] = DEFAULT_NGRAM_SIZES) -> float:
    """Mean occurrence count per distinct n-gram across the corpus; 1.0 means
    every n-gram is unique, higher means phrase repetition."""
    if len(dataset) == 0:
        raise MetricsError("INGF needs a non-empty dataset")
    counts = ngram_counts((tokenize(t) for t in dataset.texts()), n_sizes)
    if not counts:
        raise MetricsError("no sample is long enough to form any requested n-gram")
    return sum(counts.values()) / len(counts)


# ---------------------------------------------------------------------------
# Combined report

@dataclass(frozen=True)
class DiversityReport:
    vocab_size: int
    normalized_vocab_size: float
    aps: float
    intra_class_aps: dict[str, float]
    intra_class_aps_macro: float
    ingf: float
    histogram: list[tuple[float, int]]
    sample_count: int
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "vocab_size": self.vocab_size,
            "normalized_vocab_size": self.normalized_vocab_size,
            "aps": self.aps,
            "intra_class_aps": dict(self.intra_class_aps),
            "intra_class_aps_macro": self.intra_class_aps_macro,
            "ingf": self.ingf,
            "histogram": [[lower, count] for lower, count in self.histogram],
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def format(self) -> str:
        lines = [
            f"samples                 {self.sample_count}",
            f"vocabulary size         {self.vocab_size}",
            f"normalized vocab size   {self.normalized_vocab_size:.2f}",
            f"APS                     {self.aps:.3f}",
            f"intra-class APS (macro) {self.intra_class_aps_macro:.3f}",
        ]
        for label in sorted(self.intra_class_aps):
            lines.append(f"    {label:<20}{self.intra_class_aps[label]:.3f}")
        lines.append(f"INGF                    {self.ingf:.3f}")
        return "\n".join(lines)


def diversity_report(
    dataset: Dataset,
    embedder: Embedder,
    n_sizes: Iterable[int] = DEFAULT_NGRAM_SIZES,
    bin_count: int = DEFAULT_BIN_COUNT,
) -> DiversityReport:
    """All metrics in one pass over a single embedding of the corpus."""
    vocab_size, normalized = vocabulary_stats(dataset)
    vectors = embedder.embed(dataset.texts())
    per_class, macro = intra_class_aps(dataset, embedder, vectors=vectors)
    pair_sims = _same_class_pair_similarities(dataset, vectors)
    stats = dataset.class_stats()
    skipped = sorted(label for label, n in stats.per_class.items() if n < 2)
    return DiversityReport(
        vocab_size=vocab_size,
        normalized_vocab_size=normalized,
        aps=average_pairwise_similarity(vectors),
        intra_class_aps=per_class,
        intra_class_aps_macro=macro,
        ingf=ingf(dataset, n_sizes),
        histogram=similarity_histogram(dataset, embedder, bin_count, vectors=vectors),
        sample_count=len(dataset),
        notes={
            "embedder": embedder.name,
            "ngram_sizes": sorted(set(n_sizes)),
            "bin_count": bin_count,
            "intra_class_aps_pooled": float(pair_sims.mean()),
            "skipped_classes": skipped,
        },
    )
