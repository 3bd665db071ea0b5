# Evaluate a corpus with the diversity metrics: vocabulary size, average
# pairwise similarity (overall / per class), n-gram repetition, and the
# same-class similarity histogram. Run 03_mock_generation.py first.

from pathlib import Path

from synthline.dataset import Dataset, read_dataset
from synthline.embedding import HashEmbedder
from synthline.metrics import diversity_report, histogram_to_csv

out_dir = Path("demo-output")
parts = [read_dataset(p) for p in sorted(out_dir.glob("*.csv"))]
if not parts:
    raise SystemExit("no generated files found; run demos/03_mock_generation.py first")
corpus = Dataset.concat(*parts)
print(f"corpus: {len(corpus)} samples, {len(corpus.class_stats().per_class)} classes")

# The hashed bag-of-words embedder keeps everything offline and exact;
# point make_embedder() at an embeddings endpoint for a real encoder.
report = diversity_report(corpus, HashEmbedder(), n_sizes=(2, 3, 4), bin_count=20)
print()
print(report.format())

histogram_to_csv(report.histogram, out_dir / "histogram.csv")
print()
print(f"histogram written to {out_dir / 'histogram.csv'}")

width = 2.0 / len(report.histogram)
peak = max(count for _, count in report.histogram) or 1
print()
for lower, count in report.histogram:
    bar = "#" * round(40 * count / peak)
    print(f"[{lower:+.2f}, {lower + width:+.2f}) {count:>6} {bar}")
