# Deduplicate a corpus and cut a stratified holdout split.

from pathlib import Path

from synthline.dataset import Dataset, deduplicate, read_dataset, stratified_split, write_dataset

out_dir = Path("demo-output")
parts = [read_dataset(p) for p in sorted(out_dir.glob("*.csv")) if p.name != "histogram.csv"]
if not parts:
    raise SystemExit("no generated files found; run demos/03_mock_generation.py first")
corpus = Dataset.concat(*parts)

deduped, removed = deduplicate(corpus)
print(f"dedup: kept {len(deduped)} of {len(corpus)} ({removed} removed)")

# 30% of each class goes to the test side, deterministically for a seed.
train, test = stratified_split(deduped, test_fraction=0.3, seed=42)
print(f"split: {len(train)} train / {len(test)} test")
print("test per class:", dict(sorted(test.class_stats().per_class.items())))

write_dataset(train, "csv", out_dir / "train.csv")
write_dataset(test, "csv", out_dir / "test.csv")
print(f"written to {out_dir / 'train.csv'} and {out_dir / 'test.csv'}")

again = stratified_split(deduped, test_fraction=0.3, seed=42)
assert again == (train, test), "same seed, same split"
