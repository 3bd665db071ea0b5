import pytest

import synthline as sl
from synthline.dataset import Dataset, SyntheticSample

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def shipped_model():
    return sl.shipped_model()


@pytest.fixture(scope="session")
def shipped_config():
    return sl.shipped_configuration()


def make_sample(i: int, text: str, label: str = "A", **overrides) -> SyntheticSample:
    fields = dict(
        id=f"s-{i:06d}",
        text=text,
        label=label,
        label_description=f"description of {label}",
        requirement_type="Functions",
        specification_level="Detailed Specification",
        requirement_source="End Users",
        specification_format="Constrained NL",
        language="English",
        domain="Healthcare",
        llm="mock",
        temperature=1.0,
        top_p=1.0,
        run_id="run-test",
        created_at="2024-01-01T00:00:00Z",
    )
    fields.update(overrides)
    return SyntheticSample(**fields)


def make_dataset(texts_labels, source="synthetic") -> Dataset:
    samples = tuple(
        make_sample(i, text, label) for i, (text, label) in enumerate(texts_labels)
    )
    return Dataset(samples, source=source)
