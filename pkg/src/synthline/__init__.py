"""Synthline: feature-model-driven synthetic labeled text generation and
corpus diversity evaluation."""

from importlib import resources
from pathlib import Path

from .feature_model import (
    AtomicConfiguration,
    AttributeKind,
    AttributeSpec,
    Configuration,
    Constraint,
    Decomposition,
    Feature,
    FeatureModel,
    InvalidConfigurationError,
    ModelParseError,
    Multiplicity,
    Optionality,
    SynthlineError,
    ValidationReport,
    Violation,
    count_atomic_configurations,
    expand_atomic_configurations,
    load_model,
    parse_model,
    serialize_model,
    validate_configuration,
)
from .prompts import LabelSpec, PromptError, RenderedPrompt, load_label_specs, render_prompt, shipped_label_specs

__version__ = "0.1.0"


def resource_path(name: str) -> Path:
    """Filesystem path of a bundled resource (e.g. ``synthline.fm``)."""
    return Path(str(resources.files("synthline").joinpath(f"resources/{name}")))


def shipped_model() -> FeatureModel:
    """The bundled example feature model."""
    return load_model(resource_path("synthline.fm"))


def shipped_configuration() -> Configuration:
    """The bundled multi-run generation configuration for the example model."""
    return Configuration.load(resource_path("defects.config.json"))
