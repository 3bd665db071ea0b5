"""Render atomic configurations into generation prompts.

Templates are plain text resources with ``{placeholder}`` tokens. Axis names
from the feature model are exposed to templates in snake_case (for example
``RequirementType`` becomes ``requirement_type``); the label specification
adds ``label`` and ``label_description``. Values are substituted verbatim.
Rendered text carries no trailing newline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .feature_model import AtomicConfiguration, SynthlineError

DEFAULT_TEMPLATE = "requirement_v1"

_PLACEHOLDER_RE = re.compile(r"\{([a-z_][a-z0-9_]*)\}")
_SNAKE_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


class PromptError(SynthlineError):
    def __init__(self, placeholder: str):
        self.placeholder = placeholder
        super().__init__(f"no value for placeholder '{placeholder}'")


@dataclass(frozen=True)
class LabelSpec:
    label: str
    description: str

    def __post_init__(self):
        if not self.label or not self.description:
            raise SynthlineError("label and description must be non-empty")


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    atomic_index: int
    label: str


def snake_case(name: str) -> str:
    return _SNAKE_RE.sub("_", name).lower()


def load_template(name: str = DEFAULT_TEMPLATE) -> str:
    """Load a template resource by name (or any ``.txt`` path)."""
    path = Path(name)
    if path.suffix == ".txt" and path.exists():
        raw = path.read_text(encoding="utf-8")
    else:
        raw = (
            resources.files("synthline")
            .joinpath(f"resources/templates/{name}.txt")
            .read_text(encoding="utf-8")
        )
    return raw[:-1] if raw.endswith("\n") else raw


def template_placeholders(template: str) -> list[str]:
    seen: list[str] = []
    for m in _PLACEHOLDER_RE.finditer(template):
        if m.group(1) not in seen:
            seen.append(m.group(1))
    return seen


def render_prompt(
    atomic: AtomicConfiguration,
    label_spec: LabelSpec,
    template: str | None = None,
) -> RenderedPrompt:
    """Fill the template from the atomic configuration's axes and the label.

    Deterministic: identical inputs yield byte-identical text. A placeholder
    with no corresponding axis value raises :class:`PromptError` naming it.
    """
    if template is None:
        template = load_template()
    context = {snake_case(axis): str(value) for axis, value in atomic.axes.items()}
    context["label"] = label_spec.label
    context["label_description"] = label_spec.description

    def fill(m: re.Match) -> str:
        name = m.group(1)
        if name not in context:
            raise PromptError(name)
        return context[name]

    return RenderedPrompt(
        text=_PLACEHOLDER_RE.sub(fill, template),
        atomic_index=atomic.index,
        label=label_spec.label,
    )


def load_label_specs(path: str | Path) -> list[LabelSpec]:
    """Read a labels file: a JSON array of {label, description} objects."""
    import json

    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise SynthlineError("labels file must be a JSON array of {label, description}")
    return [LabelSpec(str(d["label"]), str(d["description"])) for d in data]


def shipped_label_specs() -> list[LabelSpec]:
    """The bundled defect-class label specification."""
    import json

    data = json.loads(
        resources.files("synthline").joinpath("resources/defects.labels.json").read_text(encoding="utf-8")
    )
    return [LabelSpec(d["label"], d["description"]) for d in data]
