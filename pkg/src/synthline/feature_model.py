"""Feature-model core: the variability model, its text format, configuration
validation, and expansion of multi-valued configurations into atomic ones.

The model format is a line-oriented indented DSL:

    # comment
    model Synthline 1.0           (optional header: name + version)

    Root
        Mandatory
        Optional?
        Grouped
            xor:
                A
                B
        Axis attr enum {Red, Green, Blue} multiple
        Knob attr number [0, 2]
        Note attr text

    A requires B                  (cross-tree constraints, unindented)
    A excludes B

Features are mandatory unless suffixed with ``?``. A feature's children are
either plain (and-decomposition) or the members of a single ``or:``/``xor:``
group. Attributes live on leaves only.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class SynthlineError(Exception):
    """Base class for all errors raised by this package."""


class ModelParseError(SynthlineError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidConfigurationError(SynthlineError):
    """Raised when an operation requires a valid configuration."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        summary = "; ".join(v.message for v in report.violations[:3])
        extra = len(report.violations) - 3
        if extra > 0:
            summary += f" (+{extra} more)"
        super().__init__(f"invalid configuration: {summary}")


class Optionality(str, Enum):
    MANDATORY = "mandatory"
    OPTIONAL = "optional"


class Decomposition(str, Enum):
    AND = "and"
    OR = "or"
    XOR = "xor"
    LEAF = "leaf"


class AttributeKind(str, Enum):
    ENUMERATION = "enumeration"
    NUMBER = "number"
    TEXT = "text"


class Multiplicity(str, Enum):
    SINGLE = "single"
    MULTIPLE = "multiple"


@dataclass(frozen=True)
class AttributeSpec:
    kind: AttributeKind
    allowed_values: tuple[str, ...] = ()
    range: tuple[float, float] | None = None
    multiplicity: Multiplicity = Multiplicity.SINGLE

    def __post_init__(self):
        if self.kind is AttributeKind.ENUMERATION and not self.allowed_values:
            raise ModelParseError("enumeration attribute needs at least one allowed value")
        if self.kind is AttributeKind.NUMBER:
            if self.range is None:
                raise ModelParseError("number attribute needs a [min, max] range")
            if self.range[0] > self.range[1]:
                raise ModelParseError(f"number range [{self.range[0]}, {self.range[1]}] has min > max")


@dataclass(frozen=True)
class Feature:
    name: str
    optionality: Optionality = Optionality.MANDATORY
    decomposition: Decomposition = Decomposition.LEAF
    children: tuple["Feature", ...] = ()
    attribute: AttributeSpec | None = None

    def __post_init__(self):
        if (self.decomposition is Decomposition.LEAF) != (len(self.children) == 0):
            raise ModelParseError(f"feature '{self.name}': leaf decomposition iff no children")
        if self.attribute is not None and self.children:
            raise ModelParseError(f"feature '{self.name}': attributes live on leaves only")

    @property
    def is_group(self) -> bool:
        return self.decomposition in (Decomposition.OR, Decomposition.XOR)


@dataclass(frozen=True)
class Constraint:
    kind: str  # "requires" | "excludes"
    lhs: str
    rhs: str

    def __post_init__(self):
        if self.kind not in ("requires", "excludes"):
            raise ModelParseError(f"unknown constraint kind '{self.kind}'")
        if self.lhs == self.rhs:
            raise ModelParseError(f"constraint '{self.lhs} {self.kind} {self.rhs}' references itself")


@dataclass(frozen=True)
class FeatureModel:
    root: Feature
    constraints: tuple[Constraint, ...] = ()
    name: str = ""
    version: str = "1"

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", self.root.name)
        index: dict[str, Feature] = {}
        for f in self.features():
            if f.name in index:
                raise ModelParseError(f"duplicate feature name '{f.name}'")
            index[f.name] = f
        for c in self.constraints:
            for side in (c.lhs, c.rhs):
                if side not in index:
                    raise ModelParseError(f"constraint references unknown feature '{side}'")

    def features(self):
        """All features in declaration (preorder) order."""
        stack = [self.root]
        while stack:
            f = stack.pop()
            yield f
            stack.extend(reversed(f.children))

    def find(self, name: str) -> Feature | None:
        for f in self.features():
            if f.name == name:
                return f
        return None

    def parents(self) -> dict[str, str | None]:
        out: dict[str, str | None] = {self.root.name: None}
        for f in self.features():
            for c in f.children:
                out[c.name] = f.name
        return out

    def to_dict(self) -> dict:
        """JSON-friendly tree, as served by the HTTP API."""

        def feat(f: Feature) -> dict:
            d: dict = {
                "name": f.name,
                "optionality": f.optionality.value,
                "decomposition": f.decomposition.value,
            }
            if f.attribute is not None:
                a: dict = {"kind": f.attribute.kind.value, "multiplicity": f.attribute.multiplicity.value}
                if f.attribute.kind is AttributeKind.ENUMERATION:
                    a["allowed_values"] = list(f.attribute.allowed_values)
                if f.attribute.range is not None:
                    a["range"] = list(f.attribute.range)
                d["attribute"] = a
            if f.children:
                d["children"] = [feat(c) for c in f.children]
            return d

        return {
            "name": self.name,
            "version": self.version,
            "root": feat(self.root),
            "constraints": [{"kind": c.kind, "lhs": c.lhs, "rhs": c.rhs} for c in self.constraints],
        }


@dataclass(frozen=True)
class Configuration:
    """A user's multi-valued selection over a feature model."""

    model_name: str
    selections: tuple[str, ...] = ()
    values: dict[str, tuple] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "Configuration":
        values = {str(k): tuple(v) for k, v in dict(data.get("values", {})).items()}
        return cls(
            model_name=str(data.get("model", "")),
            selections=tuple(str(s) for s in data.get("selections", [])),
            values=values,
        )

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "Configuration":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_dict(self) -> dict:
        return {
            "model": self.model_name,
            "selections": list(self.selections),
            "values": {k: list(v) for k, v in self.values.items()},
        }


@dataclass(frozen=True)
class AtomicConfiguration:
    """One concrete value per configuration axis."""

    axes: dict[str, object]
    index: int

    def to_dict(self) -> dict:
        return {"index": self.index, "axes": dict(self.axes)}


# Violation rule identifiers. `orphan-selection` covers a selected feature
# whose parent is not selected; attribute-value problems (allowed set, numeric
# range, multiplicity) all report as `range`.
RULE_MANDATORY = "mandatory-missing"
RULE_XOR = "xor-cardinality"
RULE_OR = "or-cardinality"
RULE_REQUIRES = "requires"
RULE_EXCLUDES = "excludes"
RULE_RANGE = "range"
RULE_UNKNOWN = "unknown-name"
RULE_ORPHAN = "orphan-selection"


@dataclass(frozen=True)
class Violation:
    rule: str
    feature_name: str
    message: str

    def to_dict(self) -> dict:
        return {"rule": self.rule, "feature_name": self.feature_name, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": [v.to_dict() for v in self.violations]}

    def format(self) -> str:
        if self.valid:
            return "valid"
        return "\n".join(f"[{v.rule}] {v.feature_name}: {v.message}" for v in self.violations)


# ---------------------------------------------------------------------------
# DSL parsing

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_FEATURE_RE = re.compile(
    r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?P<opt>\?)?"
    r"(?:\s+attr\s+(?P<attr>.+))?$"
)
_ENUM_RE = re.compile(r"^enum\s*\{(?P<vals>[^}]*)\}(?:\s+(?P<mult>multiple))?$")
_NUMBER_RE = re.compile(r"^number\s*\[(?P<lo>[^,\]]+),(?P<hi>[^,\]]+)\](?:\s+(?P<mult>multiple))?$")
_TEXT_RE = re.compile(r"^text(?:\s+(?P<mult>multiple))?$")
_CONSTRAINT_RE = re.compile(
    r"^(?P<lhs>[A-Za-z_][A-Za-z0-9_]*)\s+(?P<kind>requires|excludes)\s+(?P<rhs>[A-Za-z_][A-Za-z0-9_]*)$"
)
_MODEL_RE = re.compile(r"^model\s+(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\s+(?P<version>\S+))?$")


def _parse_attribute(text: str, line_no: int) -> AttributeSpec:
    text = text.strip()
    m = _ENUM_RE.match(text)
    if m:
        vals = tuple(v.strip() for v in m.group("vals").split(",") if v.strip())
        if not vals:
            raise ModelParseError("enumeration attribute needs at least one allowed value", line_no)
        mult = Multiplicity.MULTIPLE if m.group("mult") else Multiplicity.SINGLE
        return AttributeSpec(AttributeKind.ENUMERATION, allowed_values=vals, multiplicity=mult)
    m = _NUMBER_RE.match(text)
    if m:
        try:
            lo, hi = float(m.group("lo")), float(m.group("hi"))
        except ValueError:
            raise ModelParseError(f"invalid number range in '{text}'", line_no) from None
        if lo > hi:
            raise ModelParseError(f"number range [{lo}, {hi}] has min > max", line_no)
        mult = Multiplicity.MULTIPLE if m.group("mult") else Multiplicity.SINGLE
        return AttributeSpec(AttributeKind.NUMBER, range=(lo, hi), multiplicity=mult)
    m = _TEXT_RE.match(text)
    if m:
        mult = Multiplicity.MULTIPLE if m.group("mult") else Multiplicity.SINGLE
        return AttributeSpec(AttributeKind.TEXT, multiplicity=mult)
    raise ModelParseError(f"invalid attribute spec '{text}'", line_no)


class _Node:
    def __init__(self, name, optional, attr, line, group_member=False):
        self.name = name
        self.optional = optional
        self.attr = attr
        self.line = line
        self.group: str | None = None  # "or" | "xor" once a group header is seen
        self.children: list[_Node] = []
        self.group_member = group_member

    def build(self) -> Feature:
        children = tuple(c.build() for c in self.children)
        if self.group:
            decomposition = Decomposition(self.group)
        elif children:
            decomposition = Decomposition.AND
        else:
            decomposition = Decomposition.LEAF
        if self.attr is not None and children:
            raise ModelParseError(f"feature '{self.name}' has both an attribute and children", self.line)
        return Feature(
            name=self.name,
            optionality=Optionality.OPTIONAL if self.optional else Optionality.MANDATORY,
            decomposition=decomposition,
            children=children,
            attribute=self.attr,
        )


def parse_model(text: str) -> FeatureModel:
    """Parse the FM DSL into a :class:`FeatureModel`.

    Raises :class:`ModelParseError` with a line number on syntax errors,
    duplicate feature names, unknown constraint references, or invalid
    attribute specs.
    """
    header_name = ""
    header_version = "1"
    root: _Node | None = None
    constraints: list[Constraint] = []
    # stack of (indent, node); group headers push a pseudo level
    stack: list[tuple[int, _Node, str | None]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.strip().startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if "\t" in raw[:indent + 1]:
            raise ModelParseError("tabs are not allowed in indentation", line_no)
        stripped = raw.strip()

        if indent == 0:
            m = _MODEL_RE.match(stripped)
            if m:
                if root is not None:
                    raise ModelParseError("model header must appear before the feature tree", line_no)
                header_name = m.group("name")
                header_version = m.group("version") or "1"
                continue
            m = _CONSTRAINT_RE.match(stripped)
            if m:
                if root is None:
                    raise ModelParseError("constraint before any feature tree", line_no)
                constraints.append(Constraint(m.group("kind"), m.group("lhs"), m.group("rhs")))
                continue

        # unwind to the enclosing level
        while stack and indent <= stack[-1][0]:
            stack.pop()

        if stripped in ("or:", "xor:"):
            if not stack:
                raise ModelParseError("group header outside a feature", line_no)
            parent = stack[-1][1]
            if parent.children or parent.group:
                raise ModelParseError(
                    f"feature '{parent.name}' cannot mix plain children with a group", line_no
                )
            parent.group = stripped[:-1]
            stack.append((indent, parent, parent.group))
            continue

        m = _FEATURE_RE.match(stripped)
        if m is None:
            raise ModelParseError(f"cannot parse '{stripped}' (column {indent + 1})", line_no)
        attr = _parse_attribute(m.group("attr"), line_no) if m.group("attr") else None
        in_group = stack[-1][2] is not None if stack else None

        if m.group("opt") and in_group:
            raise ModelParseError("group members take their cardinality from the group", line_no)
        node = _Node(
            m.group("name"),
            optional=bool(m.group("opt")) or bool(in_group),
            attr=attr,
            line=line_no,
            group_member=bool(in_group),
        )

        if not stack:
            if root is not None:
                raise ModelParseError(
                    f"second root feature '{node.name}' (exactly one root allowed)", line_no
                )
            root = node
        else:
            parent = stack[-1][1]
            if parent.group and stack[-1][2] is None:
                raise ModelParseError(
                    f"feature '{parent.name}' cannot mix plain children with a group", line_no
                )
            if parent.attr is not None:
                raise ModelParseError(
                    f"feature '{parent.name}' has an attribute and cannot have children", line_no
                )
            parent.children.append(node)
        stack.append((indent, node, None))

    if root is None:
        raise ModelParseError("document contains no feature tree")
    return FeatureModel(
        root=root.build(),
        constraints=tuple(constraints),
        name=header_name or root.name,
        version=header_version,
    )


def load_model(path: str | Path) -> FeatureModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def _format_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)


def serialize_model(model: FeatureModel) -> str:
    """Render a model back to the DSL; parse(serialize(m)) == m."""
    lines = [f"model {model.name} {model.version}", ""]

    def attr_clause(a: AttributeSpec) -> str:
        mult = " multiple" if a.multiplicity is Multiplicity.MULTIPLE else ""
        if a.kind is AttributeKind.ENUMERATION:
            return f" attr enum {{{', '.join(a.allowed_values)}}}{mult}"
        if a.kind is AttributeKind.NUMBER:
            lo, hi = a.range
            return f" attr number [{_format_number(lo)}, {_format_number(hi)}]{mult}"
        return f" attr text{mult}"

    def emit(f: Feature, depth: int, in_group: bool):
        pad = "    " * depth
        opt = "?" if f.optionality is Optionality.OPTIONAL and not in_group else ""
        clause = attr_clause(f.attribute) if f.attribute else ""
        lines.append(f"{pad}{f.name}{opt}{clause}")
        if f.is_group:
            lines.append(f"{pad}    {f.decomposition.value}:")
            for c in f.children:
                emit(c, depth + 2, True)
        else:
            for c in f.children:
                emit(c, depth + 1, False)

    emit(model.root, 0, False)
    if model.constraints:
        lines.append("")
        for c in model.constraints:
            lines.append(f"{c.lhs} {c.kind} {c.rhs}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Configuration validation

def _is_number(v) -> bool:
    if isinstance(v, bool):
        return False
    if isinstance(v, (int, float)):
        return True
    try:
        float(v)
        return True
    except (TypeError, ValueError):
        return False


def validate_configuration(model: FeatureModel, config: Configuration) -> ValidationReport:
    """Check a configuration against the model.

    Unknown names produce violations rather than errors so partial
    configurations coming from an interactive UI can be checked live.
    """
    violations: list[Violation] = []
    index = {f.name: f for f in model.features()}
    parents = model.parents()

    if config.model_name and config.model_name != model.name:
        violations.append(Violation(
            RULE_UNKNOWN, config.model_name,
            f"configuration targets model '{config.model_name}', not '{model.name}'",
        ))

    for name in config.selections:
        if name not in index:
            violations.append(Violation(RULE_UNKNOWN, name, f"selected feature '{name}' is not in the model"))
    for name in config.values:
        if name not in index:
            violations.append(Violation(RULE_UNKNOWN, name, f"values given for unknown feature '{name}'"))

    selected = {n for n in config.selections if n in index}
    selected.add(model.root.name)  # root is implicitly selected

    for f in model.features():
        if f.name not in selected:
            continue
        parent = parents[f.name]
        if parent is not None and parent not in selected:
            violations.append(Violation(
                RULE_ORPHAN, f.name,
                f"'{f.name}' is selected but its parent '{parent}' is not",
            ))
        if f.decomposition is Decomposition.AND:
            for child in f.children:
                if child.optionality is Optionality.MANDATORY and child.name not in selected:
                    violations.append(Violation(
                        RULE_MANDATORY, child.name,
                        f"mandatory feature '{child.name}' under '{f.name}' is not selected",
                    ))
        elif f.decomposition is Decomposition.XOR:
            n = sum(1 for c in f.children if c.name in selected)
            if n != 1:
                violations.append(Violation(
                    RULE_XOR, f.name,
                    f"xor group '{f.name}' needs exactly one selected child, found {n}",
                ))
        elif f.decomposition is Decomposition.OR:
            n = sum(1 for c in f.children if c.name in selected)
            if n < 1:
                violations.append(Violation(
                    RULE_OR, f.name,
                    f"or group '{f.name}' needs at least one selected child",
                ))

    for name, vals in config.values.items():
        feat = index.get(name)
        if feat is None or name not in selected:
            continue
        attr = feat.attribute
        if attr is None:
            violations.append(Violation(
                RULE_RANGE, name, f"feature '{name}' takes no attribute values"))
            continue
        if attr.multiplicity is Multiplicity.SINGLE and len(vals) != 1:
            violations.append(Violation(
                RULE_RANGE, name,
                f"'{name}' takes exactly one value, got {len(vals)}",
            ))
        if attr.kind is AttributeKind.ENUMERATION:
            for v in vals:
                if str(v) not in attr.allowed_values:
                    violations.append(Violation(
                        RULE_RANGE, name,
                        f"'{v}' is not an allowed value of '{name}'",
                    ))
        elif attr.kind is AttributeKind.NUMBER:
            lo, hi = attr.range
            for v in vals:
                if not _is_number(v):
                    violations.append(Violation(
                        RULE_RANGE, name, f"'{v}' is not a number for '{name}'"))
                elif not (lo <= float(v) <= hi):
                    violations.append(Violation(
                        RULE_RANGE, name,
                        f"{v} is outside the range [{_format_number(lo)}, {_format_number(hi)}] of '{name}'",
                    ))

    for c in model.constraints:
        if c.kind == "requires" and c.lhs in selected and c.rhs not in selected:
            violations.append(Violation(
                RULE_REQUIRES, c.lhs, f"'{c.lhs}' requires '{c.rhs}', which is not selected"))
        elif c.kind == "excludes" and c.lhs in selected and c.rhs in selected:
            violations.append(Violation(
                RULE_EXCLUDES, c.lhs, f"'{c.lhs}' excludes '{c.rhs}', but both are selected"))

    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# Atomic expansion

def configuration_axes(model: FeatureModel, config: Configuration) -> list[tuple[str, list]]:
    """The configuration's axes in model declaration order.

    An axis is any selected attribute feature with configured values, or a
    selected or/xor group (its values are the selected member names, in
    declaration order). Single-valued axes are constants but still appear on
    every atomic configuration.
    """
    selected = {n for n in config.selections if model.find(n)}
    selected.add(model.root.name)
    axes: list[tuple[str, list]] = []
    for f in model.features():
        if f.name not in selected:
            continue
        if f.attribute is not None:
            vals = list(config.values.get(f.name, ()))
            if vals:
                axes.append((f.name, vals))
        elif f.is_group:
            members = [c.name for c in f.children if c.name in selected]
            if members:
                axes.append((f.name, members))
    return axes


def expand_atomic_configurations(
    model: FeatureModel, config: Configuration
) -> list[AtomicConfiguration]:
    """Cartesian product over the configuration's axes, in lexicographic
    order (first axis most significant), indexed 0..K-1.

    Rejects invalid configurations with :class:`InvalidConfigurationError`
    carrying the validation report.
    """
    report = validate_configuration(model, config)
    if not report.valid:
        raise InvalidConfigurationError(report)
    axes = configuration_axes(model, config)
    names = [n for n, _ in axes]
    pools = [vals for _, vals in axes]
    return [
        AtomicConfiguration(axes=dict(zip(names, combo)), index=i)
        for i, combo in enumerate(itertools.product(*pools))
    ]


def count_atomic_configurations(model: FeatureModel, config: Configuration) -> int:
    report = validate_configuration(model, config)
    if not report.valid:
        raise InvalidConfigurationError(report)
    count = 1
    for _, vals in configuration_axes(model, config):
        count *= len(vals)
    return count
