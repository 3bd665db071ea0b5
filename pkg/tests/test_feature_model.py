import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthline.feature_model import (
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
    count_atomic_configurations,
    expand_atomic_configurations,
    parse_model,
    serialize_model,
    validate_configuration,
)

MINIMAL = "Root\n"

COLORS = """\
model Colors 2

Root
    Paint attr enum {Red, Green, Blue} multiple
    Finish attr enum {Matte, Gloss} multiple
    Size attr number [1, 10]
    Extras?
        or:
            Primer
            Sealant
    Base
        xor:
            Oil
            Water

Primer requires Sealant
"""


def config(selections=(), values=None, model="", **kw):
    return Configuration(model_name=model, selections=tuple(selections), values={k: tuple(v) for k, v in (values or {}).items()})


# ---------------------------------------------------------------------------
# Parsing

def test_minimal_model_is_root_only():
    m = parse_model(MINIMAL)
    assert m.root.name == "Root"
    assert m.root.decomposition is Decomposition.LEAF
    assert m.constraints == ()
    assert m.name == "Root"


def test_shipped_model_has_four_core_features(shipped_model):
    assert [c.name for c in shipped_model.root.children] == [
        "Generator",
        "Artifact",
        "MLTask",
        "Output",
    ]


def test_parse_full_dsl():
    m = parse_model(COLORS)
    assert m.name == "Colors" and m.version == "2"
    paint = m.find("Paint")
    assert paint.attribute.kind is AttributeKind.ENUMERATION
    assert paint.attribute.allowed_values == ("Red", "Green", "Blue")
    assert paint.attribute.multiplicity is Multiplicity.MULTIPLE
    size = m.find("Size")
    assert size.attribute.kind is AttributeKind.NUMBER
    assert size.attribute.range == (1.0, 10.0)
    extras = m.find("Extras")
    assert extras.optionality is Optionality.OPTIONAL
    assert extras.decomposition is Decomposition.OR
    assert m.find("Base").decomposition is Decomposition.XOR
    assert m.constraints == (Constraint("requires", "Primer", "Sealant"),)


def test_duplicate_feature_name_rejected():
    text = "Root\n    Domain\n    Domain\n"
    with pytest.raises(ModelParseError, match="duplicate feature name 'Domain'"):
        parse_model(text)


def test_constraint_unknown_feature_rejected():
    with pytest.raises(ModelParseError, match="unknown feature"):
        parse_model("Root\n    A\n\nA requires Missing\n")


def test_syntax_error_reports_line():
    bad = "Root\n    ???\n"
    with pytest.raises(ModelParseError, match="line 2"):
        parse_model(bad)


def test_invalid_attribute_spec_rejected():
    with pytest.raises(ModelParseError, match="invalid attribute spec"):
        parse_model("Root\n    A attr window [1, 2]\n")
    with pytest.raises(ModelParseError, match="min > max"):
        parse_model("Root\n    A attr number [5, 1]\n")
    with pytest.raises(ModelParseError, match="at least one allowed value"):
        parse_model("Root\n    A attr enum {}\n")


def test_second_root_rejected():
    with pytest.raises(ModelParseError, match="second root"):
        parse_model("Root\nOther\n")


def test_group_member_optional_marker_rejected():
    bad = "Root\n    G\n        xor:\n            A?\n"
    with pytest.raises(ModelParseError, match="cardinality from the group"):
        parse_model(bad)


def test_round_trip_examples(shipped_model):
    for m in (parse_model(MINIMAL), parse_model(COLORS), shipped_model):
        assert parse_model(serialize_model(m)) == m


# Random model generator for the round-trip property.

@st.composite
def random_model(draw):
    counter = itertools.count()

    def fresh():
        return f"N{next(counter)}"

    def attribute():
        kind = draw(st.sampled_from(list(AttributeKind)))
        mult = draw(st.sampled_from(list(Multiplicity)))
        if kind is AttributeKind.ENUMERATION:
            vals = draw(st.lists(st.from_regex(r"[A-Za-z][A-Za-z0-9 _-]{0,8}", fullmatch=True).map(str.strip).filter(bool), min_size=1, max_size=4, unique=True))
            return AttributeSpec(kind, allowed_values=tuple(vals), multiplicity=mult)
        if kind is AttributeKind.NUMBER:
            lo = draw(st.integers(-100, 100))
            hi = draw(st.integers(lo, lo + 200))
            return AttributeSpec(kind, range=(float(lo), float(hi)), multiplicity=mult)
        return AttributeSpec(kind, multiplicity=mult)

    def feature(depth):
        name = fresh()
        if depth >= 2 or draw(st.booleans()):
            attr = attribute() if draw(st.booleans()) else None
            return Feature(name=name, optionality=draw(st.sampled_from(list(Optionality))), attribute=attr)
        decomposition = draw(st.sampled_from([Decomposition.AND, Decomposition.OR, Decomposition.XOR]))
        n_children = draw(st.integers(1, 3))
        children = tuple(feature(depth + 1) for _ in range(n_children))
        if decomposition in (Decomposition.OR, Decomposition.XOR):
            children = tuple(
                Feature(c.name, Optionality.OPTIONAL, c.decomposition, c.children, c.attribute)
                for c in children
            )
        return Feature(name=name, optionality=draw(st.sampled_from(list(Optionality))), decomposition=decomposition, children=children)

    root = feature(0)
    if root.decomposition is Decomposition.LEAF and root.attribute is None and draw(st.booleans()):
        root = Feature(root.name, Optionality.MANDATORY, Decomposition.AND, (feature(1),))
    return FeatureModel(root=root, name="M", version="1")


@settings(max_examples=60, deadline=None)
@given(random_model())
def test_round_trip_property(model):
    assert parse_model(serialize_model(model)) == model


# ---------------------------------------------------------------------------
# Validation

def test_shipped_config_is_valid(shipped_model, shipped_config):
    report = validate_configuration(shipped_model, shipped_config)
    assert report.valid and report.violations == ()


def test_xor_overselection(shipped_model, shipped_config):
    cfg = config(
        selections=list(shipped_config.selections) + ["JSON"],
        values=shipped_config.values,
        model="Synthline",
    )
    report = validate_configuration(shipped_model, cfg)
    assert not report.valid
    assert [v.rule for v in report.violations] == ["xor-cardinality"]
    assert report.violations[0].feature_name == "OutputFormat"


def test_temperature_out_of_range(shipped_model, shipped_config):
    values = dict(shipped_config.values)
    values["Temperature"] = (3.5,)
    cfg = config(selections=shipped_config.selections, values=values, model="Synthline")
    report = validate_configuration(shipped_model, cfg)
    assert [v.rule for v in report.violations] == ["range"]
    assert "Temperature" in report.violations[0].feature_name


def test_mandatory_missing():
    m = parse_model("Root\n    Must\n    May?\n")
    report = validate_configuration(m, config(selections=["Root"]))
    assert [v.rule for v in report.violations] == ["mandatory-missing"]
    assert report.violations[0].feature_name == "Must"
    assert validate_configuration(m, config(selections=["Root", "Must"])).valid


def test_or_group_empty():
    m = parse_model(COLORS)
    cfg = config(selections=["Root", "Extras", "Base", "Oil"])
    report = validate_configuration(m, cfg)
    assert ("or-cardinality", "Extras") in [(v.rule, v.feature_name) for v in report.violations]


def test_requires_and_excludes():
    m = parse_model("Root\n    A?\n    B?\n\nA requires B\n")
    assert not validate_configuration(m, config(selections=["Root", "A"])).valid
    assert validate_configuration(m, config(selections=["Root", "A", "B"])).valid

    m2 = parse_model("Root\n    A?\n    B?\n\nA excludes B\n")
    report = validate_configuration(m2, config(selections=["Root", "A", "B"]))
    assert [v.rule for v in report.violations] == ["excludes"]


def test_adding_violated_excludes_flips_validity():
    base = "Root\n    A?\n    B?\n"
    cfg = config(selections=["Root", "A", "B"])
    assert validate_configuration(parse_model(base), cfg).valid
    assert not validate_configuration(parse_model(base + "\nA excludes B\n"), cfg).valid


def test_unknown_names_are_violations_not_errors():
    m = parse_model(MINIMAL)
    report = validate_configuration(m, config(selections=["Root", "Ghost"], values={"Phantom": ["x"]}))
    rules = sorted(v.rule for v in report.violations)
    assert rules == ["unknown-name", "unknown-name"]


def test_orphan_selection_detected():
    m = parse_model("Root\n    A?\n        B?\n")
    report = validate_configuration(m, config(selections=["Root", "B"]))
    assert [v.rule for v in report.violations] == ["orphan-selection"]


def test_single_multiplicity_value_count():
    m = parse_model("Root\n    K attr enum {X, Y}\n")
    report = validate_configuration(m, config(selections=["Root", "K"], values={"K": ["X", "Y"]}))
    assert any(v.rule == "range" and "exactly one value" in v.message for v in report.violations)


def test_enum_value_outside_allowed_set():
    m = parse_model("Root\n    K attr enum {X, Y} multiple\n")
    report = validate_configuration(m, config(selections=["Root", "K"], values={"K": ["Z"]}))
    assert [v.rule for v in report.violations] == ["range"]


def test_model_name_mismatch_reported():
    m = parse_model(MINIMAL)
    report = validate_configuration(m, config(selections=["Root"], model="Other"))
    assert [v.rule for v in report.violations] == ["unknown-name"]


# ---------------------------------------------------------------------------
# Expansion

def brute_force_combos(pools):
    """Independent nested-loop enumeration of the cross product."""
    if not pools:
        return [[]]
    return [[v] + rest for v in pools[0] for rest in brute_force_combos(pools[1:])]


def test_shipped_expansion_count(shipped_model, shipped_config):
    assert count_atomic_configurations(shipped_model, shipped_config) == 112
    atomics = expand_atomic_configurations(shipped_model, shipped_config)
    assert len(atomics) == 112
    assert [a.index for a in atomics] == list(range(112))


def test_expansion_all_single_valued_is_identity(shipped_model, shipped_config):
    values = dict(shipped_config.values)
    values["RequirementType"] = ("Functions",)
    values["SpecificationLevel"] = ("Detailed Specification",)
    values["RequirementSource"] = ("End Users",)
    values["Domain"] = ("Healthcare",)
    cfg = config(selections=shipped_config.selections, values=values, model="Synthline")
    atomics = expand_atomic_configurations(shipped_model, cfg)
    assert len(atomics) == 1
    assert atomics[0].axes["RequirementType"] == "Functions"
    assert atomics[0].axes["SubsetSize"] == 1120  # constants are carried


def test_two_by_three_expansion_matches_hand_enumeration():
    m = parse_model(
        "Root\n"
        "    D attr enum {D1, D2} multiple\n"
        "    T attr enum {T1, T2, T3} multiple\n"
    )
    cfg = config(selections=["Root", "D", "T"], values={"D": ["D1", "D2"], "T": ["T1", "T2", "T3"]})
    atomics = expand_atomic_configurations(m, cfg)
    expected = [
        ("D1", "T1"), ("D1", "T2"), ("D1", "T3"),
        ("D2", "T1"), ("D2", "T2"), ("D2", "T3"),
    ]
    assert [(a.axes["D"], a.axes["T"]) for a in atomics] == expected


def test_or_group_acts_as_axis():
    m = parse_model(COLORS)
    cfg = config(
        selections=["Root", "Paint", "Finish", "Size", "Extras", "Primer", "Sealant", "Base", "Water"],
        values={"Paint": ["Red"], "Finish": ["Matte"], "Size": [5]},
    )
    atomics = expand_atomic_configurations(m, cfg)
    assert len(atomics) == 2
    assert [a.axes["Extras"] for a in atomics] == ["Primer", "Sealant"]
    assert all(a.axes["Base"] == "Water" for a in atomics)


def test_invalid_config_rejected_with_report(shipped_model, shipped_config):
    cfg = config(
        selections=[s for s in shipped_config.selections if s != "Classification"],
        values=shipped_config.values,
        model="Synthline",
    )
    with pytest.raises(InvalidConfigurationError) as exc:
        expand_atomic_configurations(shipped_model, cfg)
    assert not exc.value.report.valid
    assert any(v.rule == "mandatory-missing" for v in exc.value.report.violations)


_pool = st.lists(
    st.lists(st.integers(0, 9), min_size=1, max_size=4, unique=True), min_size=1, max_size=4
)


@settings(max_examples=100, deadline=None)
@given(_pool)
def test_expansion_matches_brute_force_oracle(pools):
    lines = ["Root"]
    values = {}
    selections = ["Root"]
    for i, pool in enumerate(pools):
        name = f"A{i}"
        allowed = ", ".join(f"V{v}" for v in range(10))
        lines.append(f"    {name} attr enum {{{allowed}}} multiple")
        values[name] = [f"V{v}" for v in pool]
        selections.append(name)
    m = parse_model("\n".join(lines) + "\n")
    cfg = config(selections=selections, values=values)
    atomics = expand_atomic_configurations(m, cfg)

    expected = brute_force_combos([values[f"A{i}"] for i in range(len(pools))])
    assert len(atomics) == len(expected)
    got = [[a.axes[f"A{i}"] for i in range(len(pools))] for a in atomics]
    assert got == expected

    # atomic configurations are pairwise distinct
    as_tuples = {tuple(row) for row in got}
    assert len(as_tuples) == len(got)

    # per-axis balance: each value appears K / count(axis) times
    total = len(atomics)
    for i, pool in enumerate(pools):
        per_value = total // len(pool)
        for v in values[f"A{i}"]:
            assert sum(1 for a in atomics if a.axes[f"A{i}"] == v) == per_value
