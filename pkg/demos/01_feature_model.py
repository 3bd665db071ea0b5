# Parse the bundled feature model, validate a configuration against it, and
# expand the configuration into atomic configurations.

import synthline as sl
from synthline.feature_model import Configuration

model = sl.shipped_model()
print(f"model: {model.name} v{model.version}")
print("core features:", ", ".join(c.name for c in model.root.children))

# The bundled configuration selects 7 requirement types, 2 specification
# levels, 4 sources and 2 domains; everything else is single-valued.
config = sl.shipped_configuration()
report = sl.validate_configuration(model, config)
print("configuration valid:", report.valid)

atomics = sl.expand_atomic_configurations(model, config)
print("atomic configurations:", len(atomics))
print("first:", atomics[0].axes)
print("last: ", atomics[-1].axes)

# Invalid configurations come back with a structured report instead of a pass.
broken = Configuration(
    model_name="Synthline",
    selections=tuple(config.selections) + ("JSON",),  # second xor member
    values=config.values,
)
print()
print("selecting CSV and JSON together:")
print(sl.validate_configuration(model, broken).format())

# The model itself round-trips through its text form.
assert sl.parse_model(sl.serialize_model(model)) == model
print()
print(sl.serialize_model(model))
