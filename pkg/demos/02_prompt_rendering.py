# Turn atomic configurations into generation prompts.

import synthline as sl

model = sl.shipped_model()
config = sl.shipped_configuration()
atomics = sl.expand_atomic_configurations(model, config)
labels = sl.shipped_label_specs()

print("placeholders come from axis names (snake_case) plus the label spec\n")

prompt = sl.render_prompt(atomics[0], labels[0])
print(prompt.text)
print()

# Same inputs, same bytes.
assert sl.render_prompt(atomics[0], labels[0]).text == prompt.text

# Any axis difference shows up in the rendered prompt.
other = sl.render_prompt(atomics[1], labels[0])
assert other.text != prompt.text

for spec in labels:
    line = sl.render_prompt(atomics[0], spec).text.splitlines()[1]
    print(line)
