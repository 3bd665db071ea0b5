import { describe, expect, it } from "vitest";

import model from "./fixtures/model.json";
import {
  chooseXor,
  initialState,
  setSelected,
  setValues,
  toConfiguration,
} from "../src/config-state.js";
import type { ModelTree } from "../src/types.js";

const tree = model as unknown as ModelTree;

describe("initialState", () => {
  it("selects the root and the mandatory closure", () => {
    const state = initialState(tree);
    for (const name of [
      "Synthline", "Generator", "LLM", "Temperature", "TopP",
      "Artifact", "Requirement", "RequirementType",
      "MLTask", "Classification", "Label", "LabelDescription",
      "Output", "OutputFormat", "SubsetSize",
    ]) {
      expect(state.selected.has(name), name).toBe(true);
    }
  });

  it("leaves xor members unselected", () => {
    const state = initialState(tree);
    expect(state.selected.has("CSV")).toBe(false);
    expect(state.selected.has("JSON")).toBe(false);
  });
});

describe("selection edits", () => {
  it("chooseXor swaps the single member", () => {
    let state = initialState(tree);
    state = chooseXor(tree, state, "OutputFormat", "CSV");
    expect(state.selected.has("CSV")).toBe(true);
    state = chooseXor(tree, state, "OutputFormat", "JSON");
    expect(state.selected.has("CSV")).toBe(false);
    expect(state.selected.has("JSON")).toBe(true);
    state = chooseXor(tree, state, "OutputFormat", null);
    expect(state.selected.has("JSON")).toBe(false);
  });

  it("deselection clears the subtree and its values", () => {
    let state = initialState(tree);
    state = setValues(state, "Temperature", [1]);
    state = setSelected(tree, state, "Generator", false);
    expect(state.selected.has("Generator")).toBe(false);
    expect(state.selected.has("LLM")).toBe(false);
    expect(state.values.has("Temperature")).toBe(false);
  });

  it("does not mutate the previous state", () => {
    const before = initialState(tree);
    const count = before.selected.size;
    setSelected(tree, before, "Generator", false);
    expect(before.selected.size).toBe(count);
  });
});

describe("toConfiguration", () => {
  it("reproduces the bundled reference configuration's values", () => {
    let state = initialState(tree);
    state = chooseXor(tree, state, "OutputFormat", "CSV");
    state = setValues(state, "LLM", ["GPT-4o"]);
    state = setValues(state, "Temperature", [1]);
    state = setValues(state, "TopP", [1]);
    state = setValues(state, "RequirementType", [
      "User Interfaces", "Hardware Interfaces", "Functions", "Performance",
      "Logical Database", "Design Constraints", "System Attributes",
    ]);
    state = setValues(state, "SpecificationLevel", [
      "High-Level Specification", "Detailed Specification",
    ]);
    state = setValues(state, "RequirementSource", [
      "End Users", "Business Managers", "Development Team", "Regulatory Bodies",
    ]);
    state = setValues(state, "SpecificationFormat", ["Constrained NL"]);
    state = setValues(state, "Language", ["English"]);
    state = setValues(state, "Domain", ["Healthcare", "Restaurant Operations Management"]);
    state = setValues(state, "SubsetSize", [1120]);

    const config = toConfiguration(tree, state);
    expect(config.model).toBe("Synthline");
    expect(config.selections).toContain("CSV");
    expect(config.selections.indexOf("Generator")).toBeLessThan(
      config.selections.indexOf("Output"),
    );
    expect(config.values["RequirementType"]).toHaveLength(7);
    expect(config.values["Domain"]).toEqual([
      "Healthcare", "Restaurant Operations Management",
    ]);
    expect(config.values["SubsetSize"]).toEqual([1120]);
  });

  it("omits values of deselected features", () => {
    let state = initialState(tree);
    state = setValues(state, "Temperature", [1]);
    state = setSelected(tree, state, "Temperature", false);
    const config = toConfiguration(tree, state);
    expect(config.values["Temperature"]).toBeUndefined();
  });
});
