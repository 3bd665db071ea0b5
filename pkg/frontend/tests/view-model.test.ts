import { describe, expect, it } from "vitest";

import model from "./fixtures/model.json";
import type { ExpandResponse, ModelTree, ValidationReport } from "../src/types.js";
import {
  allocationSummary,
  controlKind,
  countBadge,
  histogramBars,
  metricCards,
  rangeHint,
  runEnabled,
  runProgress,
  topSections,
  violationsByFeature,
} from "../src/view-model.js";

const tree = model as unknown as ModelTree;

function findFeature(name: string) {
  const stack = [tree.root];
  while (stack.length) {
    const node = stack.pop()!;
    if (node.name === name) return node;
    stack.push(...(node.children ?? []));
  }
  throw new Error(`no feature ${name}`);
}

describe("sections", () => {
  it("renders one section per core feature", () => {
    expect(topSections(tree).map((f) => f.name)).toEqual([
      "Generator", "Artifact", "MLTask", "Output",
    ]);
  });
});

describe("controlKind", () => {
  it("maps features to the right controls", () => {
    expect(controlKind(findFeature("OutputFormat"))).toBe("group-xor");
    expect(controlKind(findFeature("RequirementType"))).toBe("enum-multi");
    expect(controlKind(findFeature("LLM"))).toBe("enum-single");
    expect(controlKind(findFeature("Temperature"))).toBe("number");
    expect(controlKind(findFeature("Label"))).toBe("text");
    expect(controlKind(findFeature("Artifact"))).toBe("branch");
  });

  it("number inputs expose their range hints", () => {
    expect(rangeHint(findFeature("Temperature"))).toBe("0 to 2");
    expect(rangeHint(findFeature("TopP"))).toBe("0 to 1");
  });
});

describe("count badge and allocation", () => {
  const expand: ExpandResponse = {
    count: 112,
    axes: [],
    sample: [],
    allocation: { subset_size: 1120, min: 10, max: 10, first: Array(10).fill(10) },
  };

  it("mirrors the server count verbatim", () => {
    expect(countBadge(expand)).toBe("112");
    expect(countBadge(null)).toBe("–");
  });

  it("summarizes even allocations", () => {
    expect(allocationSummary(expand.allocation)).toBe("10 per configuration");
  });

  it("summarizes remainder allocations as a range", () => {
    expect(
      allocationSummary({ subset_size: 10, min: 3, max: 4, first: [4, 3, 3] }),
    ).toBe("3–4 per configuration");
    expect(allocationSummary(null)).toBe("");
  });
});

describe("run gating", () => {
  const valid: ValidationReport = { valid: true, violations: [] };
  const invalid: ValidationReport = {
    valid: false,
    violations: [
      { rule: "xor-cardinality", feature_name: "OutputFormat", message: "needs exactly one" },
    ],
  };

  it("never enables Run while the last report is invalid", () => {
    expect(runEnabled(invalid, false)).toBe(false);
    expect(runEnabled(null, false)).toBe(false);
    expect(runEnabled(valid, false)).toBe(true);
    expect(runEnabled(valid, true)).toBe(false);
  });

  it("groups violations by feature for inline display", () => {
    const byFeature = violationsByFeature(invalid);
    expect(byFeature.get("OutputFormat")).toHaveLength(1);
    expect(byFeature.get("Domain")).toBeUndefined();
  });
});

describe("run progress", () => {
  it("computes percent and caption", () => {
    const snapshot = {
      id: "r1", label: "Ambiguous", status: "running", produced: 6, total: 24,
      allocation: [], failures: [], error: null,
      created_at: "", finished_at: null,
    } as const;
    expect(runProgress(snapshot as never)).toEqual({ percent: 25, caption: "running · 6/24" });
    expect(runProgress(null)).toEqual({ percent: 0, caption: "" });
  });
});

describe("metrics rendering", () => {
  it("formats cards at fixed precision", () => {
    const cards = metricCards({
      sample_count: 24, vocab_size: 57, normalized_vocab_size: 2.375,
      aps: 0.61234, intra_class_aps_macro: 0.68901, ingf: 2.5,
    });
    expect(cards.map((c) => c.value)).toEqual(["24", "57", "2.38", "0.612", "0.689", "2.500"]);
  });

  it("normalizes histogram bars against the peak bin", () => {
    const bars = histogramBars([[-1, 0], [0, 5], [0.5, 10]]);
    expect(bars.map((b) => b.height)).toEqual([0, 50, 100]);
    expect(bars[1]!.count).toBe(5);
  });
});
