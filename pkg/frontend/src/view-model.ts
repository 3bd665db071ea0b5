// Pure presentation logic, kept out of the DOM code so it is testable.

import type {
  AllocationPreview,
  ExpandResponse,
  FeatureNode,
  ModelTree,
  RunSnapshot,
  ValidationReport,
  Violation,
} from "./types.js";

/** One UI section per top-level feature (the root's children). */
export function topSections(model: ModelTree): FeatureNode[] {
  return model.root.children ?? [];
}

export type ControlKind =
  | "group-xor"
  | "group-or"
  | "enum-single"
  | "enum-multi"
  | "number"
  | "text"
  | "branch";

export function controlKind(feature: FeatureNode): ControlKind {
  if (feature.decomposition === "xor") return "group-xor";
  if (feature.decomposition === "or") return "group-or";
  const attr = feature.attribute;
  if (attr) {
    if (attr.kind === "enumeration") {
      return attr.multiplicity === "multiple" ? "enum-multi" : "enum-single";
    }
    return attr.kind === "number" ? "number" : "text";
  }
  return "branch";
}

export function rangeHint(feature: FeatureNode): string {
  const range = feature.attribute?.range;
  return range ? `${range[0]} to ${range[1]}` : "";
}

export function violationsByFeature(report: ValidationReport | null): Map<string, Violation[]> {
  const map = new Map<string, Violation[]>();
  for (const violation of report?.violations ?? []) {
    const list = map.get(violation.feature_name) ?? [];
    list.push(violation);
    map.set(violation.feature_name, list);
  }
  return map;
}

/** The count badge mirrors the server's expansion count verbatim. */
export function countBadge(expand: ExpandResponse | null): string {
  return expand === null ? "–" : String(expand.count);
}

export function allocationSummary(allocation: AllocationPreview | null | undefined): string {
  if (!allocation) return "";
  if (allocation.min === allocation.max) {
    return `${allocation.min} per configuration`;
  }
  return `${allocation.min}–${allocation.max} per configuration`;
}

/** Run is allowed only when the latest server report says the config is valid. */
export function runEnabled(report: ValidationReport | null, busy: boolean): boolean {
  return !busy && report !== null && report.valid;
}

export function runProgress(snapshot: RunSnapshot | null): { percent: number; caption: string } {
  if (!snapshot) return { percent: 0, caption: "" };
  const percent = snapshot.total > 0 ? Math.round((100 * snapshot.produced) / snapshot.total) : 0;
  const caption = `${snapshot.status} · ${snapshot.produced}/${snapshot.total}`;
  return { percent, caption };
}

export function metricCards(report: {
  sample_count: number;
  vocab_size: number;
  normalized_vocab_size: number;
  aps: number;
  intra_class_aps_macro: number;
  ingf: number;
}): { label: string; value: string }[] {
  return [
    { label: "samples", value: String(report.sample_count) },
    { label: "vocabulary", value: String(report.vocab_size) },
    { label: "vocab / sample", value: report.normalized_vocab_size.toFixed(2) },
    { label: "APS", value: report.aps.toFixed(3) },
    { label: "intra-class APS", value: report.intra_class_aps_macro.toFixed(3) },
    { label: "INGF", value: report.ingf.toFixed(3) },
  ];
}

/** Histogram bars normalized to the tallest bin, for CSS heights. */
export function histogramBars(
  histogram: [number, number][],
): { lower: number; count: number; height: number }[] {
  const peak = Math.max(1, ...histogram.map(([, count]) => count));
  const width = histogram.length ? 2 / histogram.length : 0;
  return histogram.map(([lower, count]) => ({
    lower: Math.round((lower + width / 2) * 100) / 100,
    count,
    height: Math.round((100 * count) / peak),
  }));
}
