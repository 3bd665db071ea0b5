// Wire types matching the service's JSON payloads.

export interface AttributeSpec {
  kind: "enumeration" | "number" | "text";
  multiplicity: "single" | "multiple";
  allowed_values?: string[];
  range?: [number, number];
}

export interface FeatureNode {
  name: string;
  optionality: "mandatory" | "optional";
  decomposition: "and" | "or" | "xor" | "leaf";
  attribute?: AttributeSpec;
  children?: FeatureNode[];
}

export interface ModelTree {
  name: string;
  version: string;
  root: FeatureNode;
  constraints: { kind: string; lhs: string; rhs: string }[];
}

export interface ConfigurationJson {
  model: string;
  selections: string[];
  values: Record<string, (string | number)[]>;
}

export interface Violation {
  rule: string;
  feature_name: string;
  message: string;
}

export interface ValidationReport {
  valid: boolean;
  violations: Violation[];
}

export interface AllocationPreview {
  subset_size: number;
  min: number;
  max: number;
  first: number[];
}

export interface ExpandResponse {
  count: number;
  axes: { name: string; values: (string | number)[] }[];
  sample: { index: number; axes: Record<string, string | number> }[];
  allocation: AllocationPreview | null;
}

export interface LabelSpec {
  label: string;
  description: string;
}

export interface RunSnapshot {
  id: string;
  label: string;
  status: "pending" | "running" | "completed" | "failed" | "cancelled";
  produced: number;
  total: number;
  allocation: [number, number][];
  failures: { atomic_index: number; attempt: number; reason: string }[];
  error: string | null;
  created_at: string;
  finished_at: string | null;
}

export interface DiversityReportJson {
  sample_count: number;
  vocab_size: number;
  normalized_vocab_size: number;
  aps: number;
  intra_class_aps: Record<string, number>;
  intra_class_aps_macro: number;
  ingf: number;
  histogram: [number, number][];
  notes: Record<string, unknown>;
}

export const TERMINAL_STATUSES = new Set(["completed", "failed", "cancelled"]);
