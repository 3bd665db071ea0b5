// Selection/value state and its mapping to the service's Configuration JSON.
// No variability semantics live here: violations always come from the server.

import type { ConfigurationJson, FeatureNode, ModelTree } from "./types.js";

export interface ConfigState {
  selected: Set<string>;
  values: Map<string, (string | number)[]>;
}

export function walk(node: FeatureNode, visit: (f: FeatureNode, parent: FeatureNode | null) => void, parent: FeatureNode | null = null): void {
  visit(node, parent);
  for (const child of node.children ?? []) {
    walk(child, visit, node);
  }
}

/** Root plus the closure of mandatory and-children; group members start unselected. */
export function initialState(model: ModelTree): ConfigState {
  const selected = new Set<string>();
  const pick = (node: FeatureNode): void => {
    selected.add(node.name);
    if (node.decomposition === "and") {
      for (const child of node.children ?? []) {
        if (child.optionality === "mandatory") {
          pick(child);
        }
      }
    }
  };
  pick(model.root);
  return { selected, values: new Map() };
}

function dropSubtree(state: ConfigState, node: FeatureNode): void {
  state.selected.delete(node.name);
  state.values.delete(node.name);
  for (const child of node.children ?? []) {
    dropSubtree(state, child);
  }
}

function findNode(model: ModelTree, name: string): FeatureNode | null {
  let found: FeatureNode | null = null;
  walk(model.root, (f) => {
    if (f.name === name) found = f;
  });
  return found;
}

/** Select/deselect a feature; deselection clears its whole subtree. */
export function setSelected(model: ModelTree, state: ConfigState, name: string, on: boolean): ConfigState {
  const next: ConfigState = { selected: new Set(state.selected), values: new Map(state.values) };
  const node = findNode(model, name);
  if (!node) return next;
  if (on) {
    next.selected.add(name);
    if (node.decomposition === "and") {
      for (const child of node.children ?? []) {
        if (child.optionality === "mandatory") next.selected.add(child.name);
      }
    }
  } else {
    dropSubtree(next, node);
  }
  return next;
}

/** Pick exactly one member of an xor group. */
export function chooseXor(model: ModelTree, state: ConfigState, groupName: string, member: string | null): ConfigState {
  let next: ConfigState = { selected: new Set(state.selected), values: new Map(state.values) };
  const group = findNode(model, groupName);
  if (!group) return next;
  for (const child of group.children ?? []) {
    next = setSelected(model, next, child.name, false);
  }
  if (member) {
    next.selected.add(member);
  }
  return next;
}

export function setValues(state: ConfigState, name: string, values: (string | number)[]): ConfigState {
  const next: ConfigState = { selected: new Set(state.selected), values: new Map(state.values) };
  if (values.length === 0) {
    next.values.delete(name);
  } else {
    next.values.set(name, values);
  }
  return next;
}

/** Serialize for POST /api/validate, /api/expand, /api/runs; selections in
 * model declaration order so payloads are stable. */
export function toConfiguration(model: ModelTree, state: ConfigState): ConfigurationJson {
  const selections: string[] = [];
  walk(model.root, (f) => {
    if (state.selected.has(f.name)) selections.push(f.name);
  });
  const values: Record<string, (string | number)[]> = {};
  walk(model.root, (f) => {
    const vals = state.values.get(f.name);
    if (vals && vals.length && state.selected.has(f.name)) {
      values[f.name] = [...vals];
    }
  });
  return { model: model.name, selections, values };
}
