// DOM wiring for the configurator. All variability semantics live in the
// service; this file only renders state, posts edits, and mirrors responses.

import { ApiClient, ApiError } from "./api.js";
import {
  ConfigState,
  chooseXor,
  initialState,
  setSelected,
  setValues,
  toConfiguration,
} from "./config-state.js";
import { LatestWins, debounce } from "./debounce.js";
import type {
  ExpandResponse,
  FeatureNode,
  LabelSpec,
  ModelTree,
  RunSnapshot,
  ValidationReport,
  Violation,
} from "./types.js";
import { TERMINAL_STATUSES } from "./types.js";
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
} from "./view-model.js";

const VALIDATE_DEBOUNCE_MS = 250;
const POLL_INTERVAL_MS = 500;

const api = new ApiClient("");
const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

let model: ModelTree;
let labels: LabelSpec[] = [];
let state: ConfigState;
let lastReport: ValidationReport | null = null;
let lastExpand: ExpandResponse | null = null;
let runBusy = false;
const violationSlots = new Map<string, HTMLElement>();
const controlBoxes = new Map<string, HTMLElement>();
const completedRuns = new Map<string, RunSnapshot>();
const latest = new LatestWins();

// ---------------------------------------------------------------------------
// Boot

async function boot(): Promise<void> {
  hideBanner();
  try {
    [model, labels] = await Promise.all([api.getModel(), api.getLabels()]);
  } catch (err) {
    showBanner(err instanceof ApiError ? err.message : String(err));
    return;
  }
  state = initialState(model);
  el("model-badge").textContent = `${model.name} v${model.version}`;
  renderSections();
  renderRunLabels();
  refresh();
}

function showBanner(text: string): void {
  el("banner-text").textContent = text;
  el("banner").classList.remove("hidden");
}

function hideBanner(): void {
  el("banner").classList.add("hidden");
}

el("banner-retry").addEventListener("click", () => void boot());

// ---------------------------------------------------------------------------
// Configuration tree

function renderSections(): void {
  const host = el("sections");
  host.textContent = "";
  violationSlots.clear();
  controlBoxes.clear();
  for (const section of topSections(model)) {
    const div = document.createElement("div");
    div.className = "section";
    const h3 = document.createElement("h3");
    h3.textContent = section.name;
    div.appendChild(h3);
    renderFeature(section, div);
    host.appendChild(div);
  }
}

function violationSlot(name: string, parent: HTMLElement): void {
  const slot = document.createElement("div");
  violationSlots.set(name, slot);
  parent.appendChild(slot);
}

function update(next: ConfigState): void {
  state = next;
  renderSections();
  refresh();
}

function renderFeature(feature: FeatureNode, parent: HTMLElement): void {
  const box = document.createElement("div");
  box.className = "feature";
  controlBoxes.set(feature.name, box);
  parent.appendChild(box);

  const selected = state.selected.has(feature.name);
  const head = document.createElement("div");
  box.appendChild(head);

  if (feature.optionality === "optional") {
    const label = document.createElement("label");
    const check = document.createElement("input");
    check.type = "checkbox";
    check.checked = selected;
    check.addEventListener("change", () =>
      update(setSelected(model, state, feature.name, check.checked)),
    );
    label.append(check, ` ${feature.name}`);
    label.className = "feature-label";
    head.appendChild(label);
  } else {
    const span = document.createElement("span");
    span.className = "feature-label";
    span.textContent = feature.name;
    head.appendChild(span);
  }

  if (selected) {
    renderControl(feature, box);
  }
  violationSlot(feature.name, box);

  if (selected && (feature.decomposition === "and")) {
    for (const child of feature.children ?? []) {
      renderFeature(child, box);
    }
  }
}

function renderControl(feature: FeatureNode, box: HTMLElement): void {
  const kind = controlKind(feature);
  if (kind === "group-xor") {
    const select = document.createElement("select");
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = "(choose one)";
    select.appendChild(blank);
    for (const child of feature.children ?? []) {
      const option = document.createElement("option");
      option.value = child.name;
      option.textContent = child.name;
      option.selected = state.selected.has(child.name);
      select.appendChild(option);
    }
    select.addEventListener("change", () =>
      update(chooseXor(model, state, feature.name, select.value || null)),
    );
    box.appendChild(select);
  } else if (kind === "group-or") {
    const choices = document.createElement("div");
    choices.className = "choices";
    for (const child of feature.children ?? []) {
      const label = document.createElement("label");
      const check = document.createElement("input");
      check.type = "checkbox";
      check.checked = state.selected.has(child.name);
      check.addEventListener("change", () =>
        update(setSelected(model, state, child.name, check.checked)),
      );
      label.append(check, ` ${child.name}`);
      choices.appendChild(label);
    }
    box.appendChild(choices);
  } else if (kind === "enum-multi") {
    const current = new Set((state.values.get(feature.name) ?? []).map(String));
    const choices = document.createElement("div");
    choices.className = "choices";
    for (const value of feature.attribute?.allowed_values ?? []) {
      const label = document.createElement("label");
      const check = document.createElement("input");
      check.type = "checkbox";
      check.checked = current.has(value);
      check.addEventListener("change", () => {
        const next = new Set(current);
        if (check.checked) next.add(value);
        else next.delete(value);
        update(setValues(state, feature.name, [...next].filter((v) =>
          (feature.attribute?.allowed_values ?? []).includes(v),
        )));
      });
      label.append(check, ` ${value}`);
      choices.appendChild(label);
    }
    box.appendChild(choices);
  } else if (kind === "enum-single") {
    const select = document.createElement("select");
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = "(unset)";
    select.appendChild(blank);
    const current = String(state.values.get(feature.name)?.[0] ?? "");
    for (const value of feature.attribute?.allowed_values ?? []) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      option.selected = value === current;
      select.appendChild(option);
    }
    select.addEventListener("change", () =>
      update(setValues(state, feature.name, select.value ? [select.value] : [])),
    );
    box.appendChild(select);
  } else if (kind === "number") {
    const input = document.createElement("input");
    input.type = "number";
    input.step = "any";
    input.value = String(state.values.get(feature.name)?.[0] ?? "");
    input.placeholder = rangeHint(feature);
    input.addEventListener("change", () => {
      const raw = input.value.trim();
      update(setValues(state, feature.name, raw === "" ? [] : [Number(raw)]));
    });
    box.appendChild(input);
    const hint = document.createElement("span");
    hint.className = "muted";
    hint.textContent = ` range ${rangeHint(feature)}`;
    box.appendChild(hint);
  } else if (kind === "text") {
    const input = document.createElement("input");
    input.value = String(state.values.get(feature.name)?.[0] ?? "");
    input.addEventListener("change", () => {
      const raw = input.value.trim();
      update(setValues(state, feature.name, raw === "" ? [] : [raw]));
    });
    box.appendChild(input);
  }
}

// ---------------------------------------------------------------------------
// Live validation + expansion

const refresh = debounce(() => {
  const configuration = toConfiguration(model, state);
  void latest.run(
    async () => {
      const report = await api.validate(configuration);
      let expand: ExpandResponse | null = null;
      if (report.valid) {
        expand = await api.expand(configuration);
      }
      return { report, expand };
    },
    ({ report, expand }) => {
      hideBanner();
      lastReport = report;
      lastExpand = expand;
      renderValidation();
    },
    (err) => {
      if (err instanceof ApiError && err.status === 0) showBanner(err.message);
    },
  );
}, VALIDATE_DEBOUNCE_MS);

function renderValidation(): void {
  for (const slot of violationSlots.values()) slot.textContent = "";
  for (const box of controlBoxes.values()) box.classList.remove("invalid");

  const byFeature = violationsByFeature(lastReport);
  const orphans: Violation[] = [];
  for (const [name, violations] of byFeature) {
    const slot = violationSlots.get(name);
    if (!slot) {
      orphans.push(...violations);
      continue;
    }
    controlBoxes.get(name)?.classList.add("invalid");
    for (const violation of violations) {
      const div = document.createElement("div");
      div.className = "violation";
      div.textContent = `${violation.rule}: ${violation.message}`;
      slot.appendChild(div);
    }
  }
  if (orphans.length) {
    showBanner(orphans.map((v) => v.message).join(" · "));
  }

  el("count-badge").textContent = countBadge(lastExpand);
  el("allocation-note").textContent = lastExpand
    ? allocationSummary(lastExpand.allocation)
    : "";
  (el("run-button") as HTMLButtonElement).disabled = !runEnabled(lastReport, runBusy);
  el("run-hint").textContent = runEnabled(lastReport, runBusy)
    ? ""
    : "resolve configuration violations to enable runs";
}

// ---------------------------------------------------------------------------
// Run panel

function renderRunLabels(): void {
  const select = el<HTMLSelectElement>("run-label");
  select.textContent = "";
  for (const spec of labels) {
    const option = document.createElement("option");
    option.value = spec.label;
    option.textContent = spec.label;
    select.appendChild(option);
  }
  syncDescription();
  select.addEventListener("change", syncDescription);
}

function syncDescription(): void {
  const select = el<HTMLSelectElement>("run-label");
  const spec = labels.find((s) => s.label === select.value) ?? labels[0];
  if (spec) {
    el<HTMLTextAreaElement>("run-description").value = spec.description;
  }
}

el("run-button").addEventListener("click", () => {
  void startRun();
});

async function startRun(): Promise<void> {
  const label = el<HTMLSelectElement>("run-label").value;
  const description = el<HTMLTextAreaElement>("run-description").value.trim();
  const countRaw = el<HTMLInputElement>("run-count").value.trim();
  const seedRaw = el<HTMLInputElement>("run-seed").value.trim();
  runBusy = true;
  renderValidation();
  try {
    const { run_id } = await api.createRun({
      configuration: toConfiguration(model, state),
      label: { label, description },
      backend: el<HTMLInputElement>("run-backend").value.trim() || "mock",
      format: el<HTMLSelectElement>("run-format").value as "csv" | "json",
      count: countRaw ? Number(countRaw) : null,
      seed: seedRaw ? Number(seedRaw) : null,
    });
    trackRun(run_id);
  } catch (err) {
    showBanner(err instanceof ApiError ? err.message : String(err));
  } finally {
    runBusy = false;
    renderValidation();
  }
}

function trackRun(runId: string): void {
  const card = document.createElement("div");
  card.className = "run-card";
  const title = document.createElement("div");
  const bar = document.createElement("div");
  bar.className = "bar";
  const fill = document.createElement("div");
  bar.appendChild(fill);
  const caption = document.createElement("div");
  caption.className = "muted";
  const downloads = document.createElement("div");
  downloads.className = "downloads";
  card.append(title, bar, caption, downloads);
  el("runs").prepend(card);

  const timer = setInterval(() => {
    void (async () => {
      let snapshot: RunSnapshot;
      try {
        snapshot = await api.getRun(runId);
      } catch {
        return; // transient polling failure; keep trying
      }
      title.textContent = `${snapshot.label} · ${runId}`;
      const progress = runProgress(snapshot);
      fill.style.width = `${progress.percent}%`;
      caption.textContent = progress.caption + (snapshot.error ? ` · ${snapshot.error}` : "");
      card.className = `run-card ${snapshot.status}`;
      if (TERMINAL_STATUSES.has(snapshot.status)) {
        clearInterval(timer);
        if (snapshot.produced > 0 || snapshot.status === "completed") {
          for (const format of ["csv", "json"] as const) {
            const link = document.createElement("a");
            link.href = api.runDataUrl(runId, format);
            link.textContent = `download ${format}`;
            downloads.appendChild(link);
          }
        }
        if (snapshot.status === "completed") {
          completedRuns.set(runId, snapshot);
          renderMetricsRuns();
        }
      }
    })();
  }, POLL_INTERVAL_MS);
}

// ---------------------------------------------------------------------------
// Metrics panel

function renderMetricsRuns(): void {
  const select = el<HTMLSelectElement>("metrics-run");
  select.textContent = "";
  for (const [runId, snapshot] of completedRuns) {
    const option = document.createElement("option");
    option.value = runId;
    option.textContent = `${snapshot.label} (${snapshot.produced} samples)`;
    select.appendChild(option);
  }
  (el("metrics-button") as HTMLButtonElement).disabled = completedRuns.size === 0;
}

el("metrics-button").addEventListener("click", () => {
  void (async () => {
    const runId = el<HTMLSelectElement>("metrics-run").value;
    if (!runId) return;
    let report;
    try {
      report = await api.metricsForRun(runId);
    } catch (err) {
      showBanner(err instanceof ApiError ? err.message : String(err));
      return;
    }
    const cards = el("metric-cards");
    cards.textContent = "";
    for (const { label, value } of metricCards(report)) {
      const card = document.createElement("div");
      card.className = "card";
      const v = document.createElement("div");
      v.className = "value";
      v.textContent = value;
      const l = document.createElement("div");
      l.className = "label";
      l.textContent = label;
      card.append(v, l);
      cards.appendChild(card);
    }
    const histogram = el("histogram");
    histogram.textContent = "";
    for (const bar of histogramBars(report.histogram)) {
      const bin = document.createElement("div");
      bin.className = "bin";
      bin.style.height = `${bar.height}%`;
      bin.title = `${bar.lower}: ${bar.count} pairs`;
      histogram.appendChild(bin);
    }
    el("histogram-caption").textContent =
      "same-class pair cosine similarity, bins over [-1, 1]";
  })();
});

void boot();
