/**
 * Page assembly: model picker, one judgment grid per matrix, ranking
 * panel. Everything below is plumbing between the document shape the
 * service returns and the grid/ranking components; the math stays on the
 * server.
 */

import { ApiClient } from "./api.js";
import { mountGrid, type GridHandle, type SlotSpec } from "./grid.js";
import { mountRanking, type JudgmentRef, type RankingHandle } from "./ranking.js";

interface NetworkDoc {
  network: {
    clusters: { id: string; kind: string; nodes: { id: string; label?: string }[] }[];
    edges: { control: string; cluster: string }[];
  };
  judgments?: Record<string, Record<string, string>>;
  metadata?: Record<string, unknown>;
}

/** node id -> display label across the whole network */
export function labelsFromDocument(doc: NetworkDoc): Record<string, string> {
  const labels: Record<string, string> = {};
  for (const cluster of doc.network.clusters) {
    for (const node of cluster.nodes) {
      labels[node.id] = node.label ?? node.id;
    }
  }
  return labels;
}

/**
 * One grid per influence edge, in document order. A node never compares
 * itself: when the control node sits inside the target cluster it is
 * excluded from the matrix, matching the slot shape the service uses.
 */
export function slotsFromDocument(doc: NetworkDoc): SlotSpec[] {
  const labels = labelsFromDocument(doc);
  const byId = new Map(doc.network.clusters.map((c) => [c.id, c]));
  return doc.network.edges.map((edge) => {
    const target = byId.get(edge.cluster);
    if (!target) throw new Error(`edge targets unknown cluster ${edge.cluster}`);
    return {
      key: `${edge.control}:${edge.cluster}`,
      controlLabel: labels[edge.control] ?? edge.control,
      elements: target.nodes.map((nd) => nd.id).filter((id) => id !== edge.control),
      labels,
    };
  });
}

/** Upper-triangle pairs of a slot, in matrix order. */
export function slotPairs(slot: SlotSpec): string[] {
  const out: string[] = [];
  for (let i = 0; i < slot.elements.length; i++) {
    for (let j = i + 1; j < slot.elements.length; j++) {
      out.push(`${slot.elements[i]},${slot.elements[j]}`);
    }
  }
  return out;
}

/** Every stored judgment as a slider reference. */
export function judgmentsFromDocument(doc: NetworkDoc): JudgmentRef[] {
  const refs: JudgmentRef[] = [];
  for (const slot of slotsFromDocument(doc)) {
    const stored = doc.judgments?.[slot.key] ?? {};
    for (const pair of slotPairs(slot)) {
      if (pair in stored) {
        refs.push({ slot: slot.key, pair, stored: stored[pair] });
      }
    }
  }
  return refs;
}

export interface Page {
  grids: Map<string, GridHandle>;
  ranking: RankingHandle | null;
}

export async function loadModel(
  root: HTMLElement,
  api: ApiClient,
  modelId: string,
): Promise<Page> {
  const envelope = await api.getModel(modelId);
  const doc: NetworkDoc = envelope.document;
  let revision = envelope.revision;

  root.textContent = "";
  const title = document.createElement("h2");
  title.textContent = String(doc.metadata?.title ?? modelId);
  root.appendChild(title);

  const gridBox = document.createElement("div");
  gridBox.className = "grids";
  root.appendChild(gridBox);

  const grids = new Map<string, GridHandle>();
  for (const slot of slotsFromDocument(doc)) {
    const handle = mountGrid(gridBox, {
      api,
      modelId,
      slot,
      revision: () => revision,
      onRevision: (r) => {
        revision = r;
      },
      initial: doc.judgments?.[slot.key] ?? {},
    });
    grids.set(slot.key, handle);
  }

  const ranking = mountRanking(root, {
    api,
    modelId,
    judgments: judgmentsFromDocument(doc),
    labels: labelsFromDocument(doc),
    onIncomplete: (slotKey) => {
      grids.get(slotKey)?.element.scrollIntoView();
    },
  });

  return { grids, ranking };
}

export async function boot(root: HTMLElement, api: ApiClient): Promise<void> {
  const picker = document.createElement("div");
  picker.className = "picker";
  const select = document.createElement("select");
  const load = document.createElement("button");
  load.type = "button";
  load.textContent = "Open";
  picker.appendChild(select);
  picker.appendChild(load);
  root.appendChild(picker);

  const stage = document.createElement("div");
  root.appendChild(stage);

  const listing = await api.listModels();
  for (const m of listing.models) {
    const option = document.createElement("option");
    option.value = m.id;
    option.textContent = `${m.title ?? m.id} (${m.complete ? "complete" : "in progress"})`;
    select.appendChild(option);
  }
  if (listing.models.length === 0) {
    const note = document.createElement("p");
    note.textContent =
      "No models stored yet. POST a model document to /api/models to begin.";
    stage.appendChild(note);
    return;
  }

  load.addEventListener("click", () => {
    void loadModel(stage, api, select.value);
  });

  const fromQuery = new URLSearchParams(window.location.search).get("model");
  if (fromQuery) select.value = fromQuery;
  await loadModel(stage, api, select.value);
}
