/**
 * Judgment grid for one comparison matrix. Upper-triangle cells are
 * 17-position selects; the lower triangle mirrors reciprocals and is never
 * editable; the diagonal is fixed at 1. Every edit is PUT to the service
 * immediately, and once the matrix is complete the service's consistency
 * snapshot renders as a badge. A fail verdict opens a re-rate prompt that
 * highlights the least consistent triple (a hint; the verdict itself is
 * the service's).
 */

import { ApiError, type ConsistencySnapshot } from "./api.js";
import { SCALE, reciprocal, valueOf } from "./scale.js";
import { worstTriad } from "./triad.js";

/** The slice of the API client the grid needs (easy to stub in tests). */
export interface JudgmentApi {
  putJudgment(
    id: string,
    slot: string,
    pair: string,
    value: string,
    revision: number,
  ): Promise<ConsistencySnapshot>;
}

export interface SlotSpec {
  key: string;
  controlLabel: string;
  /** node ids in matrix order */
  elements: string[];
  /** node id -> display label */
  labels: Record<string, string>;
}

export interface GridOptions {
  api: JudgmentApi;
  modelId: string;
  slot: SlotSpec;
  /** shared model revision, owned by the page (all grids bump the same counter) */
  revision: () => number;
  onRevision: (revision: number) => void;
  /** judgments already stored on the server, pair -> value label */
  initial?: Record<string, string>;
  onSnapshot?: (snapshot: ConsistencySnapshot) => void;
}

export interface BadgeState {
  status: string;
  cr: number;
}

export interface GridHandle {
  element: HTMLElement;
  /** scripted edit: behaves exactly like a user picking a value */
  setCell(pair: string, value: string): Promise<ConsistencySnapshot | null>;
  values(): Record<string, string>;
  snapshot(): ConsistencySnapshot | null;
  badge(): BadgeState | null;
  pairs(): string[];
}

export function mountGrid(root: HTMLElement, opts: GridOptions): GridHandle {
  const { slot } = opts;
  const n = slot.elements.length;
  const values = new Map<string, string>();
  const selects = new Map<string, HTMLSelectElement>();
  const mirrors = new Map<string, HTMLElement>();
  let latest: ConsistencySnapshot | null = null;
  let badgeState: BadgeState | null = null;

  const section = document.createElement("section");
  section.className = "grid";
  section.dataset.slot = slot.key;

  const heading = document.createElement("h3");
  heading.textContent = `${slot.controlLabel}: compare ${slot.key.split(":")[1]}`;
  section.appendChild(heading);

  const banner = document.createElement("div");
  banner.className = "conflict-banner";
  banner.hidden = true;
  banner.textContent = "This model changed in another session. Reload to continue.";
  section.appendChild(banner);

  const table = document.createElement("table");
  table.className = "judgments";
  const thead = document.createElement("thead");
  const head = document.createElement("tr");
  thead.appendChild(head);
  table.appendChild(thead);
  head.appendChild(document.createElement("th"));
  for (const el of slot.elements) {
    const th = document.createElement("th");
    th.textContent = slot.labels[el] ?? el;
    head.appendChild(th);
  }
  const body = document.createElement("tbody");
  table.appendChild(body);
  for (let i = 0; i < n; i++) {
    const row = document.createElement("tr");
    body.appendChild(row);
    const th = document.createElement("th");
    th.textContent = slot.labels[slot.elements[i]] ?? slot.elements[i];
    row.appendChild(th);
    for (let j = 0; j < n; j++) {
      const cell = document.createElement("td");
      row.appendChild(cell);
      if (i === j) {
        cell.textContent = "1";
        cell.className = "diagonal";
      } else if (i < j) {
        const pair = `${slot.elements[i]},${slot.elements[j]}`;
        const select = document.createElement("select");
        select.dataset.pair = pair;
        const blank = document.createElement("option");
        blank.value = "";
        blank.textContent = "-";
        select.appendChild(blank);
        for (const pos of SCALE) {
          const option = document.createElement("option");
          option.value = pos.label;
          option.textContent = pos.label;
          select.appendChild(option);
        }
        select.addEventListener("change", () => {
          if (select.value) void commit(pair, select.value);
        });
        cell.appendChild(select);
        selects.set(pair, select);
      } else {
        const pair = `${slot.elements[j]},${slot.elements[i]}`;
        cell.className = "mirror";
        cell.dataset.mirrors = pair;
        mirrors.set(pair, cell);
      }
    }
  }
  section.appendChild(table);

  const badgeArea = document.createElement("div");
  badgeArea.className = "badge-area";
  section.appendChild(badgeArea);

  const rerate = document.createElement("div");
  rerate.className = "rerate";
  rerate.hidden = true;
  section.appendChild(rerate);

  root.appendChild(section);

  // seed stored judgments without issuing writes
  for (const [pair, label] of Object.entries(opts.initial ?? {})) {
    const select = selects.get(pair);
    if (!select) continue;
    select.value = label;
    if (select.value !== label) {
      // off-scale rational from a file: show it read-only
      const option = document.createElement("option");
      option.value = label;
      option.textContent = label;
      select.appendChild(option);
      select.value = label;
    }
    values.set(pair, label);
    const mirror = mirrors.get(pair);
    if (mirror) mirror.textContent = reciprocal(label);
  }

  function renderBadge(snap: ConsistencySnapshot): void {
    badgeArea.textContent = "";
    if (!snap.complete || snap.cr === undefined || !snap.verdict) {
      badgeState = null;
      rerate.hidden = true;
      return;
    }
    const badge = document.createElement("span");
    badge.className = `badge ${snap.verdict}`;
    badge.textContent = `CR ${snap.cr.toFixed(4)} ${snap.verdict}`;
    badgeArea.appendChild(badge);
    badgeState = { status: snap.verdict, cr: snap.cr };
    if (snap.verdict === "fail") showReratePrompt();
    else rerate.hidden = true;
  }

  function numericMatrix(): number[][] {
    const m: number[][] = [];
    for (let i = 0; i < n; i++) {
      m.push(new Array(n).fill(1));
    }
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const v = valueOf(values.get(`${slot.elements[i]},${slot.elements[j]}`) ?? "1");
        m[i][j] = v;
        m[j][i] = 1 / v;
      }
    }
    return m;
  }

  function showReratePrompt(): void {
    rerate.textContent = "";
    rerate.hidden = false;
    const hint = worstTriad(numericMatrix());
    const msg = document.createElement("p");
    if (hint) {
      const names = [hint.i, hint.j, hint.k]
        .map((x) => slot.labels[slot.elements[x]] ?? slot.elements[x])
        .join(", ");
      msg.textContent =
        `This matrix failed its consistency screen. Hint: the least ` +
        `consistent triple is ${names}; revisiting those comparisons ` +
        `usually helps.`;
    } else {
      msg.textContent = "This matrix failed its consistency screen.";
    }
    rerate.appendChild(msg);
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = "Re-rate";
    button.addEventListener("click", () => {
      for (const cell of section.querySelectorAll(".triad-hint")) {
        cell.classList.remove("triad-hint");
      }
      if (hint) {
        const [i, j, k] = [hint.i, hint.j, hint.k];
        for (const [a, b] of [[i, j], [j, k], [i, k]]) {
          const pair = `${slot.elements[a]},${slot.elements[b]}`;
          selects.get(pair)?.parentElement?.classList.add("triad-hint");
        }
        const first = selects.get(`${slot.elements[i]},${slot.elements[j]}`);
        first?.focus();
      }
    });
    rerate.appendChild(button);
  }

  function clearCellError(select: HTMLSelectElement): void {
    select.parentElement?.classList.remove("cell-error");
    select.parentElement?.removeAttribute("title");
  }

  function showCellError(select: HTMLSelectElement, message: string): void {
    select.parentElement?.classList.add("cell-error");
    select.parentElement?.setAttribute("title", message);
  }

  async function commit(pair: string, label: string): Promise<ConsistencySnapshot | null> {
    const select = selects.get(pair);
    if (!select) throw new Error(`no such cell: ${pair}`);
    const previous = values.get(pair) ?? "";
    const mirror = mirrors.get(pair);
    // reciprocal renders immediately, before the server answers
    if (mirror) mirror.textContent = reciprocal(label);
    try {
      const snap = await opts.api.putJudgment(
        opts.modelId, slot.key, pair, label, opts.revision(),
      );
      values.set(pair, label);
      clearCellError(select);
      banner.hidden = true;
      opts.onRevision(snap.revision);
      latest = snap;
      renderBadge(snap);
      opts.onSnapshot?.(snap);
      return snap;
    } catch (err) {
      // put the cell back the way the server still has it
      select.value = previous;
      if (mirror) mirror.textContent = previous ? reciprocal(previous) : "";
      if (err instanceof ApiError && err.status === 409) {
        banner.hidden = false;
        return null;
      }
      if (err instanceof ApiError && err.status === 422) {
        const detail = err.detail;
        showCellError(select, typeof detail?.message === "string" ? detail.message : "rejected");
        return null;
      }
      throw err;
    }
  }

  return {
    element: section,
    setCell(pair: string, value: string) {
      const select = selects.get(pair);
      if (!select) return Promise.reject(new Error(`no such cell: ${pair}`));
      select.value = value;
      return commit(pair, value);
    },
    values: () => Object.fromEntries(values),
    snapshot: () => latest,
    badge: () => badgeState,
    pairs: () => {
      const out: string[] = [];
      for (let i = 0; i < n; i++) {
        for (let j = i + 1; j < n; j++) {
          out.push(`${slot.elements[i]},${slot.elements[j]}`);
        }
      }
      return out;
    },
  };
}
