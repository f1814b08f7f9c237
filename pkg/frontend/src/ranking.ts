/**
 * Ranking panel: baseline bars from a solve, one perturbation slider per
 * judgment (snapped to the 17 scale positions), and a what-if overlay.
 * Slider moves debounce into whatif calls carrying sequence numbers;
 * responses that arrive after a newer one has rendered are dropped, so
 * the overlay always reflects the most recent reply.
 */

import {
  ApiError,
  type RankingView,
  type ResultDocument,
  type SolveOptions,
  type WhatIfOverride,
  type WhatIfResult,
} from "./api.js";
import { SCALE, scaleIndex } from "./scale.js";

export interface SolveApi {
  solve(id: string, options?: SolveOptions): Promise<ResultDocument>;
  whatif(
    id: string,
    overrides: WhatIfOverride[],
    options?: SolveOptions,
  ): Promise<WhatIfResult>;
}

export interface JudgmentRef {
  slot: string;
  pair: string;
  /** value currently stored on the server */
  stored: string;
}

export interface RankingOptions {
  api: SolveApi;
  modelId: string;
  judgments: JudgmentRef[];
  /** node id -> display label */
  labels: Record<string, string>;
  /** 0 sends immediately; the page default keeps typing smooth */
  debounceMs?: number;
  solveOptions?: SolveOptions;
  /** solve returned 409: the model still has empty slots */
  onIncomplete?: (firstMissingSlot: string) => void;
}

export interface BarState {
  id: string;
  weight: number;
}

export interface RankingHandle {
  element: HTMLElement;
  solve(): Promise<ResultDocument | null>;
  /** move one slider and wait for the resulting whatif round trip */
  setSlider(slot: string, pair: string, value: string): Promise<void>;
  baseline(): RankingView | null;
  overlay(): WhatIfResult | null;
  bars(): BarState[];
  deltas(): Record<string, number>;
}

export function mountRanking(root: HTMLElement, opts: RankingOptions): RankingHandle {
  const debounceMs = opts.debounceMs ?? 200;
  let baseline: RankingView | null = null;
  let overlay: WhatIfResult | null = null;
  let sent = 0;
  let applied = 0;
  let timer: ReturnType<typeof setTimeout> | null = null;
  const sliderFor = new Map<string, HTMLInputElement>();

  const panel = document.createElement("section");
  panel.className = "ranking";

  const solveButton = document.createElement("button");
  solveButton.type = "button";
  solveButton.textContent = "Solve";
  solveButton.addEventListener("click", () => void doSolve());
  panel.appendChild(solveButton);

  const status = document.createElement("p");
  status.className = "ranking-status";
  panel.appendChild(status);

  const barsBox = document.createElement("div");
  barsBox.className = "bars";
  panel.appendChild(barsBox);

  const slidersBox = document.createElement("div");
  slidersBox.className = "sliders";
  panel.appendChild(slidersBox);

  buildSliders();
  root.appendChild(panel);

  function key(slot: string, pair: string): string {
    return `${slot} ${pair}`;
  }

  function buildSliders(): void {
    slidersBox.textContent = "";
    const bySlot = new Map<string, JudgmentRef[]>();
    for (const j of opts.judgments) {
      const list = bySlot.get(j.slot) ?? [];
      list.push(j);
      bySlot.set(j.slot, list);
    }
    for (const [slot, refs] of bySlot) {
      const group = document.createElement("fieldset");
      const legend = document.createElement("legend");
      legend.textContent = slot;
      group.appendChild(legend);
      for (const ref of refs) {
        const row = document.createElement("label");
        row.className = "slider-row";
        const [a, b] = ref.pair.split(",");
        const name = document.createElement("span");
        name.textContent = `${opts.labels[a] ?? a} vs ${opts.labels[b] ?? b}`;
        row.appendChild(name);
        const input = document.createElement("input");
        input.type = "range";
        input.min = "0";
        input.max = String(SCALE.length - 1);
        input.step = "1";
        const idx = scaleIndex(ref.stored);
        if (idx < 0) {
          // off-scale rational judgments from a file cannot snap; freeze them
          input.value = String(scaleIndex("1"));
          input.disabled = true;
        } else {
          input.value = String(idx);
        }
        input.dataset.slot = ref.slot;
        input.dataset.pair = ref.pair;
        const readout = document.createElement("output");
        readout.textContent = input.disabled ? ref.stored : SCALE[Number(input.value)].label;
        input.addEventListener("input", () => {
          readout.textContent = SCALE[Number(input.value)].label;
          schedule();
        });
        row.appendChild(input);
        row.appendChild(readout);
        group.appendChild(row);
        sliderFor.set(key(ref.slot, ref.pair), input);
      }
      slidersBox.appendChild(group);
    }
  }

  function collectOverrides(): WhatIfOverride[] {
    const overrides: WhatIfOverride[] = [];
    for (const ref of opts.judgments) {
      const input = sliderFor.get(key(ref.slot, ref.pair));
      if (!input || input.disabled) continue;
      const label = SCALE[Number(input.value)].label;
      if (label !== ref.stored) {
        overrides.push({ slot: ref.slot, pair: ref.pair, value: label });
      }
    }
    return overrides;
  }

  function renderBars(): void {
    barsBox.textContent = "";
    if (!baseline) return;
    const weights = baseline.alternatives;
    const max = Math.max(...Object.values(weights), 1e-12);
    const perturbed = overlay?.perturbed ?? null;
    const orderChanged =
      perturbed !== null &&
      JSON.stringify(perturbed.order) !== JSON.stringify(baseline.order);
    if (orderChanged) barsBox.classList.add("order-changed");
    else barsBox.classList.remove("order-changed");
    for (const id of baseline.order) {
      const row = document.createElement("div");
      row.className = "bar-row";
      row.dataset.alt = id;
      const label = document.createElement("span");
      label.className = "alt-label";
      label.textContent = opts.labels[id] ?? id;
      row.appendChild(label);
      const bar = document.createElement("div");
      bar.className = "bar baseline";
      bar.style.width = `${(weights[id] / max) * 100}%`;
      row.appendChild(bar);
      const weightText = document.createElement("span");
      weightText.className = "weight";
      weightText.dataset.weight = String(weights[id]);
      weightText.textContent = weights[id].toFixed(4);
      row.appendChild(weightText);
      if (overlay && perturbed) {
        const over = document.createElement("div");
        over.className = "bar overlay";
        over.style.width = `${((perturbed.alternatives[id] ?? 0) / max) * 100}%`;
        row.appendChild(over);
        const d = overlay.delta[id] ?? 0;
        const deltaText = document.createElement("span");
        deltaText.className = "delta";
        deltaText.dataset.delta = String(d);
        deltaText.textContent = d > 0 ? `+${d.toFixed(4)}` : d.toFixed(4);
        row.appendChild(deltaText);
      }
      barsBox.appendChild(row);
    }
  }

  async function doSolve(): Promise<ResultDocument | null> {
    status.textContent = "";
    try {
      const result = await opts.api.solve(opts.modelId, opts.solveOptions);
      baseline = result.ranking;
      overlay = null;
      renderBars();
      return result;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        const missing = err.detail?.missing ?? {};
        const first = Object.keys(missing)[0] ?? "";
        status.textContent = `Model incomplete; first empty matrix: ${first}`;
        opts.onIncomplete?.(first);
        return null;
      }
      if (err instanceof ApiError) {
        status.textContent = err.message;
        return null;
      }
      throw err;
    }
  }

  function flush(): Promise<void> {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
    const mySeq = ++sent;
    return opts.api
      .whatif(opts.modelId, collectOverrides(), opts.solveOptions)
      .then((res) => {
        if (mySeq <= applied) return; // a newer response already rendered
        applied = mySeq;
        overlay = res;
        renderBars();
      })
      .catch((err) => {
        if (mySeq <= applied) return;
        applied = mySeq;
        status.textContent = err instanceof ApiError ? err.message : String(err);
      });
  }

  function schedule(): void {
    if (debounceMs <= 0) {
      void flush();
      return;
    }
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => void flush(), debounceMs);
  }

  return {
    element: panel,
    solve: doSolve,
    setSlider(slot: string, pair: string, value: string): Promise<void> {
      const input = sliderFor.get(key(slot, pair));
      if (!input) return Promise.reject(new Error(`no slider for ${slot} ${pair}`));
      const idx = scaleIndex(value);
      if (idx < 0) return Promise.reject(new Error(`off-scale value ${value}`));
      input.value = String(idx);
      const readout = input.parentElement?.querySelector("output");
      if (readout) readout.textContent = value;
      return flush();
    },
    baseline: () => baseline,
    overlay: () => overlay,
    bars: () =>
      Array.from(barsBox.querySelectorAll<HTMLElement>(".bar-row")).map((row) => ({
        id: row.dataset.alt ?? "",
        weight: Number(row.querySelector<HTMLElement>(".weight")?.dataset.weight ?? NaN),
      })),
    deltas: () => {
      const out: Record<string, number> = {};
      for (const el of barsBox.querySelectorAll<HTMLElement>(".delta")) {
        const alt = el.closest<HTMLElement>(".bar-row")?.dataset.alt;
        if (alt) out[alt] = Number(el.dataset.delta);
      }
      return out;
    },
  };
}
