import { beforeEach, describe, expect, it } from "vitest";

import { ApiError, type ConsistencySnapshot } from "../src/api.js";
import { mountGrid, type GridOptions, type SlotSpec } from "../src/grid.js";

const SLOT: SlotSpec = {
  key: "G:criteria",
  controlLabel: "Goal",
  elements: ["A", "B", "C"],
  labels: { A: "Alpha", B: "Beta", C: "Gamma" },
};

interface PutCall {
  slot: string;
  pair: string;
  value: string;
  revision: number;
}

function snapshotStub(partial: Partial<ConsistencySnapshot>): ConsistencySnapshot {
  return {
    slot: SLOT.key,
    revision: 2,
    total: 3,
    filled: 1,
    missing: ["A,C", "B,C"],
    complete: false,
    ...partial,
  };
}

function makeApi(responder: (call: PutCall) => ConsistencySnapshot | Error) {
  const calls: PutCall[] = [];
  return {
    calls,
    putJudgment(_id: string, slot: string, pair: string, value: string, revision: number) {
      const call = { slot, pair, value, revision };
      calls.push(call);
      const out = responder(call);
      return out instanceof Error ? Promise.reject(out) : Promise.resolve(out);
    },
  };
}

function mount(api: GridOptions["api"], initial?: Record<string, string>) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  let revision = 1;
  const handle = mountGrid(root, {
    api,
    modelId: "m1",
    slot: SLOT,
    revision: () => revision,
    onRevision: (r) => {
      revision = r;
    },
    initial,
  });
  return { root, handle, revision: () => revision };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("judgment grid", () => {
  it("renders selects above the diagonal and read-only mirrors below", () => {
    const { root } = mount(makeApi(() => snapshotStub({})));
    expect(root.querySelectorAll("select")).toHaveLength(3);
    expect(root.querySelectorAll("td.mirror")).toHaveLength(3);
    expect(root.querySelectorAll("td.diagonal")).toHaveLength(3);
    // a select offers the blank plus the 17 scale positions
    expect(root.querySelector("select")!.options).toHaveLength(18);
  });

  it("mirrors the reciprocal immediately on edit", async () => {
    const api = makeApi((call) => snapshotStub({ filled: 1, revision: call.revision + 1 }));
    const { root, handle } = mount(api);
    await handle.setCell("A,B", "5");
    expect(root.querySelector<HTMLElement>('[data-mirrors="A,B"]')!.textContent).toBe("1/5");
    await handle.setCell("A,C", "1/3");
    expect(root.querySelector<HTMLElement>('[data-mirrors="A,C"]')!.textContent).toBe("3");
  });

  it("tracks the shared revision across successive puts", async () => {
    const api = makeApi((call) => snapshotStub({ revision: call.revision + 1 }));
    const { handle, revision } = mount(api);
    await handle.setCell("A,B", "2");
    await handle.setCell("A,C", "4");
    expect(api.calls.map((c) => c.revision)).toEqual([1, 2]);
    expect(revision()).toBe(3);
  });

  it("shows no badge until the matrix completes, then renders the verdict", async () => {
    let remaining = 3;
    const api = makeApi((call) => {
      remaining -= 1;
      return snapshotStub({
        revision: call.revision + 1,
        filled: 3 - remaining,
        missing: remaining ? ["x"] : [],
        complete: remaining === 0,
        ...(remaining === 0
          ? { cr: 0.0161, verdict: "pass" as const, threshold: 0.05 }
          : {}),
      });
    });
    const { root, handle } = mount(api);
    await handle.setCell("A,B", "2");
    expect(root.querySelector(".badge")).toBeNull();
    await handle.setCell("A,C", "4");
    expect(root.querySelector(".badge")).toBeNull();
    await handle.setCell("B,C", "2");
    const badge = root.querySelector(".badge")!;
    expect(badge.className).toContain("pass");
    expect(badge.textContent).toBe("CR 0.0161 pass");
    expect(handle.badge()).toEqual({ status: "pass", cr: 0.0161 });
  });

  it("opens a re-rate prompt naming the worst triple on a fail verdict", async () => {
    const api = makeApi((call) =>
      snapshotStub({
        revision: call.revision + 1,
        missing: [],
        filled: 3,
        complete: true,
        cr: 0.31,
        verdict: "fail",
        threshold: 0.05,
      }),
    );
    const { root, handle } = mount(api, { "A,B": "2", "A,C": "4" });
    await handle.setCell("B,C", "9");
    const prompt = root.querySelector<HTMLElement>(".rerate")!;
    expect(prompt.hidden).toBe(false);
    expect(prompt.textContent).toContain("Hint");
    expect(prompt.textContent).toContain("Alpha");
    expect(prompt.textContent).toContain("Gamma");
    prompt.querySelector("button")!.click();
    expect(root.querySelectorAll(".triad-hint")).toHaveLength(3);
  });

  it("seeds stored judgments without issuing any writes", () => {
    const api = makeApi(() => snapshotStub({}));
    const { root, handle } = mount(api, { "A,B": "3", "B,C": "1/2" });
    expect(api.calls).toHaveLength(0);
    expect(handle.values()).toEqual({ "A,B": "3", "B,C": "1/2" });
    expect(root.querySelector<HTMLElement>('[data-mirrors="B,C"]')!.textContent).toBe("2");
  });

  it("shows a reload banner and reverts the cell on a 409", async () => {
    const api = makeApi(() => new ApiError(409, { message: "stale revision; current is 7", revision: 7 }));
    const { root, handle } = mount(api, { "A,B": "3" });
    const out = await handle.setCell("A,B", "5");
    expect(out).toBeNull();
    expect(root.querySelector<HTMLElement>(".conflict-banner")!.hidden).toBe(false);
    const select = root.querySelector<HTMLSelectElement>('[data-pair="A,B"]')!;
    expect(select.value).toBe("3");
    expect(root.querySelector<HTMLElement>('[data-mirrors="A,B"]')!.textContent).toBe("1/3");
  });

  it("marks the cell inline on a 422 without touching other cells", async () => {
    const api = makeApi(() => new ApiError(422, { message: "value off the comparison scale" }));
    const { root, handle } = mount(api);
    const out = await handle.setCell("A,B", "9");
    expect(out).toBeNull();
    const cell = root.querySelector<HTMLElement>('[data-pair="A,B"]')!.parentElement!;
    expect(cell.className).toContain("cell-error");
    expect(cell.getAttribute("title")).toContain("off the comparison scale");
    expect(root.querySelector(".conflict-banner")!.hidden).toBe(true);
  });

  it("lists pairs in upper-triangle order", () => {
    const { handle } = mount(makeApi(() => snapshotStub({})));
    expect(handle.pairs()).toEqual(["A,B", "A,C", "B,C"]);
  });
});
