import { existsSync } from "node:fs";
import { resolve } from "node:path";

/** Locate the bundled case study regardless of which directory vitest runs from. */
export function fixturePath(): string {
  for (const candidate of [
    resolve(process.cwd(), "../src/anp/fixtures/kwic.anp.json"),
    resolve(process.cwd(), "src/anp/fixtures/kwic.anp.json"),
  ]) {
    if (existsSync(candidate)) return candidate;
  }
  throw new Error("kwic.anp.json fixture not found relative to " + process.cwd());
}
