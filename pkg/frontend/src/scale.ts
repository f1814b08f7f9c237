/**
 * The fundamental comparison scale: the 17 positions 9, 8, ..., 2, 1,
 * 1/2, ..., 1/9. Values travel to the service as exact strings ("3",
 * "1/3"); the numeric form exists only for display work (bar widths,
 * the triad hint). Sliders and selects snap to these positions and
 * nothing in between.
 */

export interface ScalePosition {
  /** exact value string the service accepts */
  label: string;
  /** numeric value for presentation only */
  value: number;
}

const LABELS = [
  "9", "8", "7", "6", "5", "4", "3", "2", "1",
  "1/2", "1/3", "1/4", "1/5", "1/6", "1/7", "1/8", "1/9",
] as const;

export const SCALE: readonly ScalePosition[] = LABELS.map((label) => ({
  label,
  value: valueOf(label),
}));

/** Parse a rational label ("3", "1/3", "7/2") to a number. */
export function valueOf(label: string): number {
  const slash = label.indexOf("/");
  if (slash < 0) return Number(label);
  return Number(label.slice(0, slash)) / Number(label.slice(slash + 1));
}

/**
 * Exact string reciprocal. Works for any rational label, not just the
 * scale positions, so mirrored cells never suffer float round trips.
 */
export function reciprocal(label: string): string {
  const slash = label.indexOf("/");
  if (slash < 0) return label === "1" ? "1" : `1/${label}`;
  const num = label.slice(0, slash);
  const den = label.slice(slash + 1);
  return num === "1" ? den : `${den}/${num}`;
}

/** Index into SCALE, or -1 for off-scale values. */
export function scaleIndex(label: string): number {
  return SCALE.findIndex((p) => p.label === label);
}

export function isScaleLabel(label: string): boolean {
  return scaleIndex(label) >= 0;
}
