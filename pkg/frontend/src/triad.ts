/**
 * Client-side hint for re-rating: find the triple (i, j, k) that most
 * violates multiplicative consistency, scored by |log(a_ij * a_jk / a_ik)|.
 * This is a presentation aid only. The pass/warn/fail verdict always comes
 * from the service's CR screen, never from this heuristic.
 */

export interface TriadHint {
  i: number;
  j: number;
  k: number;
  /** |log consistency error|; 0 means the triple is perfectly consistent */
  inconsistency: number;
}

/**
 * The cycle product a_ij * a_jk * a_ki is invariant up to inversion under
 * reordering of the triple, so scanning i < j < k covers every triple.
 */
export function worstTriad(matrix: ReadonlyArray<ReadonlyArray<number>>): TriadHint | null {
  const n = matrix.length;
  if (n < 3) return null;
  let best: TriadHint | null = null;
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      for (let k = j + 1; k < n; k++) {
        const score = Math.abs(Math.log((matrix[i][j] * matrix[j][k]) / matrix[i][k]));
        if (best === null || score > best.inconsistency) {
          best = { i, j, k, inconsistency: score };
        }
      }
    }
  }
  return best;
}
