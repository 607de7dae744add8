import type { BallsAllocationDoc } from './types';

export const DEFAULT_TOTAL_BALLS = 20;
export const MIN_TOTAL_BALLS = 10;
export const MAX_TOTAL_BALLS = 100;
export const DEFAULT_BIN_COUNT = 10;

/**
 * State for the balls-in-bins distribution builder.
 *
 * The invariant the whole widget hangs on: the sum of the per-bin counts
 * always equals totalBalls, no matter what sequence of drag operations
 * arrives. Moves that would break that (empty source, out-of-range bin)
 * are rejected and leave the state untouched.
 */
export class BallsBuilder {
  readonly binEdges: number[];
  private counts: number[];
  private total: number;

  constructor(
    lo: number,
    hi: number,
    nBins = DEFAULT_BIN_COUNT,
    totalBalls = DEFAULT_TOTAL_BALLS,
  ) {
    if (!(lo < hi)) throw new Error(`need lo < hi, got [${lo}, ${hi}]`);
    if (nBins < 2) throw new Error('need at least 2 bins');
    if (totalBalls < MIN_TOTAL_BALLS || totalBalls > MAX_TOTAL_BALLS) {
      throw new Error(
        `total balls must be in [${MIN_TOTAL_BALLS}, ${MAX_TOTAL_BALLS}], got ${totalBalls}`,
      );
    }
    const width = (hi - lo) / nBins;
    this.binEdges = Array.from({ length: nBins + 1 }, (_, i) => lo + i * width);
    this.binEdges[nBins] = hi; // avoid float drift on the last edge
    this.total = totalBalls;
    this.counts = this.spreadEvenly(totalBalls, nBins);
  }

  private spreadEvenly(total: number, nBins: number): number[] {
    const base = Math.floor(total / nBins);
    const counts = new Array<number>(nBins).fill(base);
    // hand out the remainder from the middle outward so the default shape
    // is symmetric rather than left-heavy
    let remainder = total - base * nBins;
    const order = [...counts.keys()].sort(
      (a, b) => Math.abs(a - (nBins - 1) / 2) - Math.abs(b - (nBins - 1) / 2),
    );
    for (const idx of order) {
      if (remainder === 0) break;
      counts[idx] += 1;
      remainder -= 1;
    }
    return counts;
  }

  get nBins(): number {
    return this.counts.length;
  }

  get totalBalls(): number {
    return this.total;
  }

  ballCounts(): number[] {
    return [...this.counts];
  }

  binMidpoints(): number[] {
    return this.counts.map((_, i) => 0.5 * (this.binEdges[i] + this.binEdges[i + 1]));
  }

  /** Move one ball between bins; returns false (no-op) if the move is invalid. */
  moveBall(from: number, to: number): boolean {
    if (
      from < 0 || from >= this.nBins ||
      to < 0 || to >= this.nBins ||
      from === to ||
      this.counts[from] === 0
    ) {
      return false;
    }
    this.counts[from] -= 1;
    this.counts[to] += 1;
    return true;
  }

  /** Put every ball in one bin (the "all mass here" gesture). */
  moveAllTo(bin: number): void {
    if (bin < 0 || bin >= this.nBins) throw new Error(`no bin ${bin}`);
    this.counts.fill(0);
    this.counts[bin] = this.total;
  }

  /**
   * Change the granularity, redistributing proportionally. Conservation
   * still holds: the new counts sum to the new total exactly.
   */
  setTotalBalls(totalBalls: number): void {
    if (totalBalls < MIN_TOTAL_BALLS || totalBalls > MAX_TOTAL_BALLS) {
      throw new Error(
        `total balls must be in [${MIN_TOTAL_BALLS}, ${MAX_TOTAL_BALLS}], got ${totalBalls}`,
      );
    }
    const scaled = this.counts.map((c) => (c * totalBalls) / this.total);
    const floored = scaled.map(Math.floor);
    let leftover = totalBalls - floored.reduce((a, b) => a + b, 0);
    // largest-remainder assignment of the leftover balls
    const byRemainder = [...scaled.keys()].sort(
      (a, b) => (scaled[b] - floored[b]) - (scaled[a] - floored[a]),
    );
    for (const idx of byRemainder) {
      if (leftover === 0) break;
      floored[idx] += 1;
      leftover -= 1;
    }
    this.counts = floored;
    this.total = totalBalls;
  }

  toAllocation(): BallsAllocationDoc {
    return {
      type: 'balls',
      bin_edges: [...this.binEdges],
      balls: [...this.counts],
      total_balls: this.total,
    };
  }
}
