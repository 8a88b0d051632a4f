/** Cyclic learning-rate schedule: high-to-low ramps repeating every
 * period+1 epochs: l_i = alpha + ((n - i) mod (n + 1)) / n * (beta - alpha). */
export function cyclicLr(epoch: number, alpha: number, beta: number,
                         period: number): number {
  if (period < 1) throw new Error(`period must be >= 1, got ${period}`);
  const span = period + 1;
  const phase = (((period - epoch) % span) + span) % span; // non-negative mod
  return alpha + (phase / period) * (beta - alpha);
}
