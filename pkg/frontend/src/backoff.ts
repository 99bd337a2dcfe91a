// Reconnect schedule: quick first retry, capped growth. Every delay stays
// far below the 5 s resume budget.

export const RECONNECT_CAP_MS = 2000;

export function reconnectDelayMs(attempt: number): number {
  const base = 500 * Math.pow(2, Math.max(0, attempt));
  return Math.min(base, RECONNECT_CAP_MS);
}
