// Paced replay of server event lists.
//
// OnePerSecond spends one full tick per item, so the nth item lands at
// n seconds and a five-item list finishes at the five second mark.
// Instant renders the whole list in one pass with zero artificial delay.
// Replay is a pure function of (items, speed): the callback sees the same
// items in the same order either way, so the final rendered state cannot
// depend on pacing.

export type AnimationSpeed = "OnePerSecond" | "Instant";

export const TICK_MS = 1000;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export async function replay<T>(
  items: readonly T[],
  speed: AnimationSpeed,
  onItem: (item: T, index: number) => void,
): Promise<void> {
  if (speed === "Instant") {
    for (let i = 0; i < items.length; i++) {
      onItem(items[i], i);
    }
    return;
  }
  for (let i = 0; i < items.length; i++) {
    await sleep(TICK_MS);
    onItem(items[i], i);
  }
}
