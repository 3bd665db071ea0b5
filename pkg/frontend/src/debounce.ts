// Debounced triggering with latest-wins response handling: edits fire many
// validate/expand requests, but only the newest response may touch the UI.

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}

export class LatestWins {
  private seq = 0;

  /** Run `work`; `apply` fires only if no newer call started meanwhile. */
  async run<T>(work: () => Promise<T>, apply: (result: T) => void, onError?: (err: unknown) => void): Promise<void> {
    const ticket = ++this.seq;
    try {
      const result = await work();
      if (ticket === this.seq) apply(result);
    } catch (err) {
      if (ticket === this.seq && onError) onError(err);
    }
  }
}
