/** Trailing-edge debouncer: at most one scheduled call per quiet window. */
export class Debouncer {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(private readonly delayMs: number) {}

  schedule(fn: () => void): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      fn();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}

/**
 * Last-write-wins bookkeeping for in-flight requests: responses belonging
 * to anything but the newest issued request are discarded, so a slow early
 * response can never overwrite a fresh one.
 */
export class SequenceGate {
  private issued = 0;
  private rendered = 0;

  next(): number {
    return ++this.issued;
  }

  admit(sequence: number): boolean {
    if (sequence <= this.rendered) {
      return false;
    }
    this.rendered = sequence;
    return true;
  }
}
