/**
 * Debounce with a cap on total delay. The wrapped function runs with the
 * latest arguments once calls go quiet for `delayMs`, but a burst of
 * continuous calls cannot postpone it past `maxWaitMs` after the burst's
 * first call. With maxWaitMs == delayMs this acts as a trailing rate
 * limiter: at most one run per delayMs, and consecutive runs are always
 * at least delayMs apart. Used to pace slider-driven preview requests.
 */
// eslint-disable-next-line @typescript-eslint/no-explicit-any
export function debounce<T extends (...args: any[]) => void>(
  fn: T,
  delayMs: number,
  maxWaitMs: number = delayMs,
): T & { cancel(): void } {
  let quietTimer: ReturnType<typeof setTimeout> | null = null
  let capTimer: ReturnType<typeof setTimeout> | null = null
  let lastArgs: Parameters<T> | null = null

  const clear = () => {
    if (quietTimer !== null) clearTimeout(quietTimer)
    if (capTimer !== null) clearTimeout(capTimer)
    quietTimer = null
    capTimer = null
  }

  const fire = () => {
    const args = lastArgs
    lastArgs = null
    clear()
    if (args !== null) fn(...args)
  }

  const debounced = ((...args: Parameters<T>) => {
    lastArgs = args
    if (quietTimer !== null) clearTimeout(quietTimer)
    quietTimer = setTimeout(fire, delayMs)
    // the cap is armed by the first call of a burst and never pushed back
    if (capTimer === null) capTimer = setTimeout(fire, maxWaitMs)
  }) as T & { cancel(): void }

  debounced.cancel = () => {
    lastArgs = null
    clear()
  }

  return debounced
}
