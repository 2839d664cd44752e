import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest'
import { debounce } from '../src/debounce'

beforeEach(() => {
  vi.useFakeTimers()
})

afterEach(() => {
  vi.useRealTimers()
})

describe('debounce', () => {
  it('runs once with the latest arguments after the quiet period', () => {
    const fn = vi.fn()
    const d = debounce(fn, 150)
    d(1)
    d(2)
    d(3)
    vi.advanceTimersByTime(149)
    expect(fn).not.toHaveBeenCalled()
    vi.advanceTimersByTime(1)
    expect(fn).toHaveBeenCalledTimes(1)
    expect(fn).toHaveBeenCalledWith(3)
  })

  it('keeps firing during a continuous burst instead of stalling', () => {
    const fn = vi.fn()
    const d = debounce(fn, 150)
    // calls every 16 ms never leave a 150 ms quiet gap; only the cap fires
    for (let i = 0; i < 40; i++) {
      d(i)
      vi.advanceTimersByTime(16)
    }
    expect(fn.mock.calls.length).toBeGreaterThanOrEqual(3)
  })

  it('spaces consecutive runs at least delayMs apart', () => {
    const stamps: number[] = []
    const d = debounce(() => stamps.push(Date.now()), 150)
    for (let i = 0; i < 80; i++) {
      d()
      vi.advanceTimersByTime(16)
    }
    vi.advanceTimersByTime(500)
    expect(stamps.length).toBeGreaterThanOrEqual(2)
    for (let i = 1; i < stamps.length; i++) {
      expect(stamps[i] - stamps[i - 1]).toBeGreaterThanOrEqual(150)
    }
  })

  it('delivers the last value of a burst eventually', () => {
    const seen: number[] = []
    const d = debounce((v: number) => seen.push(v), 150)
    for (let i = 0; i < 30; i++) {
      d(i)
      vi.advanceTimersByTime(16)
    }
    vi.advanceTimersByTime(500)
    expect(seen[seen.length - 1]).toBe(29)
  })

  it('fires separately for calls far apart', () => {
    const fn = vi.fn()
    const d = debounce(fn, 150)
    d('a')
    vi.advanceTimersByTime(200)
    d('b')
    vi.advanceTimersByTime(200)
    expect(fn.mock.calls).toEqual([['a'], ['b']])
  })

  it('cancel drops the pending run', () => {
    const fn = vi.fn()
    const d = debounce(fn, 150)
    d(1)
    d.cancel()
    vi.advanceTimersByTime(1000)
    expect(fn).not.toHaveBeenCalled()
  })
})
