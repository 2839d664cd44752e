import { describe, expect, it } from 'vitest'
import {
  clampAlpha,
  formatAlpha,
  freshSession,
  previewRequest,
  type SessionState,
} from '../src/state'

// small deterministic generator so the round-trip check covers many alphas
function* lcg(seed: number, n: number) {
  let x = seed >>> 0
  for (let i = 0; i < n; i++) {
    x = (1664525 * x + 1013904223) >>> 0
    yield x / 2 ** 32
  }
}

function withImage(overrides: Partial<SessionState> = {}): SessionState {
  return { ...freshSession(), image: new Blob(['img']), modelA: 'sunset', ...overrides }
}

describe('clampAlpha', () => {
  it('clamps into [0, 1]', () => {
    expect(clampAlpha(-0.25)).toBe(0)
    expect(clampAlpha(1.75)).toBe(1)
    expect(clampAlpha(0.42)).toBe(0.42)
    expect(clampAlpha(0)).toBe(0)
    expect(clampAlpha(1)).toBe(1)
  })

  it('maps non-finite input to 0', () => {
    expect(clampAlpha(NaN)).toBe(0)
    expect(clampAlpha(Infinity)).toBe(0)
    expect(clampAlpha(-Infinity)).toBe(0)
  })
})

describe('formatAlpha', () => {
  it('prints exactly three decimals', () => {
    expect(formatAlpha(0)).toBe('0.000')
    expect(formatAlpha(1)).toBe('1.000')
    expect(formatAlpha(0.5)).toBe('0.500')
    expect(formatAlpha(0.1234)).toBe('0.123')
  })

  it('round-trips through parsing unchanged to three decimals', () => {
    for (const r of lcg(7, 200)) {
      const wire = formatAlpha(r)
      expect(parseFloat(wire).toFixed(3)).toBe(wire)
    }
  })
})

describe('previewRequest', () => {
  it('is null until an image is uploaded', () => {
    expect(previewRequest(freshSession())).toBeNull()
    expect(previewRequest({ ...freshSession(), modelA: 'sunset' })).toBeNull()
  })

  it('is null until a style is picked', () => {
    expect(previewRequest({ ...freshSession(), image: new Blob(['img']) })).toBeNull()
  })

  it('maps a single style to a retouch call carrying the strength alpha', () => {
    const req = previewRequest(withImage({ strengthAlpha: 0.25 }))
    expect(req).toMatchObject({ kind: 'retouch', modelId: 'sunset', alpha: '0.250' })
  })

  it('maps a second style to a blend call carrying the blend alpha', () => {
    const req = previewRequest(withImage({ modelB: 'film', blendAlpha: 0.8, strengthAlpha: 0.1 }))
    expect(req).toMatchObject({
      kind: 'blend',
      modelA: 'sunset',
      modelB: 'film',
      alpha: '0.800',
    })
  })

  it('formats wire alphas to three decimals after clamping', () => {
    expect(previewRequest(withImage({ strengthAlpha: 2 }))?.alpha).toBe('1.000')
    expect(previewRequest(withImage({ strengthAlpha: -1 }))?.alpha).toBe('0.000')
    expect(previewRequest(withImage({ strengthAlpha: 0.33333 }))?.alpha).toBe('0.333')
  })

  it('carries the uploaded image through unchanged', () => {
    const state = withImage()
    const req = previewRequest(state)
    expect(req?.image).toBe(state.image)
  })
})
