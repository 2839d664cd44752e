/**
 * Single-session UI state and the service request it implies.
 *
 * Alphas are held clamped to [0, 1] and cross the wire as fixed
 * three-decimal strings, so the value the user sees is exactly the value
 * the service parses. Strength alpha 1 keeps the original, 0 applies the
 * full retouch; blend alpha 1 weighs style A fully, 0 weighs style B.
 */

export interface ModelInfo {
  id: string
  style: string
  parameter_count: number
  path: string
}

export interface SessionState {
  image: Blob | null
  modelA: string | null
  modelB: string | null
  strengthAlpha: number
  blendAlpha: number
}

export function freshSession(): SessionState {
  return { image: null, modelA: null, modelB: null, strengthAlpha: 0, blendAlpha: 0.5 }
}

export function clampAlpha(value: number): number {
  if (!Number.isFinite(value)) return 0
  return Math.min(1, Math.max(0, value))
}

export function formatAlpha(value: number): string {
  return clampAlpha(value).toFixed(3)
}

export type PreviewRequest =
  | { kind: 'retouch'; image: Blob; modelId: string; alpha: string }
  | { kind: 'blend'; image: Blob; modelA: string; modelB: string; alpha: string }

/**
 * Derive the service call implied by the current state, or null while no
 * preview is possible (nothing uploaded yet, or no style picked). A second
 * selected style switches the session from strength control to style
 * blending.
 */
export function previewRequest(state: SessionState): PreviewRequest | null {
  if (state.image === null || state.modelA === null) return null
  if (state.modelB !== null) {
    return {
      kind: 'blend',
      image: state.image,
      modelA: state.modelA,
      modelB: state.modelB,
      alpha: formatAlpha(state.blendAlpha),
    }
  }
  return {
    kind: 'retouch',
    image: state.image,
    modelId: state.modelA,
    alpha: formatAlpha(state.strengthAlpha),
  }
}
