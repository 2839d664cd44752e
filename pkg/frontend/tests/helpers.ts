import type { RetouchApi } from '../src/api'
import type { ModelInfo } from '../src/state'

export const TWO_MODELS: ModelInfo[] = [
  { id: 'sunset', style: 'sunset', parameter_count: 36489, path: '/models/sunset.ckpt' },
  { id: 'film', style: 'film', parameter_count: 36489, path: '/models/film.ckpt' },
]

export interface RecordedCall {
  endpoint: 'retouch' | 'style_blend'
  alpha: string
  at: number
  blob: Blob
  fields: Record<string, string>
}

/** Service stub that tags each response blob with the request it answers. */
export function mockApi(models: ModelInfo[] = TWO_MODELS) {
  const calls: RecordedCall[] = []
  const api: RetouchApi = {
    fetchModels: async () => models,
    retouch: async (_image, modelId, alpha) => {
      const blob = new Blob([`retouch:${modelId}:${alpha}`])
      calls.push({ endpoint: 'retouch', alpha, at: Date.now(), blob, fields: { model_id: modelId } })
      return blob
    },
    styleBlend: async (_image, modelA, modelB, alpha) => {
      const blob = new Blob([`blend:${modelA}:${modelB}:${alpha}`])
      calls.push({
        endpoint: 'style_blend',
        alpha,
        at: Date.now(),
        blob,
        fields: { model_a: modelA, model_b: modelB },
      })
      return blob
    },
  }
  return { api, calls }
}

/**
 * Replace object-URL creation with a deterministic counter and return the
 * url -> blob map so tests can tell which response a pane is showing.
 */
export function stubObjectUrls(): Map<string, Blob> {
  const urlToBlob = new Map<string, Blob>()
  let n = 0
  const patched = URL as unknown as {
    createObjectURL(blob: Blob): string
    revokeObjectURL(url: string): void
  }
  patched.createObjectURL = blob => {
    const url = `blob:preview-${++n}`
    urlToBlob.set(url, blob)
    return url
  }
  patched.revokeObjectURL = () => {}
  return urlToBlob
}

export function chooseFile(input: HTMLInputElement, file: File) {
  Object.defineProperty(input, 'files', { value: [file], configurable: true })
  input.dispatchEvent(new Event('change', { bubbles: true }))
}

export function setSlider(input: HTMLInputElement, value: number | string) {
  input.value = String(value)
  input.dispatchEvent(new Event('input', { bubbles: true }))
}

export function query<T extends Element>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector)
  if (node === null) throw new Error(`missing element ${selector}`)
  return node as T
}
