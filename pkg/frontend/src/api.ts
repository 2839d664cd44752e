/**
 * Thin typed client for the retouching service. Every preview is computed
 * server-side; this module only moves bytes, so what the browser shows is
 * bit-identical to what the command line would produce.
 */

import type { ModelInfo, PreviewRequest } from './state'

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message)
    this.name = 'ApiError'
  }
}

async function errorOf(res: Response): Promise<string> {
  try {
    const body = await res.json()
    if (body && typeof body.error === 'string') return body.error
  } catch {
    // non-JSON error body, fall through to the status line
  }
  return `${res.status} ${res.statusText}`
}

async function okOrThrow(res: Response): Promise<Response> {
  if (!res.ok) throw new ApiError(res.status, await errorOf(res))
  return res
}

export async function fetchModels(): Promise<ModelInfo[]> {
  const res = await okOrThrow(await fetch('/api/models'))
  return res.json()
}

function multipart(image: Blob, fields: Record<string, string>): FormData {
  const form = new FormData()
  // the multipart part needs a filename; keep the upload's own if it has one
  const file =
    image instanceof File
      ? image
      : new File([image], 'upload.png', { type: image.type || 'image/png' })
  form.append('image', file)
  for (const [key, value] of Object.entries(fields)) form.append(key, value)
  return form
}

export async function retouch(image: Blob, modelId: string, alpha: string): Promise<Blob> {
  const body = multipart(image, { model_id: modelId, alpha })
  const res = await okOrThrow(await fetch('/api/retouch', { method: 'POST', body }))
  return res.blob()
}

export async function styleBlend(
  image: Blob,
  modelA: string,
  modelB: string,
  alpha: string,
): Promise<Blob> {
  const body = multipart(image, { model_a: modelA, model_b: modelB, alpha })
  const res = await okOrThrow(await fetch('/api/style_blend', { method: 'POST', body }))
  return res.blob()
}

export interface RetouchApi {
  fetchModels(): Promise<ModelInfo[]>
  retouch(image: Blob, modelId: string, alpha: string): Promise<Blob>
  styleBlend(image: Blob, modelA: string, modelB: string, alpha: string): Promise<Blob>
}

export const liveApi: RetouchApi = { fetchModels, retouch, styleBlend }

/** Route a derived preview request to the matching endpoint. */
export function sendPreview(api: RetouchApi, req: PreviewRequest): Promise<Blob> {
  if (req.kind === 'blend') return api.styleBlend(req.image, req.modelA, req.modelB, req.alpha)
  return api.retouch(req.image, req.modelId, req.alpha)
}
