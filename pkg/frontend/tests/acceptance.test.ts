import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest'
import { initApp } from '../src/app'
import { formatAlpha } from '../src/state'
import { chooseFile, mockApi, query, setSlider, stubObjectUrls } from './helpers'

let root: HTMLElement
let urls: Map<string, Blob>

beforeEach(() => {
  vi.useFakeTimers()
  document.body.innerHTML = '<div id="app"></div>'
  root = document.getElementById('app') as HTMLElement
  urls = stubObjectUrls()
})

afterEach(() => {
  vi.useRealTimers()
})

async function appWithPhoto() {
  const { api, calls } = mockApi()
  const app = initApp(root, api)
  await app.ready
  chooseFile(query(root, '#upload'), new File(['pixels'], 'photo.png', { type: 'image/png' }))
  await vi.advanceTimersByTimeAsync(400)
  calls.length = 0
  return { app, calls }
}

describe('a12 ui loop', () => {
  it('a12 slider scrub issues at most one request per 150 ms and lands on the final value', async () => {
    const { calls } = await appWithPhoto()
    const strength = query<HTMLInputElement>(root, '#strength')

    const moves = 60
    const stepMs = 16
    for (let i = 1; i <= moves; i++) {
      setSlider(strength, (i / moves).toFixed(3))
      await vi.advanceTimersByTimeAsync(stepMs)
    }
    const scrubMs = moves * stepMs
    await vi.advanceTimersByTimeAsync(600)

    // live during the scrub, but never more than one request per 150 ms
    expect(calls.length).toBeGreaterThanOrEqual(2)
    expect(calls.length).toBeLessThanOrEqual(Math.ceil(scrubMs / 150))
    for (let i = 1; i < calls.length; i++) {
      expect(calls[i].at - calls[i - 1].at).toBeGreaterThanOrEqual(150)
    }

    // the request queue drained on the final slider value
    const last = calls[calls.length - 1]
    expect(last.alpha).toBe('1.000')
    expect(query(root, '#strength-value').textContent).toBe('1.000')

    // and the pane shows the response to that final request
    const after = root.querySelectorAll('img')[1]
    expect(urls.get(after.getAttribute('src') as string)).toBe(last.blob)
  })

  it('a12 strength endpoints request the original and the full retouch', async () => {
    const { calls } = await appWithPhoto()
    const strength = query<HTMLInputElement>(root, '#strength')

    setSlider(strength, 1)
    await vi.advanceTimersByTimeAsync(400)
    let last = calls[calls.length - 1]
    // alpha 1.000 asks the service for the untouched original
    expect(last.endpoint).toBe('retouch')
    expect(last.alpha).toBe(formatAlpha(1))

    setSlider(strength, 0)
    await vi.advanceTimersByTimeAsync(400)
    last = calls[calls.length - 1]
    // alpha 0.000 asks for the full retouch
    expect(last.alpha).toBe(formatAlpha(0))
    const after = root.querySelectorAll('img')[1]
    expect(urls.get(after.getAttribute('src') as string)).toBe(last.blob)
  })

  it('a12 superseded scrub responses never overwrite the final preview', async () => {
    const { api, calls } = mockApi()
    // answers arrive out of order: the first request resolves last
    const pending: Array<() => void> = []
    const slowOnce = api.retouch
    let delayFirst = true
    api.retouch = (image, modelId, alpha) => {
      const result = slowOnce(image, modelId, alpha)
      if (delayFirst) {
        delayFirst = false
        return new Promise(resolve => {
          pending.push(() => resolve(result))
        })
      }
      return result
    }
    const app = initApp(root, api)
    await app.ready
    chooseFile(query(root, '#upload'), new File(['pixels'], 'photo.png', { type: 'image/png' }))
    await vi.advanceTimersByTimeAsync(200)
    expect(calls).toHaveLength(1)

    // scrub while the first answer hangs
    setSlider(query(root, '#strength'), 0.9)
    await vi.advanceTimersByTimeAsync(600)
    pending[0]()
    await vi.advanceTimersByTimeAsync(600)

    const after = root.querySelectorAll('img')[1]
    const shown = urls.get(after.getAttribute('src') as string)
    const last = calls[calls.length - 1]
    expect(last.alpha).toBe('0.900')
    expect(shown).toBe(last.blob)
  })
})
