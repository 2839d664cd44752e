/**
 * Live-preview scheduler between the sliders and the service.
 *
 * Slider motion may call update() on every input event; the loop issues at
 * most one request per `delayMs` of motion, keeps at most one request in
 * flight, and discards any response that a newer update has superseded.
 * Once the queue drains, the preview on screen always corresponds to the
 * latest state handed in.
 */

import { debounce } from './debounce'
import { previewRequest, type PreviewRequest, type SessionState } from './state'

export type SendPreview = (req: PreviewRequest) => Promise<Blob>

export interface PreviewEvents {
  onPreview(blob: Blob, req: PreviewRequest): void
  onError(err: unknown): void
}

export class PreviewLoop {
  private queued: PreviewRequest | null = null
  private inFlight = false
  private readonly tick: (() => void) & { cancel(): void }

  constructor(
    private readonly send: SendPreview,
    private readonly events: PreviewEvents,
    delayMs = 150,
  ) {
    // pump only ever runs from the rate limiter, so consecutive sends are
    // at least delayMs apart no matter how fast updates or responses come
    this.tick = debounce(() => this.pump(), delayMs)
  }

  /** Record the latest desired preview; no-op while the state is incomplete. */
  update(state: SessionState) {
    const req = previewRequest(state)
    if (req === null) return
    this.queued = req
    this.tick()
  }

  cancel() {
    this.queued = null
    this.tick.cancel()
  }

  private pump() {
    if (this.inFlight || this.queued === null) return
    const req = this.queued
    this.queued = null
    this.inFlight = true
    this.send(req).then(
      blob => this.settle(req, blob, null),
      err => this.settle(req, null, err),
    )
  }

  private settle(req: PreviewRequest, blob: Blob | null, err: unknown) {
    this.inFlight = false
    if (this.queued !== null) {
      // a newer update superseded this exchange: drop it, reschedule
      this.tick()
      return
    }
    if (err !== null) this.events.onError(err)
    else this.events.onPreview(blob as Blob, req)
  }
}
