/**
 * Before/after wipe view. Both images fill the same box, pixel-aligned,
 * and a draggable divider clips the retouched pane so everything left of
 * the handle shows the original upload. Swapping in a new preview leaves
 * the divider where the user put it.
 */

export function fractionFromPointer(
  rect: { left: number; width: number },
  clientX: number,
): number {
  if (rect.width <= 0) return 0.5
  return Math.min(1, Math.max(0, (clientX - rect.left) / rect.width))
}

function swapSrc(img: HTMLImageElement, url: string) {
  const old = img.src
  img.src = url
  if (old && old.startsWith('blob:') && typeof URL.revokeObjectURL === 'function') {
    URL.revokeObjectURL(old)
  }
}

export class CompareView {
  readonly root: HTMLElement
  private readonly before: HTMLImageElement
  private readonly after: HTMLImageElement
  private readonly handle: HTMLElement
  private split = 0.5
  private dragging = false

  constructor(doc: Document = document) {
    this.root = doc.createElement('div')
    this.root.className = 'compare'
    this.before = doc.createElement('img')
    this.before.className = 'compare-pane'
    this.before.alt = 'original'
    this.after = doc.createElement('img')
    this.after.className = 'compare-pane'
    this.after.alt = 'retouched'
    this.handle = doc.createElement('div')
    this.handle.className = 'compare-handle'
    this.root.append(this.before, this.after, this.handle)
    this.setFraction(0.5)

    this.root.addEventListener('pointerdown', ev => {
      this.dragging = true
      const pointerId = (ev as PointerEvent).pointerId
      if (pointerId !== undefined && typeof this.root.setPointerCapture === 'function') {
        try {
          this.root.setPointerCapture(pointerId)
        } catch {
          // pointer capture is cosmetic; fine without it
        }
      }
      this.moveTo(ev.clientX)
    })
    this.root.addEventListener('pointermove', ev => {
      if (this.dragging) this.moveTo(ev.clientX)
    })
    const stop = () => {
      this.dragging = false
    }
    this.root.addEventListener('pointerup', stop)
    this.root.addEventListener('pointercancel', stop)
  }

  private moveTo(clientX: number) {
    this.setFraction(fractionFromPointer(this.root.getBoundingClientRect(), clientX))
  }

  /** Divider position: 0 shows only the retouch, 1 only the original. */
  setFraction(split: number) {
    this.split = Math.min(1, Math.max(0, split))
    const pct = (this.split * 100).toFixed(2)
    this.after.style.clipPath = `inset(0 0 0 ${pct}%)`
    this.handle.style.left = `${pct}%`
  }

  get fraction(): number {
    return this.split
  }

  setOriginal(url: string) {
    swapSrc(this.before, url)
  }

  setPreview(url: string) {
    swapSrc(this.after, url)
  }
}
