/**
 * Application shell: control panel on the left, before/after stage on the
 * right. Builds its own DOM so the whole app can run against a test
 * document with a stubbed service client.
 */

import { ApiError, liveApi, sendPreview, type RetouchApi } from './api'
import { CompareView } from './compare'
import { PreviewLoop } from './preview'
import {
  clampAlpha,
  formatAlpha,
  freshSession,
  type ModelInfo,
  type SessionState,
} from './state'

const NO_SECOND_STYLE = ''

export interface App {
  root: HTMLElement
  state: SessionState
  compare: CompareView
  loop: PreviewLoop
  /** resolves once the model list request settled, either way */
  ready: Promise<void>
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag)
  if (className) node.className = className
  if (text) node.textContent = text
  return node
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return err.message
  return 'cannot reach the retouching service'
}

function modelLabel(model: ModelInfo): string {
  return `${model.id} (${model.parameter_count.toLocaleString('en-US')} parameters)`
}

export function initApp(root: HTMLElement, api: RetouchApi = liveApi, delayMs = 150): App {
  const doc = root.ownerDocument
  const state: SessionState = freshSession()

  const banner = el(doc, 'div', 'banner')
  banner.id = 'banner'
  banner.hidden = true

  const notice = el(doc, 'p', 'notice', 'No styles available. Add checkpoints to the service model directory and restart.')
  notice.id = 'notice'
  notice.hidden = true

  const upload = el(doc, 'input')
  upload.id = 'upload'
  upload.type = 'file'
  upload.accept = 'image/*'

  const modelA = el(doc, 'select')
  modelA.id = 'model-a'
  const modelB = el(doc, 'select')
  modelB.id = 'model-b'

  const strength = el(doc, 'input')
  strength.id = 'strength'
  strength.type = 'range'
  strength.min = '0'
  strength.max = '1'
  strength.step = '0.001'
  strength.value = String(state.strengthAlpha)
  const strengthValue = el(doc, 'output', 'alpha-value', formatAlpha(state.strengthAlpha))
  strengthValue.id = 'strength-value'

  const blend = el(doc, 'input')
  blend.id = 'blend'
  blend.type = 'range'
  blend.min = '0'
  blend.max = '1'
  blend.step = '0.001'
  blend.value = String(state.blendAlpha)
  const blendValue = el(doc, 'output', 'alpha-value', formatAlpha(state.blendAlpha))
  blendValue.id = 'blend-value'

  const placeholder = el(doc, 'p', 'placeholder', 'Upload a photo to begin.')
  placeholder.id = 'placeholder'

  const compare = new CompareView(doc)
  compare.root.hidden = true

  const controls = el(doc, 'aside', 'controls')
  const uploadField = el(doc, 'label', 'field', 'Photo ')
  uploadField.append(upload)
  const fieldA = el(doc, 'label', 'field', 'Style ')
  fieldA.append(modelA)
  const fieldB = el(doc, 'label', 'field', 'Blend with ')
  fieldB.append(modelB)
  const strengthField = el(doc, 'label', 'field', 'Strength (1 keeps the original, 0 is the full retouch) ')
  strengthField.append(strength, strengthValue)
  const blendField = el(doc, 'label', 'field', 'Style blend (1 is the first style, 0 is the second) ')
  blendField.append(blend, blendValue)
  controls.append(uploadField, fieldA, fieldB, notice, strengthField, blendField)

  const stage = el(doc, 'section', 'stage')
  stage.append(placeholder, compare.root)

  const header = el(doc, 'header')
  header.append(el(doc, 'h1', '', 'Interactive retouching'), banner)
  const main = el(doc, 'main')
  main.append(controls, stage)
  root.append(header, main)

  const showBanner = (text: string) => {
    banner.textContent = text
    banner.hidden = false
  }
  const hideBanner = () => {
    banner.hidden = true
  }

  const syncControls = () => {
    const blending = state.modelB !== null
    strength.disabled = state.modelA === null || blending
    blend.disabled = !blending
  }

  const loop = new PreviewLoop(
    req => sendPreview(api, req),
    {
      onPreview: blob => {
        hideBanner()
        compare.setPreview(URL.createObjectURL(blob))
        compare.root.hidden = false
        placeholder.hidden = true
      },
      onError: err => showBanner(describeError(err)),
    },
    delayMs,
  )

  upload.addEventListener('change', () => {
    const file = upload.files && upload.files[0]
    if (!file) return
    state.image = file
    compare.setOriginal(URL.createObjectURL(file))
    compare.root.hidden = false
    placeholder.hidden = true
    loop.update(state)
  })

  modelA.addEventListener('change', () => {
    state.modelA = modelA.value || null
    syncControls()
    loop.update(state)
  })

  modelB.addEventListener('change', () => {
    state.modelB = modelB.value === NO_SECOND_STYLE ? null : modelB.value
    syncControls()
    loop.update(state)
  })

  strength.addEventListener('input', () => {
    state.strengthAlpha = clampAlpha(parseFloat(strength.value))
    strengthValue.textContent = formatAlpha(state.strengthAlpha)
    loop.update(state)
  })

  blend.addEventListener('input', () => {
    state.blendAlpha = clampAlpha(parseFloat(blend.value))
    blendValue.textContent = formatAlpha(state.blendAlpha)
    loop.update(state)
  })

  const renderModels = (models: ModelInfo[]) => {
    if (models.length === 0) {
      modelA.disabled = true
      modelB.disabled = true
      notice.hidden = false
      syncControls()
      return
    }
    for (const model of models) {
      const option = el(doc, 'option', '', modelLabel(model))
      option.value = model.id
      modelA.append(option)
    }
    const none = el(doc, 'option', '', 'none (single style)')
    none.value = NO_SECOND_STYLE
    modelB.append(none)
    for (const model of models) {
      const option = el(doc, 'option', '', modelLabel(model))
      option.value = model.id
      modelB.append(option)
    }
    state.modelA = models[0].id
    modelA.value = state.modelA
    modelB.value = NO_SECOND_STYLE
    syncControls()
    // covers a photo chosen before the registry answered
    loop.update(state)
  }

  syncControls()
  const ready = api.fetchModels().then(renderModels, err => {
    modelA.disabled = true
    modelB.disabled = true
    syncControls()
    showBanner(describeError(err))
  })

  return { root, state, compare, loop, ready }
}
