/// <reference types="vitest/config" />
import { defineConfig } from 'vite'

// Dev-server proxy points API calls at a locally running service; the
// production build is served by that same service as static files, so
// requests stay same-origin in both setups.
export default defineConfig({
  server: {
    proxy: {
      '/api': 'http://127.0.0.1:8000',
      '/healthz': 'http://127.0.0.1:8000',
    },
  },
  test: {
    environment: 'happy-dom',
  },
})
