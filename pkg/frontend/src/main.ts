import { initApp } from './app'
import './style.css'

initApp(document.getElementById('app') as HTMLElement)
