import { ApiClient } from './api.js';
import { App } from './app.js';

const root = document.getElementById('app');
if (!root) throw new Error('missing #app container');

// Same-origin by default; point at another host with ?api=http://host:port/api
const params = new URLSearchParams(window.location.search);
const base = params.get('api') ?? '/api';
new App(root, new ApiClient(base));
