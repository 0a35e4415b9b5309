/** Browser entry point: wires the upload control and compare toggle to App. */

import { ApiClient } from './api';
import { App } from './app';

export function bootstrap(doc: Document, baseUrl = ''): App {
  const root = doc.getElementById('app');
  if (root === null) throw new Error('missing #app container');
  const app = new App(root as HTMLElement, new ApiClient(baseUrl));

  const upload = doc.getElementById('query-upload') as HTMLInputElement | null;
  upload?.addEventListener('change', () => {
    const file = upload.files?.[0];
    if (file) void app.submitQuery(file, undefined, file.name);
  });

  const compare = doc.getElementById('compare-toggle');
  compare?.addEventListener('click', () => void app.compareEngines());

  return app;
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap(document);
}
