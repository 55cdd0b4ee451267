// jsdom bootstrap: installs browser globals before app modules run.
import { JSDOM } from "jsdom";

export function installDom(url = "http://localhost/#/home"): JSDOM {
  const dom = new JSDOM(`<!doctype html><html><body><div id="app"></div></body></html>`, { url });
  const g = globalThis as any;
  g.window = dom.window;
  g.document = dom.window.document;
  g.sessionStorage = dom.window.sessionStorage;
  g.location = dom.window.location;
  g.HTMLElement = dom.window.HTMLElement;
  g.confirm = () => true;
  g.prompt = () => null;
  (dom.window as any).confirm = () => true;
  (dom.window as any).prompt = () => null;
  return dom;
}

export function flush(ms = 0): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
