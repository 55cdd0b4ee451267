// jsdom bootstrap: installs browser globals before app modules run.
import { JSDOM } from "jsdom";
export function installDom(url = "http://localhost/#/home") {
    const dom = new JSDOM(`<!doctype html><html><body><div id="app"></div></body></html>`, { url });
    const g = globalThis;
    g.window = dom.window;
    g.document = dom.window.document;
    g.sessionStorage = dom.window.sessionStorage;
    g.location = dom.window.location;
    g.HTMLElement = dom.window.HTMLElement;
    g.confirm = () => true;
    g.prompt = () => null;
    dom.window.confirm = () => true;
    dom.window.prompt = () => null;
    return dom;
}
export function flush(ms = 0) {
    return new Promise((resolve) => setTimeout(resolve, ms));
}
