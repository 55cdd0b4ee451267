// Hash-routed shell. The UI is stateless beyond the session token: a full
// reload rebuilds every view from the API.

import { Api, Session, navItemsFor } from "./api.js";
import { h, clear } from "./dom.js";
import * as login from "./views/login.js";
import * as home from "./views/home.js";
import * as editor from "./views/editor.js";
import * as scratchpad from "./views/scratchpad.js";
import * as practice from "./views/practice.js";
import * as gradecard from "./views/gradecard.js";
import * as codebook from "./views/codebook.js";
import * as pager from "./views/pager.js";
import * as submissions from "./views/submissions.js";
import * as history from "./views/history.js";
import * as tasks from "./views/tasks.js";
import * as problems from "./views/problems.js";
import * as events from "./views/events.js";
import * as accounts from "./views/accounts.js";
import * as control from "./views/control.js";

export interface AppCtx {
  api: Api;
  session: Session | null;
  navigate(hash: string): void;
  refresh(): Promise<void>;
}

type View = { render(ctx: AppCtx, params: string[]): Promise<HTMLElement> | HTMLElement };

const ROUTES: Record<string, View> = {
  home,
  editor,
  scratchpad,
  practice,
  gradecard,
  codebook,
  pager,
  submissions,
  history,
  tasks,
  problems,
  events,
  accounts,
  control,
};

export class App implements AppCtx {
  api = new Api();
  session: Session | null = null;
  private outlet: HTMLElement;
  private nav: HTMLElement;

  constructor(root: HTMLElement) {
    this.nav = h("nav", { class: "topnav" });
    this.outlet = h("main", { class: "outlet" });
    root.append(this.nav, this.outlet);
    window.addEventListener("hashchange", () => void this.refresh());
  }

  navigate(hash: string) {
    if (location.hash === hash) void this.refresh();
    else location.hash = hash;
  }

  async start() {
    const saved = sessionStorage.getItem("token");
    if (saved) {
      this.api.token = saved;
      try {
        const me = await this.api.me();
        this.session = { token: saved, ...me } as Session;
      } catch {
        this.api.token = null;
        sessionStorage.removeItem("token");
      }
    }
    await this.refresh();
  }

  setSession(session: Session | null) {
    this.session = session;
    if (session) sessionStorage.setItem("token", session.token);
    else sessionStorage.removeItem("token");
  }

  private generation = 0;

  async refresh(): Promise<void> {
    // concurrent refreshes (hashchange racing a manual call) must not both
    // land: only the newest render owns the outlet
    const generation = ++this.generation;
    this.renderNav();
    const [name, ...params] = (location.hash.replace(/^#\//, "") || "home").split("/");
    let rendered: HTMLElement;
    if (!this.session) {
      rendered = await login.render(this, []);
    } else {
      const view = ROUTES[name] ?? home;
      try {
        rendered = await view.render(this, params.map(decodeURIComponent));
      } catch (err: any) {
        if (err?.status === 401) {
          this.setSession(null);
          rendered = await login.render(this, []);
        } else {
          rendered = h("p", { class: "error" }, `Error: ${err?.message ?? err}`);
        }
      }
    }
    if (generation !== this.generation) return; // superseded by a newer render
    clear(this.outlet);
    this.outlet.append(rendered);
  }

  private renderNav() {
    clear(this.nav);
    if (!this.session) return;
    for (const item of navItemsFor(this.session.role)) {
      this.nav.append(h("a", { href: item.hash, class: "navlink" }, item.label));
    }
    this.nav.append(
      h("span", { class: "spacer" }),
      h("span", { class: "who" }, `${this.session.display_name} (${this.session.role})`),
      h(
        "button",
        {
          class: "linkish",
          onclick: async () => {
            try {
              await this.api.logout();
            } finally {
              this.setSession(null);
              this.navigate("#/home");
            }
          },
        },
        "Log out",
      ),
    );
  }
}

export function mount(root: HTMLElement): App {
  const app = new App(root);
  void app.start();
  return app;
}
