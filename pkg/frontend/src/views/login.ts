import { h } from "../dom.js";
import type { App } from "../app.js";

export function render(ctx: App, _params: string[]): HTMLElement {
  const status = h("p", { class: "status" });
  const form = h(
    "form",
    {
      class: "login-form",
      onsubmit: async (ev: Event) => {
        ev.preventDefault();
        const login = (form.querySelector('[name="login"]') as HTMLInputElement).value;
        const credential = (form.querySelector('[name="credential"]') as HTMLInputElement).value;
        try {
          const session = await ctx.api.login(login, credential);
          ctx.setSession(session);
          ctx.navigate("#/home");
        } catch (err: any) {
          status.textContent = err.status === 401 ? "Invalid credentials." : `Login failed: ${err.message}`;
        }
      },
    },
    h("h1", {}, "Sign in"),
    h("label", {}, "Login", h("input", { name: "login", autofocus: true })),
    h("label", {}, "Password", h("input", { name: "credential", type: "password" })),
    h("button", { type: "submit" }, "Sign in"),
    status,
  );
  return h("section", { class: "login" }, form);
}
