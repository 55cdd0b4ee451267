import { h } from "../dom.js";
import type { App } from "../app.js";

export async function render(ctx: App, _params: string[]): Promise<HTMLElement> {
  const { problems } = await ctx.api.get<{ problems: { problem_id: string; title: string; category: string }[] }>(
    "/api/practice",
  );
  const list = h("ul", { class: "problem-list" });
  for (const p of problems) {
    list.append(
      h("li", {},
        h("a", { href: `#/editor/practice/${encodeURIComponent(p.problem_id)}` }, p.title),
        p.category ? h("span", { class: "tag" }, p.category) : null),
    );
  }
  return h("section", {}, h("h1", {}, "Practice arena"), list);
}
