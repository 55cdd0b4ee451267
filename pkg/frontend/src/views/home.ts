import { h } from "../dom.js";
import type { App } from "../app.js";

export async function render(ctx: App, _params: string[]): Promise<HTMLElement> {
  const home = await ctx.api.home();
  const section = h("section", {}, h("h1", {}, `Welcome, ${home.display_name}`));
  if (!home.ongoing_events.length) {
    section.append(h("p", { class: "muted" }, "No ongoing course events right now."));
  }
  for (const event of home.ongoing_events) {
    const list = h("ul", { class: "problem-list" });
    for (const problem of event.problems) {
      list.append(
        h(
          "li",
          {},
          h(
            "a",
            { href: `#/editor/${encodeURIComponent(event.event_id)}/${encodeURIComponent(problem.problem_id)}` },
            `${problem.title}`,
          ),
        ),
      );
    }
    section.append(
      h("article", { class: "event-card" },
        h("h2", {}, `${event.kind}: ${event.title}`),
        list),
    );
  }
  return section;
}
