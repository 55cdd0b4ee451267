import { h, clear } from "../dom.js";
import type { App } from "../app.js";

export async function render(ctx: App, _params: string[]): Promise<HTMLElement> {
  const { entries } = await ctx.api.get<{ entries: any[] }>("/api/codebook");
  const detail = h("div", { class: "codebook-detail" });
  const list = h("ul", { class: "problem-list" });
  for (const entry of entries) {
    list.append(
      h("li", {},
        h("a", {
          href: "#/codebook",
          onclick: async (ev: Event) => {
            ev.preventDefault();
            const page = await ctx.api.get<any>(
              `/api/codebook/entry?event=${encodeURIComponent(entry.event_id)}&problem=${encodeURIComponent(entry.problem_id)}`,
            );
            clear(detail);
            detail.append(
              h("h2", {}, page.title),
              h("pre", { class: "statement-text" }, page.statement),
              page.grade
                ? h("p", { class: "grade" }, `Grade: ${page.grade.score} / ${page.grade.max_score}`)
                : h("p", { class: "muted" }, entry.kind === "event" ? "Not graded yet." : "Practice work."),
              h("pre", { class: "code-pane" }, page.code),
            );
          },
        }, `${entry.problem_id} (${entry.kind === "event" ? entry.event_id : "practice"})`),
        entry.graded ? h("span", { class: "tag" }, "graded") : null),
    );
  }
  return h("section", { class: "codebook" }, h("h1", {}, "Codebook"), list, detail);
}
