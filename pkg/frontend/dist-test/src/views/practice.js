import { h } from "../dom.js";
export async function render(ctx, _params) {
    const { problems } = await ctx.api.get("/api/practice");
    const list = h("ul", { class: "problem-list" });
    for (const p of problems) {
        list.append(h("li", {}, h("a", { href: `#/editor/practice/${encodeURIComponent(p.problem_id)}` }, p.title), p.category ? h("span", { class: "tag" }, p.category) : null));
    }
    return h("section", {}, h("h1", {}, "Practice arena"), list);
}
