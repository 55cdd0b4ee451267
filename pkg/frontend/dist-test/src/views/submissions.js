import { h } from "../dom.js";
export async function render(ctx, _params) {
    const { submissions } = await ctx.api.submissions();
    const table = h("table", { class: "submission-list" }, h("tr", {}, h("th", {}, "student"), h("th", {}, "event"), h("th", {}, "problem"), h("th", {}, "snapshot"), h("th", {}, "graded"), h("th", {}, "")));
    for (const sub of submissions) {
        table.append(h("tr", {}, h("td", {}, sub.user), h("td", {}, sub.event), h("td", {}, sub.problem), h("td", {}, `#${sub.snapshot_id}`), h("td", {}, sub.graded ? "yes" : "no"), h("td", {}, h("a", { href: `#/history/${sub.user}/${sub.event}/${sub.problem}` }, "open"))));
    }
    return h("section", {}, h("h1", {}, "Submissions"), table);
}
