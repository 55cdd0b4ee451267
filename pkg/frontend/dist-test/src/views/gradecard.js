import { h } from "../dom.js";
export async function render(ctx, _params) {
    const card = await ctx.api.get("/api/gradecard");
    const section = h("section", {}, h("h1", {}, "Grades"));
    const entries = Object.entries(card.grades_by_event);
    if (!entries.length)
        section.append(h("p", { class: "muted" }, "Nothing graded yet."));
    for (const [event, grades] of entries) {
        const table = h("table", { class: "grades" }, h("tr", {}, h("th", {}, "problem"), h("th", {}, "score"), h("th", {}, "remarks")));
        for (const g of grades) {
            table.append(h("tr", {}, h("td", {}, g.problem_id), h("td", {}, `${g.score} / ${g.max_score}`), h("td", {}, g.remarks ?? "")));
        }
        section.append(h("h2", {}, event), table);
    }
    return section;
}
