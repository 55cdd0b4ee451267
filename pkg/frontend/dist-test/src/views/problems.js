import { h } from "../dom.js";
export async function render(ctx, _params) {
    const { problems } = await ctx.api.get("/api/problems");
    const status = h("span", { class: "status" });
    const title = h("input", { placeholder: "title" });
    const category = h("input", { placeholder: "category" });
    const createForm = h("form", {
        onsubmit: async (ev) => {
            ev.preventDefault();
            try {
                await ctx.api.post("/api/problems", { title: title.value, category: category.value });
                ctx.navigate("#/problems");
            }
            catch (err) {
                status.textContent = err.message;
            }
        },
    }, title, category, h("button", { type: "submit" }, "Create problem"), status);
    const table = h("table", { class: "grades" }, h("tr", {}, h("th", {}, "id"), h("th", {}, "title"), h("th", {}, "category"), h("th", {}, "practice"), h("th", {}, "")));
    for (const p of problems) {
        table.append(h("tr", {}, h("td", {}, p.problem_id), h("td", {}, p.title), h("td", {}, p.category ?? ""), h("td", {}, p.practice ? "yes" : "no"), h("td", {}, h("button", {
            class: "linkish",
            onclick: async () => {
                await ctx.api.post(`/api/problems/${p.problem_id}/practice`, { practice: !p.practice });
                ctx.navigate("#/problems");
            },
        }, p.practice ? "unmark practice" : "mark practice"), h("button", {
            class: "linkish",
            onclick: async () => {
                const statement = window.prompt("New statement:", p.statement ?? "");
                if (statement != null) {
                    await ctx.api.put(`/api/problems/${p.problem_id}`, { statement });
                    ctx.navigate("#/problems");
                }
            },
        }, "edit statement"))));
    }
    return h("section", {}, h("h1", {}, "Problems"), createForm, table);
}
