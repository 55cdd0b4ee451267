import { h } from "../dom.js";
function taskList(title, tasks) {
    const list = h("ul", { class: "task-list" });
    for (const task of tasks) {
        const [user, event, problem] = task.assignment_key.split("/");
        list.append(h("li", {}, h("a", { href: `#/history/${user}/${event}/${problem}` }, task.assignment_key), task.done ? h("span", { class: "tag" }, "done") : null));
    }
    return h("div", {}, h("h2", {}, `${title} (${tasks.length})`), list);
}
export async function render(ctx, _params) {
    const personal = await ctx.api.get("/api/tasks");
    const overall = await ctx.api.get("/api/tasks/overall");
    const section = h("section", {}, h("h1", {}, "Grading tasks"), taskList("My pending", personal.pending), taskList("My complete", personal.complete));
    const table = h("table", { class: "grades" }, h("tr", {}, h("th", {}, "grader"), h("th", {}, "event"), h("th", {}, "pending"), h("th", {}, "complete")));
    for (const [grader, events] of Object.entries(overall.by_grader)) {
        for (const [event, split] of Object.entries(events)) {
            table.append(h("tr", {}, h("td", {}, grader), h("td", {}, event), h("td", {}, String(split.pending.length)), h("td", {}, String(split.complete.length))));
        }
    }
    section.append(h("h2", {}, "Overall"), table);
    return section;
}
