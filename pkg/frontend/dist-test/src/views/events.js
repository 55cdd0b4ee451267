import { h } from "../dom.js";
export async function render(ctx, _params) {
    const { events } = await ctx.api.get("/api/events");
    const status = h("span", { class: "status" });
    const title = h("input", { placeholder: "title" });
    const kind = h("select", {}, h("option", { value: "LAB" }, "LAB"), h("option", { value: "EXAM" }, "EXAM"), h("option", { value: "QUIZ" }, "QUIZ"));
    const createForm = h("form", {
        onsubmit: async (ev) => {
            ev.preventDefault();
            try {
                await ctx.api.post("/api/events", { kind: kind.value, title: title.value });
                ctx.navigate("#/events");
            }
            catch (err) {
                status.textContent = err.message;
            }
        },
    }, kind, title, h("button", { type: "submit" }, "Create event"), status);
    const section = h("section", {}, h("h1", {}, "Course events"), createForm);
    for (const event of events) {
        const schedules = h("ul", {});
        for (const s of event.schedules ?? []) {
            schedules.append(h("li", {}, `${new Date(s.start).toLocaleString()} → ${new Date(s.end).toLocaleString()}`
                + (s.slot_members?.length ? ` (${s.slot_members.length} slotted)` : "")));
        }
        section.append(h("article", { class: "event-card" }, h("h2", {}, `${event.kind}: ${event.title} (${event.event_id})`), schedules, h("div", { class: "toolbar" }, h("button", {
            onclick: async () => {
                const hours = Number(window.prompt("Schedule length in hours from now:", "2"));
                if (!hours)
                    return;
                const now = Date.now();
                await ctx.api.post(`/api/events/${event.event_id}/schedules`, { start: now, end: now + hours * 3600000 });
                ctx.navigate("#/events");
            },
        }, "Add schedule"), h("button", {
            onclick: async () => {
                const pool = window.prompt("Problem ids to assign (comma-separated):", "p-sum");
                if (!pool)
                    return;
                await ctx.api.post(`/api/events/${event.event_id}/assign`, {
                    strategy: "SAME_FOR_ALL",
                    problem_ids: pool.split(",").map((s) => s.trim()),
                    seed: 1,
                });
                ctx.navigate("#/events");
            },
        }, "Assign problems"), h("button", {
            onclick: async () => {
                await ctx.api.post(`/api/events/${event.event_id}/assign-graders`, {});
                ctx.navigate("#/events");
            },
        }, "Distribute grading tasks"))));
    }
    return section;
}
