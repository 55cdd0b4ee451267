import { h } from "../dom.js";
export async function render(ctx, _params) {
    const { threads } = await ctx.api.get("/api/pager/threads");
    const section = h("section", {}, h("h1", {}, "Pager"));
    if (ctx.session?.role === "STUDENT") {
        const text = h("input", { placeholder: "Describe your problem" });
        section.append(h("form", {
            onsubmit: async (ev) => {
                ev.preventDefault();
                if (!text.value)
                    return;
                await ctx.api.post("/api/pager/threads", { text: text.value });
                ctx.navigate("#/pager");
            },
        }, text, h("button", { type: "submit" }, "Open thread")));
    }
    for (const thread of threads) {
        const messages = h("ul", { class: "messages" });
        thread.messages.forEach((m, index) => {
            messages.append(h("li", { class: m.deleted ? "deleted" : "" }, h("b", {}, `${m.author} (${m.author_role}): `), m.deleted ? h("i", {}, "(deleted)") : m.text, m.author === ctx.session?.user_id && !m.deleted
                ? h("button", {
                    class: "linkish",
                    onclick: async () => {
                        await ctx.api.del(`/api/pager/threads/${thread.thread_id}/messages/${index}`);
                        ctx.navigate("#/pager");
                    },
                }, "delete")
                : null));
        });
        const reply = h("input", { placeholder: "reply" });
        section.append(h("article", { class: "thread" }, h("h3", {}, `Thread ${thread.thread_id} by ${thread.opener}`), messages, h("form", {
            onsubmit: async (ev) => {
                ev.preventDefault();
                if (!reply.value)
                    return;
                await ctx.api.post(`/api/pager/threads/${thread.thread_id}/replies`, { text: reply.value });
                ctx.navigate("#/pager");
            },
        }, reply, h("button", { type: "submit" }, "Reply"))));
    }
    return section;
}
