import { h, clear } from "../dom.js";
import { CodeView } from "../codeview.js";
import { renderResult } from "./editor.js";
export async function render(ctx, _params) {
    const tree = h("ul", { class: "sp-tree" });
    const view = new CodeView("python");
    const stdin = h("textarea", { class: "stdin", placeholder: "program input" });
    const stdout = h("pre", { class: "stdout" });
    const console_ = h("div", { class: "console" });
    let current = null;
    async function reload() {
        const { nodes } = await ctx.api.get("/api/scratchpad/tree");
        clear(tree);
        const byParent = new Map();
        for (const node of nodes) {
            const list = byParent.get(node.parent) ?? [];
            list.push(node);
            byParent.set(node.parent, list);
        }
        const renderLevel = (parent, into) => {
            for (const node of byParent.get(parent) ?? []) {
                const li = h("li", { class: node.kind === "FOLDER" ? "folder" : "file" });
                li.append(h("a", {
                    href: "#/scratchpad",
                    onclick: (ev) => {
                        ev.preventDefault();
                        if (node.kind === "FILE") {
                            current = node;
                            view.value = node.content ?? "";
                        }
                    },
                }, (node.kind === "FOLDER" ? "📁 " : "📄 ") + node.name), h("button", {
                    class: "linkish",
                    onclick: async () => {
                        await ctx.api.del(`/api/scratchpad/nodes/${node.node_id}`);
                        if (current?.node_id === node.node_id)
                            current = null;
                        await reload();
                    },
                }, "✕"));
                if (node.kind === "FOLDER") {
                    const sub = h("ul", {});
                    renderLevel(node.node_id, sub);
                    li.append(sub);
                }
                into.append(li);
            }
        };
        renderLevel("", tree);
    }
    async function create(kind) {
        const name = window.prompt(`Name for the new ${kind.toLowerCase()}:`);
        if (!name)
            return;
        await ctx.api.post("/api/scratchpad/nodes", { kind, name, parent: "" });
        await reload();
    }
    async function saveCurrent() {
        if (!current)
            return;
        await ctx.api.put(`/api/scratchpad/nodes/${current.node_id}`, { content: view.value });
    }
    async function run(action) {
        if (!current)
            return;
        await saveCurrent();
        const result = await ctx.api.post("/api/scratchpad/run", {
            node_id: current.node_id,
            action,
            stdin: stdin.value,
        });
        view.setMarkers(result.diagnostics.map((d) => ({ line: d.line, severity: d.severity, text: d.text })));
        clear(stdout);
        if (result.stdout)
            stdout.append(document.createTextNode(result.stdout));
        renderResult(result, console_, h("div", {}));
    }
    await reload();
    return h("section", { class: "scratchpad" }, h("aside", { class: "sp-side" }, h("div", { class: "toolbar" }, h("button", { onclick: () => void create("FILE") }, "+ file"), h("button", { onclick: () => void create("FOLDER") }, "+ folder")), tree), h("div", { class: "editor-main" }, h("div", { class: "toolbar" }, h("button", { onclick: () => void saveCurrent() }, "Save"), h("button", { onclick: () => void run("compile") }, "Compile"), h("button", { onclick: () => void run("execute") }, "Execute")), view.root, h("div", { class: "io-row" }, h("label", {}, "Input", stdin), h("label", {}, "Output", stdout)), console_));
}
