// The assignment editor: statement tab, code editor, compile/execute/
// evaluate/submit, a console for diagnostics and plugin feedback, input and
// output windows, and the pass/fail table. Autosave posts AUTO_SAVE at the
// configured period, only while the buffer is dirty; submitting asks first.
import { h, clear } from "../dom.js";
import { CodeView } from "../codeview.js";
export function renderResult(result, console_, passTable) {
    clear(console_);
    clear(passTable);
    console_.append(h("div", { class: `job-status st-${result.status}` }, `Status: ${result.status}`));
    for (const diag of result.diagnostics) {
        console_.append(h("div", { class: "diag", "data-line": String(diag.line) }, `${diag.file}:${diag.line}: ${diag.text}`));
    }
    if (result.stderr)
        console_.append(h("pre", { class: "stderr" }, result.stderr));
    for (const item of result.feedback) {
        const body = item.body;
        const texts = Array.isArray(body?.items) ? body.items : [JSON.stringify(body)];
        for (const text of texts) {
            console_.append(h("div", { class: "feedback" }, `ℹ ${item.plugin}: ${text}`));
        }
    }
    if (result.per_test) {
        const passed = result.per_test.filter((t) => t.verdict === "PASS").length;
        passTable.append(h("p", { class: "pass-count" }, `${passed}/${result.per_test.length} tests passed`));
        const table = h("table", { class: "verdicts" }, h("tr", {}, h("th", {}, "test"), h("th", {}, "verdict"), h("th", {}, "expected"), h("th", {}, "got")));
        for (const test of result.per_test) {
            table.append(h("tr", { class: `v-${test.verdict}` }, h("td", {}, test.test_id + (test.visible ? "" : " (hidden)")), h("td", {}, test.verdict), h("td", {}, h("pre", {}, test.visible ? test.expected_output ?? "" : "—")), h("td", {}, h("pre", {}, test.visible ? test.actual_output ?? "" : "—"))));
        }
        passTable.append(table);
    }
}
export async function render(ctx, params) {
    const [event = "practice", problem = ""] = params;
    const context = await ctx.api.editorContext(event, problem);
    const home = await ctx.api.home();
    const view = new CodeView("python");
    view.value = context.code;
    let dirty = false;
    view.onDirty = () => (dirty = true);
    const stdin = h("textarea", { class: "stdin", placeholder: "program input" });
    const stdout = h("pre", { class: "stdout" });
    const console_ = h("div", { class: "console" });
    const passTable = h("div", { class: "pass-table" });
    const saveState = h("span", { class: "save-state" });
    async function save(stimulus) {
        const saved = await ctx.api.save(event, problem, view.value, stimulus);
        dirty = false;
        saveState.textContent = `saved #${saved.snapshot_id}`;
        return saved.snapshot_id;
    }
    async function run(action) {
        const snapshotId = await save(action.toUpperCase());
        const body = {
            code: view.value,
            context: { kind: event === "practice" ? "practice" : "course", event_id: event, problem_id: problem, snapshot_id: snapshotId },
        };
        if (action === "execute")
            body.stdin = stdin.value;
        if (action === "evaluate")
            body.problem_id = problem;
        const result = await ctx.api.engine(action, body);
        view.setMarkers(result.diagnostics.map((d) => ({ line: d.line, severity: d.severity, text: d.text })));
        clear(stdout);
        if (result.stdout)
            stdout.append(document.createTextNode(result.stdout));
        renderResult(result, console_, passTable);
    }
    const autosaveTimer = setInterval(() => {
        if (dirty)
            void save("AUTO_SAVE").catch(() => undefined);
    }, Math.max(5, home.autosave_period_s) * 1000);
    autosaveTimer.unref?.(); // node test host: never keep the loop alive
    window.addEventListener("hashchange", () => clearInterval(autosaveTimer), { once: true });
    const statementTab = h("article", { class: "statement" }, h("h2", {}, context.title), h("pre", { class: "statement-text" }, context.statement));
    const submitButton = h("button", {
        class: "submit",
        onclick: async () => {
            // submission requires an explicit confirmation step
            if (!window.confirm("Submit this code as your solution?"))
                return;
            await save("SUBMIT");
            saveState.textContent = "submitted — grade pending";
        },
    }, "Submit");
    return h("section", { class: "editor-view" }, h("div", { class: "editor-left" }, statementTab), h("div", { class: "editor-main" }, h("div", { class: "toolbar" }, h("button", { onclick: () => void save("MANUAL_SAVE") }, "Save"), h("button", { onclick: () => void run("compile") }, "Compile"), h("button", { onclick: () => void run("execute") }, "Execute"), h("button", { onclick: () => void run("evaluate") }, "Evaluate"), submitButton, saveState), view.root, h("div", { class: "io-row" }, h("label", {}, "Input", stdin), h("label", {}, "Output", stdout)), console_, passTable));
}
