// Scripted end-to-end run against a real backend: login, edit, compile with a
// diagnostic, evaluate with the pass table, submit, then the admin grades in
// the history view. Every assertion checks rendered content against API
// ground truth fetched separately.
import { test, before, after } from "node:test";
import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import { createInterface } from "node:readline";
import { installDom } from "./helpers.js";
let backend = null;
let base = "";
let eventId = "";
async function startBackend() {
    // the compiled test lives in dist-test/test/; the fixture stays in test/
    const fixture = new URL("../../test/backend_fixture.py", import.meta.url).pathname;
    backend = spawn("python3", [fixture], {
        stdio: ["pipe", "pipe", "inherit"],
    });
    const line = await new Promise((resolve) => {
        const timer = setTimeout(() => resolve(null), 60000);
        createInterface({ input: backend.stdout }).once("line", (text) => {
            clearTimeout(timer);
            resolve(text);
        });
        backend.once("exit", () => {
            clearTimeout(timer);
            resolve(null);
        });
    });
    if (!line)
        return false;
    const config = JSON.parse(line);
    base = config.gateway;
    eventId = config.event_id;
    return true;
}
async function waitFor(predicate, what, timeoutMs = 30000) {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
        if (predicate())
            return;
        await new Promise((r) => setTimeout(r, 50));
    }
    assert.fail(`timed out waiting for ${what}`);
}
function q(selector) {
    const el = document.querySelector(selector);
    assert.ok(el, `expected element ${selector}`);
    return el;
}
function setEditorCode(code) {
    const textarea = q(".code-input");
    textarea.value = code;
    textarea.dispatchEvent(new globalThis.window.Event("input", { bubbles: true }));
}
function clickButton(label) {
    const button = [...document.querySelectorAll("button")].find((b) => b.textContent === label);
    assert.ok(button, `expected a "${label}" button`);
    button.click();
}
before(async () => {
    const up = await startBackend();
    assert.ok(up, "backend fixture failed to start");
    installDom();
});
after(() => {
    backend?.stdin?.end();
    backend?.kill();
});
test("login -> edit -> compile -> evaluate -> submit -> admin grades", async () => {
    const { App } = await import("../src/app.js");
    const { Api } = await import("../src/api.js");
    const app = new App(document.getElementById("app"));
    app.api = new Api(base);
    await app.start();
    // --- student logs in ------------------------------------------------
    q('[name="login"]').value = "s001";
    q('[name="credential"]').value = "s001";
    q("form.login-form").dispatchEvent(new globalThis.window.Event("submit"));
    await waitFor(() => document.querySelector(".event-card") != null, "home view after login");
    assert.match(document.body.textContent ?? "", /UI e2e/);
    // --- open the assignment editor --------------------------------------
    location.hash = `#/editor/${eventId}/p-sum`;
    await app.refresh();
    await waitFor(() => document.querySelector(".code-input") != null, "editor view");
    assert.match(document.body.textContent ?? "", /Sum of two/);
    // --- compile broken code: diagnostic renders with its line anchor ----
    setEditorCode("a, b = map(int, input().split()\nprint(a + b)\n");
    clickButton("Compile");
    await waitFor(() => document.querySelector(".console .diag") != null, "compile diagnostic");
    const diag = q(".console .diag");
    // ground truth: the engine's own diagnostic for the same code
    const oracle = new Api(base);
    await oracle.login("s001", "s001");
    const oracleResult = await oracle.engine("compile", {
        code: "a, b = map(int, input().split()\nprint(a + b)\n",
        context: { kind: "scratchpad" },
    });
    assert.equal(oracleResult.status, "COMPILE_ERROR");
    assert.equal(diag.getAttribute("data-line"), String(oracleResult.diagnostics[0].line));
    assert.ok((diag.textContent ?? "").includes(oracleResult.diagnostics[0].text.split(":")[0]));
    assert.ok(document.querySelector(".gutter-line.sev-error"), "error marker in the gutter");
    // --- fix the code and evaluate: pass table matches ground truth -------
    setEditorCode("a, b = map(int, input().split())\nprint(a + b)\n");
    clickButton("Evaluate");
    await waitFor(() => document.querySelector(".pass-table table") != null, "verdict table");
    const groundTruth = await oracle.engine("evaluate", {
        code: "a, b = map(int, input().split())\nprint(a + b)\n",
        problem_id: "p-sum",
        context: { kind: "practice", problem_id: "p-sum" },
    });
    const expectedPass = groundTruth.per_test.filter((t) => t.verdict === "PASS").length;
    assert.match(q(".pass-count").textContent ?? "", new RegExp(`${expectedPass}/${groundTruth.per_test.length} tests passed`));
    assert.equal(document.querySelectorAll(".pass-table tr.v-PASS").length, expectedPass);
    // --- submit (confirmation comes from the stubbed confirm=true) --------
    clickButton("Submit");
    await waitFor(() => (document.querySelector(".save-state")?.textContent ?? "").includes("submitted"), "submission confirmation");
    const submitted = await oracle.get(`/api/editor/context?event=${eventId}&problem=p-sum`);
    assert.ok(submitted.submitted_snapshot_id != null, "backend recorded the submission");
    // --- admin grades through the history view ----------------------------
    await oracle.logout();
    clickButton("Log out");
    await waitFor(() => document.querySelector("form.login-form") != null, "login view again");
    q('[name="login"]').value = "ta01";
    q('[name="credential"]').value = "ta01";
    q("form.login-form").dispatchEvent(new globalThis.window.Event("submit"));
    await waitFor(() => app.session?.role === "TA", "TA session");
    location.hash = `#/history/u-s001/${eventId}/p-sum`;
    await app.refresh();
    await waitFor(() => document.querySelector(".timeline") != null, "history view");
    const ta = new Api(base);
    await ta.login("ta01", "ta01");
    const history = await ta.history("u-s001", eventId, "p-sum");
    assert.equal(document.querySelectorAll(".timeline li").length, history.snapshots.length, "timeline lists every snapshot");
    assert.ok((document.querySelector(".charts")?.innerHTML ?? "").includes(`data-points="${history.snapshots.length}"`), "code-size chart point count equals the snapshot count");
    q('[name="score"]').value = "8";
    q('[name="max"]').value = "10";
    q('[name="remarks"]').value = "solid";
    q(".grade-form").dispatchEvent(new globalThis.window.Event("submit"));
    await waitFor(() => (document.querySelector(".grade-form .status")?.textContent ?? "").includes("graded"), "grade confirmation");
    const submission = await ta.get(`/api/editor/submission?user=u-s001&event=${eventId}&problem=p-sum`);
    assert.equal(submission.grade.score, 8);
    assert.equal(submission.grade.max_score, 10);
    assert.equal(submission.grade.grader, "u-ta01");
    // grading form enforces the 0..max bound client-side too
    q('[name="score"]').value = "11";
    q(".grade-form").dispatchEvent(new globalThis.window.Event("submit"));
    await waitFor(() => (document.querySelector(".grade-form .status")?.textContent ?? "").includes("within 0..10"), "client-side bound message");
    location.hash = "#/home";
    await app.refresh();
});
