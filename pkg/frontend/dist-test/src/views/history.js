// Admin code-history view: snapshot timeline with stimuli, diff between
// versions, evaluate on the stored code, the grading form, and the
// per-assignment analytics charts.
import { h, clear } from "../dom.js";
import { diffLines } from "../diff.js";
import { lineChart, stepChart, spanChart } from "../charts.js";
import { renderResult } from "./editor.js";
export async function render(ctx, params) {
    const [user = "", event = "", problem = ""] = params;
    if (!user || !problem) {
        return h("section", {}, h("p", {}, "Open a submission from the Submissions view."));
    }
    const { snapshots } = await ctx.api.history(user, event, problem);
    const codePane = h("pre", { class: "code-pane" });
    const diffPane = h("div", { class: "diff-pane" });
    let selected = snapshots[snapshots.length - 1] ?? null;
    const timeline = h("ol", { class: "timeline" });
    snapshots.forEach((snap, index) => {
        timeline.append(h("li", { class: snap.deleted ? "deleted" : "" }, h("a", {
            href: `#/history/${user}/${event}/${problem}`,
            onclick: (ev) => {
                ev.preventDefault();
                selected = snap;
                show(index);
            },
        }, `#${snap.snapshot_id} ${snap.stimulus} @ ${new Date(snap.created_at).toLocaleTimeString()}` +
            (snap.linked_log ? ` [${snap.linked_log}]` : "") +
            (snap.deleted ? " (deleted)" : ""))));
    });
    function show(index) {
        const snap = snapshots[index];
        clear(codePane);
        codePane.append(document.createTextNode(snap.code || "(empty)"));
        clear(diffPane);
        if (index > 0) {
            diffPane.append(h("h3", {}, `Diff against #${snapshots[index - 1].snapshot_id}`));
            const pre = h("pre", { class: "diff" });
            for (const line of diffLines(snapshots[index - 1].code, snap.code)) {
                const prefix = line.kind === "add" ? "+" : line.kind === "del" ? "-" : " ";
                pre.append(h("div", { class: `d-${line.kind}` }, prefix + line.text));
            }
            diffPane.append(pre);
        }
    }
    if (snapshots.length)
        show(snapshots.length - 1);
    const console_ = h("div", { class: "console" });
    const passTable = h("div", { class: "pass-table" });
    const evaluateButton = h("button", {
        onclick: async () => {
            if (!selected)
                return;
            const result = await ctx.api.engine("evaluate", {
                code: selected.code,
                problem_id: problem,
                context: { kind: "admin", problem_id: problem },
            });
            renderResult(result, console_, passTable);
        },
    }, "Evaluate this snapshot");
    const scoreInput = h("input", { name: "score", type: "number", min: "0", value: "0" });
    const maxInput = h("input", { name: "max", type: "number", min: "1", value: "10" });
    const remarks = h("input", { name: "remarks", placeholder: "remarks" });
    const gradeStatus = h("span", { class: "status" });
    const gradeForm = h("form", {
        class: "grade-form",
        onsubmit: async (ev) => {
            ev.preventDefault();
            const score = Number(scoreInput.value);
            const max = Number(maxInput.value);
            if (!(score >= 0 && score <= max)) {
                gradeStatus.textContent = `score must be within 0..${max}`;
                return;
            }
            try {
                await ctx.api.grade(user, event, problem, score, max, remarks.value);
                gradeStatus.textContent = "graded ✓";
            }
            catch (err) {
                gradeStatus.textContent = err.message;
            }
        },
    }, h("label", {}, "Score", scoreInput), h("label", {}, "out of", maxInput), remarks, h("button", { type: "submit" }, "Grade"), gradeStatus);
    const charts = h("div", { class: "charts" });
    const [sizes, progression, timelineData, sequence] = await Promise.all([
        ctx.api.analytics("code-size", user, event, problem),
        ctx.api.analytics("save-progression", user, event, problem),
        ctx.api.analytics("error-timeline", user, event, problem),
        ctx.api.analytics("execution-sequence", user, event, problem),
    ]);
    charts.insertAdjacentHTML("beforeend", lineChart(sizes.series.map(([x, y]) => ({ x, y })), "Code size over time (bytes)"));
    charts.insertAdjacentHTML("beforeend", stepChart(progression.series.map(([x, label]) => ({ x, label })), "Save progression"));
    charts.insertAdjacentHTML("beforeend", spanChart(timelineData.episodes.map((e) => ({
        label: e.error_class,
        start: e.first_seen,
        end: e.fixed_at,
    })), Date.now(), "Compile-error timeline"));
    charts.insertAdjacentHTML("beforeend", stepChart(sequence.sequence.map((e) => ({ x: e.at, label: `${e.action}:${e.status}` })), "Executions and evaluations"));
    return h("section", { class: "history-view" }, h("h1", {}, `History: ${user} / ${event} / ${problem}`), h("div", { class: "history-cols" }, h("div", {}, h("h3", {}, "Timeline"), timeline), h("div", {}, h("h3", {}, "Code"), codePane, diffPane)), h("div", { class: "toolbar" }, evaluateButton), console_, passTable, gradeForm, h("h2", {}, "Assignment analytics"), charts);
}
