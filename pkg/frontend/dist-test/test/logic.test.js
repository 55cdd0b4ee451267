import { test } from "node:test";
import assert from "node:assert/strict";
import { tokenizeLine, tokensConcat, indentAfter } from "../src/highlight.js";
import { foldableRegions, project } from "../src/fold.js";
import { diffLines } from "../src/diff.js";
import { lineChart, spanChart } from "../src/charts.js";
import { navItemsFor } from "../src/api.js";
test("tokenizer round-trips every line losslessly", () => {
    const lines = [
        "def f(x):  # comment",
        'print("hello \\" world", 42)',
        "    while True and x != 3.14:",
        "",
        "weird\ttabs\tand   spaces",
    ];
    for (const line of lines) {
        assert.equal(tokensConcat(tokenizeLine(line)), line);
    }
});
test("tokenizer classifies keywords, strings, numbers, comments", () => {
    const tokens = tokenizeLine('if x == "s":  # c');
    const byText = new Map(tokens.map((t) => [t.text, t.cls]));
    assert.equal(byText.get("if"), "kw");
    assert.equal(byText.get('"s"'), "str");
    assert.equal(byText.get("# c"), "cmt");
    const num = tokenizeLine("y = 42").find((t) => t.text === "42");
    assert.equal(num?.cls, "num");
});
test("auto-indentation after block openers", () => {
    assert.equal(indentAfter("def f():"), "    ");
    assert.equal(indentAfter("    if x:"), "        ");
    assert.equal(indentAfter("x = 1"), "");
    assert.equal(indentAfter("  y = 2"), "  ");
    assert.equal(indentAfter("int main() {", "c"), "    ");
});
test("foldable regions follow indentation blocks", () => {
    const lines = ["def f():", "    a = 1", "    b = 2", "c = 3"];
    assert.deepEqual(foldableRegions(lines), [{ start: 0, end: 2 }]);
});
test("fold projection hides the region and maps lines back", () => {
    const lines = ["def f():", "    a = 1", "    b = 2", "c = 3"];
    const projected = project(lines, new Set([0]));
    assert.equal(projected.displayLines.length, 2);
    assert.match(projected.displayLines[0], /\(2 lines\)/);
    assert.deepEqual(projected.sourceLine, [0, 3]);
    assert.deepEqual(projected.folded, [true, false]);
    // nothing folded: identity projection
    const identity = project(lines, new Set());
    assert.deepEqual(identity.displayLines, lines);
});
test("diff marks additions and deletions around a common core", () => {
    const before = "a\nb\nc\n";
    const after = "a\nx\nc\nd\n";
    const kinds = diffLines(before, after).map((l) => `${l.kind}:${l.text}`);
    assert.deepEqual(kinds, ["same:a", "del:b", "add:x", "same:c", "add:d", "same:"]);
});
test("diff of identical text is all-same", () => {
    for (const line of diffLines("a\nb", "a\nb"))
        assert.equal(line.kind, "same");
});
test("line chart embeds one dot per point", () => {
    const svg = lineChart([{ x: 1, y: 10 }, { x: 2, y: 20 }, { x: 3, y: 15 }], "sizes");
    assert.match(svg, /data-points="3"/);
    assert.equal((svg.match(/<circle/g) ?? []).length, 3);
});
test("span chart marks open episodes", () => {
    const svg = spanChart([{ label: "e1", start: 0, end: 100 }, { label: "e2", start: 50, end: null }], 200, "errors");
    assert.match(svg, /class="open"/);
});
test("navigation mirrors the role ladder exactly", () => {
    const student = navItemsFor("STUDENT").map((i) => i.hash);
    const ta = navItemsFor("TA").map((i) => i.hash);
    const tutor = navItemsFor("TUTOR").map((i) => i.hash);
    const teacher = navItemsFor("TEACHER").map((i) => i.hash);
    for (const hash of student)
        assert.ok(ta.includes(hash), `TA keeps ${hash}`);
    for (const hash of ta)
        assert.ok(tutor.includes(hash));
    for (const hash of tutor)
        assert.ok(teacher.includes(hash));
    assert.ok(!student.includes("#/submissions"));
    assert.ok(!ta.includes("#/problems"));
    assert.ok(!tutor.includes("#/control"));
    assert.ok(teacher.includes("#/control"));
    assert.deepEqual(navItemsFor("ADMINISTRATOR"), []);
});
