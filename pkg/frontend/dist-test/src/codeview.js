// The code editor widget: a textarea kept in lockstep with a highlighted
// overlay, a line-number gutter carrying diagnostic markers and fold handles.
// The buffer is the single source of truth; folding is a display projection
// and any edit while folded unfolds first.
import { h, clear } from "./dom.js";
import { tokenizeLine, indentAfter } from "./highlight.js";
import { foldableRegions, project } from "./fold.js";
export class CodeView {
    constructor(language = "python") {
        this.language = language;
        this.buffer = "";
        this.foldedStarts = new Set();
        this.markers = [];
        this.onDirty = null;
        this.gutter = h("div", { class: "gutter" });
        this.overlay = h("pre", { class: "overlay", "aria-hidden": "true" });
        this.textarea = h("textarea", {
            class: "code-input",
            spellcheck: "false",
            autocomplete: "off",
        });
        this.textarea.addEventListener("input", () => this.onInput());
        this.textarea.addEventListener("keydown", (ev) => this.onKeydown(ev));
        this.textarea.addEventListener("scroll", () => this.syncScroll());
        this.root = h("div", { class: "codeview" }, this.gutter, this.overlay, this.textarea);
    }
    get value() {
        return this.buffer;
    }
    set value(code) {
        this.buffer = code;
        this.foldedStarts.clear();
        this.render();
    }
    setLanguage(language) {
        this.language = language;
        this.render();
    }
    setMarkers(markers) {
        this.markers = markers;
        this.render();
    }
    toggleFold(sourceLine) {
        if (this.foldedStarts.has(sourceLine))
            this.foldedStarts.delete(sourceLine);
        else
            this.foldedStarts.add(sourceLine);
        this.render();
    }
    onInput() {
        if (this.foldedStarts.size) {
            // the textarea displayed a projection; the edit belongs to it, so the
            // simplest truthful recovery is: unfold everything, keep the edit
            this.foldedStarts.clear();
        }
        this.buffer = this.textarea.value;
        this.render();
        this.onDirty?.();
    }
    onKeydown(ev) {
        if (ev.key !== "Enter")
            return;
        const pos = this.textarea.selectionStart;
        const before = this.textarea.value.slice(0, pos);
        const lineStart = before.lastIndexOf("\n") + 1;
        const indent = indentAfter(before.slice(lineStart), this.language);
        if (!indent)
            return;
        ev.preventDefault();
        const after = this.textarea.value.slice(this.textarea.selectionEnd);
        this.textarea.value = before + "\n" + indent + after;
        const cursor = pos + 1 + indent.length;
        this.textarea.setSelectionRange(cursor, cursor);
        this.onInput();
    }
    syncScroll() {
        this.overlay.scrollTop = this.textarea.scrollTop;
        this.overlay.scrollLeft = this.textarea.scrollLeft;
        this.gutter.scrollTop = this.textarea.scrollTop;
    }
    render() {
        const lines = this.buffer.split("\n");
        const projection = project(lines, this.foldedStarts);
        const displayed = projection.displayLines.join("\n");
        if (this.textarea.value !== displayed) {
            this.textarea.value = displayed;
        }
        this.textarea.readOnly = false;
        const regions = new Set(foldableRegions(lines).map((r) => r.start));
        const markersByLine = new Map();
        for (const marker of this.markers) {
            if (!markersByLine.has(marker.line))
                markersByLine.set(marker.line, marker);
        }
        clear(this.gutter);
        clear(this.overlay);
        projection.displayLines.forEach((text, row) => {
            const source = projection.sourceLine[row];
            const lineNo = source + 1;
            const marker = markersByLine.get(lineNo);
            const cell = h("div", { class: "gutter-line" + (marker ? ` sev-${marker.severity}` : "") }, marker ? h("span", { class: "marker", title: marker.text }, "●") : null, String(lineNo));
            if (regions.has(source)) {
                const handle = h("span", {
                    class: "fold-handle",
                    onclick: () => this.toggleFold(source),
                }, projection.folded[row] ? "▸" : "▾");
                cell.prepend(handle);
            }
            this.gutter.append(cell);
            const lineEl = h("div", { class: "hl-line" + (projection.folded[row] ? " fold-line" : "") });
            for (const token of tokenizeLine(text, this.language)) {
                lineEl.append(token.cls ? h("span", { class: `tok-${token.cls}` }, token.text) : document.createTextNode(token.text));
            }
            if (!text)
                lineEl.append(document.createTextNode("​"));
            this.overlay.append(lineEl);
        });
    }
}
