// Dependency-free SVG charts for the assignment analytics views.
const W = 640;
const H = 220;
const PAD = 36;
function scale(points) {
    const xs = points.map((p) => p.x);
    const ys = points.map((p) => p.y);
    const xMin = Math.min(...xs);
    const xMax = Math.max(...xs);
    const yMin = Math.min(0, ...ys);
    const yMax = Math.max(1, ...ys);
    return (p) => [
        PAD + ((p.x - xMin) / Math.max(1, xMax - xMin)) * (W - 2 * PAD),
        H - PAD - ((p.y - yMin) / Math.max(1, yMax - yMin)) * (H - 2 * PAD),
    ];
}
export function lineChart(points, label) {
    if (!points.length)
        return `<svg class="chart" viewBox="0 0 ${W} ${H}"><text x="20" y="30">no data</text></svg>`;
    const s = scale(points);
    const path = points.map((p, i) => `${i ? "L" : "M"}${s(p)[0].toFixed(1)},${s(p)[1].toFixed(1)}`).join(" ");
    const dots = points
        .map((p) => `<circle cx="${s(p)[0].toFixed(1)}" cy="${s(p)[1].toFixed(1)}" r="2.5"/>`)
        .join("");
    const yMax = Math.max(...points.map((p) => p.y));
    return (`<svg class="chart" viewBox="0 0 ${W} ${H}" data-points="${points.length}">` +
        `<text x="${PAD}" y="16">${label}</text>` +
        `<text x="4" y="${PAD}" class="axis">${yMax}</text>` +
        `<line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" class="axis"/>` +
        `<path d="${path}" fill="none"/>` +
        dots +
        `</svg>`);
}
export function stepChart(events, title) {
    if (!events.length)
        return `<svg class="chart" viewBox="0 0 ${W} ${H}"><text x="20" y="30">no data</text></svg>`;
    const xs = events.map((e) => e.x);
    const xMin = Math.min(...xs);
    const xMax = Math.max(...xs);
    const marks = events
        .map((e, i) => {
        const x = PAD + ((e.x - xMin) / Math.max(1, xMax - xMin)) * (W - 2 * PAD);
        const y = 40 + (i % 6) * 26;
        return `<circle cx="${x.toFixed(1)}" cy="${y}" r="3"/><text x="${(x + 6).toFixed(1)}" y="${y + 4}">${e.label}</text>`;
    })
        .join("");
    return (`<svg class="chart" viewBox="0 0 ${W} ${H}" data-points="${events.length}">` +
        `<text x="${PAD}" y="16">${title}</text>` +
        `<line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" class="axis"/>` +
        marks +
        `</svg>`);
}
export function spanChart(spans, now, title) {
    if (!spans.length)
        return `<svg class="chart" viewBox="0 0 ${W} ${H}"><text x="20" y="30">no data</text></svg>`;
    const xMin = Math.min(...spans.map((s) => s.start));
    const xMax = Math.max(now, ...spans.map((s) => s.end ?? now));
    const x = (v) => PAD + ((v - xMin) / Math.max(1, xMax - xMin)) * (W - 2 * PAD);
    const rows = spans
        .map((s, i) => {
        const y = 34 + i * 24;
        const x1 = x(s.start);
        const x2 = x(s.end ?? now);
        const open = s.end == null ? ' class="open"' : "";
        return (`<rect x="${x1.toFixed(1)}" y="${y}" width="${Math.max(2, x2 - x1).toFixed(1)}" height="12"${open}/>` +
            `<text x="${PAD}" y="${y - 3}">${s.label}</text>`);
    })
        .join("");
    return (`<svg class="chart" viewBox="0 0 ${W} ${Math.max(H, 60 + spans.length * 24)}" data-points="${spans.length}">` +
        `<text x="${PAD}" y="16">${title}</text>` +
        rows +
        `</svg>`);
}
