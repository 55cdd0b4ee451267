// Line diff between two snapshots (LCS-based), for the history view.
export function diffLines(before, after) {
    const a = before.split("\n");
    const b = after.split("\n");
    const n = a.length;
    const m = b.length;
    // LCS table; inputs are source files, so quadratic is fine
    const lcs = Array.from({ length: n + 1 }, () => new Array(m + 1).fill(0));
    for (let i = n - 1; i >= 0; i--) {
        for (let j = m - 1; j >= 0; j--) {
            lcs[i][j] = a[i] === b[j] ? lcs[i + 1][j + 1] + 1 : Math.max(lcs[i + 1][j], lcs[i][j + 1]);
        }
    }
    const out = [];
    let i = 0;
    let j = 0;
    while (i < n && j < m) {
        if (a[i] === b[j]) {
            out.push({ kind: "same", text: a[i] });
            i++;
            j++;
        }
        else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
            out.push({ kind: "del", text: a[i] });
            i++;
        }
        else {
            out.push({ kind: "add", text: b[j] });
            j++;
        }
    }
    while (i < n)
        out.push({ kind: "del", text: a[i++] });
    while (j < m)
        out.push({ kind: "add", text: b[j++] });
    return out;
}
