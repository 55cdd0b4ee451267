// Code folding as a pure projection: the buffer is authoritative, the view
// shows folded regions as a one-line placeholder. Editing anywhere unfolds
// (the display map would otherwise lie about offsets).

export interface FoldRegion {
  start: number; // line index owning the fold handle
  end: number; // last line hidden by the fold (inclusive)
}

function indentWidth(line: string): number {
  if (!line.trim()) return -1; // blank lines belong to any block
  return line.match(/^[ \t]*/)![0].length;
}

// A line starts a foldable region when some following non-blank line is more
// indented; the region runs until indentation returns to the start level.
export function foldableRegions(lines: string[]): FoldRegion[] {
  const regions: FoldRegion[] = [];
  for (let i = 0; i < lines.length; i++) {
    const base = indentWidth(lines[i]);
    if (base < 0) continue;
    let end = -1;
    for (let j = i + 1; j < lines.length; j++) {
      const width = indentWidth(lines[j]);
      if (width < 0) continue;
      if (width > base) end = j;
      else break;
    }
    if (end > i) regions.push({ start: i, end });
  }
  return regions;
}

export interface Projection {
  displayLines: string[];
  // for each display line, the source line index it came from; placeholder
  // lines map to the folded region's start line
  sourceLine: number[];
  folded: boolean[]; // per display line: is this a fold placeholder
}

export function project(lines: string[], foldedStarts: Set<number>): Projection {
  const regions = new Map(foldableRegions(lines).map((r) => [r.start, r]));
  const displayLines: string[] = [];
  const sourceLine: number[] = [];
  const folded: boolean[] = [];
  let i = 0;
  while (i < lines.length) {
    const region = foldedStarts.has(i) ? regions.get(i) : undefined;
    if (region) {
      const hidden = region.end - region.start;
      displayLines.push(`${lines[i]}  … (${hidden} lines)`);
      sourceLine.push(i);
      folded.push(true);
      i = region.end + 1;
    } else {
      displayLines.push(lines[i]);
      sourceLine.push(i);
      folded.push(false);
      i += 1;
    }
  }
  return { displayLines, sourceLine, folded };
}
