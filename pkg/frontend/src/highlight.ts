// Line tokenizer for editor highlighting. Pure: (line) -> tokens with CSS
// classes. Covers the course languages' lexical shapes (keywords, strings,
// comments, numbers); anything unrecognized passes through as plain text.

export interface Token {
  text: string;
  cls: "kw" | "str" | "num" | "cmt" | "fn" | "" ;
}

const PY_KEYWORDS = new Set(
  ("False None True and as assert async await break class continue def del elif else except " +
    "finally for from global if import in is lambda nonlocal not or pass raise return try " +
    "while with yield").split(" "),
);
const C_KEYWORDS = new Set(
  ("auto break case char const continue default do double else enum extern float for goto if " +
    "int long register return short signed sizeof static struct switch typedef union unsigned " +
    "void volatile while include define").split(" "),
);

const PATTERN = /(#[^\n]*|\/\/[^\n]*)|("(?:[^"\\]|\\.)*"?|'(?:[^'\\]|\\.)*'?)|(\b\d+(?:\.\d+)?\b)|(\b[A-Za-z_]\w*\b)|(\s+|.)/g;

export function tokenizeLine(line: string, language: string = "python"): Token[] {
  const keywords = language === "c" ? C_KEYWORDS : PY_KEYWORDS;
  const tokens: Token[] = [];
  for (const match of line.matchAll(PATTERN)) {
    const [, comment, str, num, word, other] = match;
    if (comment !== undefined) tokens.push({ text: comment, cls: "cmt" });
    else if (str !== undefined) tokens.push({ text: str, cls: "str" });
    else if (num !== undefined) tokens.push({ text: num, cls: "num" });
    else if (word !== undefined) {
      tokens.push({ text: word, cls: keywords.has(word) ? "kw" : "" });
    } else tokens.push({ text: other!, cls: "" });
  }
  return tokens;
}

export function tokensConcat(tokens: Token[]): string {
  return tokens.map((t) => t.text).join("");
}

// Auto-indentation: what the next line's leading whitespace should be after
// pressing Enter at the end of `line`.
export function indentAfter(line: string, language: string = "python"): string {
  const current = line.match(/^[ \t]*/)![0];
  const trimmed = line.trimEnd();
  if (language === "c") {
    return trimmed.endsWith("{") ? current + "    " : current;
  }
  return trimmed.endsWith(":") ? current + "    " : current;
}
