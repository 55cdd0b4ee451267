// Tiny element builder; string children become text nodes (no HTML injection).
export function h(tag, attrs = {}, ...children) {
    const el = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (typeof value === "function") {
            el.addEventListener(key.replace(/^on/, ""), value);
        }
        else if (typeof value === "boolean") {
            if (value)
                el.setAttribute(key, "");
        }
        else {
            el.setAttribute(key, value);
        }
    }
    for (const child of children) {
        if (child == null)
            continue;
        el.append(typeof child === "string" ? document.createTextNode(child) : child);
    }
    return el;
}
export function clear(el) {
    while (el.firstChild)
        el.removeChild(el.firstChild);
    return el;
}
