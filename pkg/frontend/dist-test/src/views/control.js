import { h } from "../dom.js";
const NUMERIC = ["time_quota_ms", "memory_quota_bytes", "output_cap_bytes",
    "max_concurrent", "request_timeout_ms", "autosave_period_s"];
export async function render(ctx, _params) {
    const config = await ctx.api.get("/api/control/config");
    const status = h("span", { class: "status" });
    const inputs = new Map();
    const form = h("form", {
        class: "control-form",
        onsubmit: async (ev) => {
            ev.preventDefault();
            const patch = {};
            for (const [key, input] of inputs) {
                const value = Number(input.value);
                if (!Number.isInteger(value)) {
                    status.textContent = `${key} must be an integer`;
                    return;
                }
                if (value !== config[key])
                    patch[key] = value;
            }
            try {
                await ctx.api.put("/api/control/config", patch);
                status.textContent = "saved; engines apply it on their next poll";
            }
            catch (err) {
                status.textContent = err.message;
            }
        },
    });
    for (const key of NUMERIC) {
        const input = h("input", { value: String(config[key]) });
        inputs.set(key, input);
        form.append(h("label", {}, key, input));
    }
    form.append(h("button", { type: "submit" }, "Save"), status);
    const toggles = h("div", { class: "toggles" }, h("h2", {}, "Logging"));
    for (const [action, enabled] of Object.entries(config.logging_enabled ?? {})) {
        toggles.append(h("button", {
            onclick: async () => {
                const logging = { ...config.logging_enabled, [action]: !enabled };
                await ctx.api.put("/api/control/config", { logging_enabled: logging });
                ctx.navigate("#/control");
            },
        }, `${action}: ${enabled ? "on" : "off"}`));
    }
    const plugins = h("div", { class: "toggles" }, h("h2", {}, "Plugins"));
    const pluginEntries = Object.entries(config.plugins_enabled ?? {});
    if (!pluginEntries.length)
        plugins.append(h("p", { class: "muted" }, "No feedback tools integrated."));
    for (const [name, enabled] of pluginEntries) {
        plugins.append(h("button", {
            onclick: async () => {
                const state = { ...config.plugins_enabled, [name]: !enabled };
                await ctx.api.put("/api/control/config", { plugins_enabled: state });
                ctx.navigate("#/control");
            },
        }, `${name}: ${enabled ? "enabled" : "disabled"}`));
    }
    return h("section", {}, h("h1", {}, "Control panel"), form, toggles, plugins);
}
