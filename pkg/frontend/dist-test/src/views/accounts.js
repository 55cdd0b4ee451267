import { h } from "../dom.js";
const ROLES = ["STUDENT", "TA", "TUTOR", "TEACHER"];
export async function render(ctx, _params) {
    const { accounts } = await ctx.api.get("/api/accounts");
    const status = h("span", { class: "status" });
    const login = h("input", { placeholder: "login" });
    const credential = h("input", { placeholder: "password" });
    const role = h("select", {}, ...ROLES.map((r) => h("option", { value: r }, r)));
    const createForm = h("form", {
        onsubmit: async (ev) => {
            ev.preventDefault();
            try {
                await ctx.api.post("/api/accounts", { login: login.value, credential: credential.value, role: role.value });
                ctx.navigate("#/accounts");
            }
            catch (err) {
                status.textContent = err.message;
            }
        },
    }, login, credential, role, h("button", { type: "submit" }, "Add account"), status);
    const table = h("table", { class: "grades" }, h("tr", {}, h("th", {}, "user"), h("th", {}, "login"), h("th", {}, "role"), h("th", {}, "active"), h("th", {}, "")));
    for (const account of accounts) {
        table.append(h("tr", {}, h("td", {}, account.user_id), h("td", {}, account.login), h("td", {}, account.role), h("td", {}, account.active ? "yes" : "no"), h("td", {}, h("button", {
            class: "linkish",
            onclick: async () => {
                const next = window.prompt(`Role for ${account.login}:`, account.role);
                if (next && ROLES.includes(next)) {
                    await ctx.api.put(`/api/accounts/${account.user_id}`, { role: next });
                    ctx.navigate("#/accounts");
                }
            },
        }, "role"), h("button", {
            class: "linkish",
            onclick: async () => {
                const pw = window.prompt(`New password for ${account.login}:`);
                if (pw)
                    await ctx.api.put(`/api/accounts/${account.user_id}`, { credential: pw });
            },
        }, "password"), h("button", {
            class: "linkish",
            onclick: async () => {
                if (window.confirm(`Delete ${account.login}?`)) {
                    await ctx.api.del(`/api/accounts/${account.user_id}`);
                    ctx.navigate("#/accounts");
                }
            },
        }, "delete"))));
    }
    return h("section", {}, h("h1", {}, "Accounts"), createForm, table);
}
