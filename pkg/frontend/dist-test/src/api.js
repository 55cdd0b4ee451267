// Typed client for the platform API. The UI holds no state beyond the session
// token; every view rebuilds itself from these calls.
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class Api {
    constructor(base = "") {
        this.base = base;
        this.token = null;
    }
    async call(method, path, body) {
        const headers = { "Content-Type": "application/json" };
        if (this.token)
            headers["X-Session-Token"] = this.token;
        const resp = await fetch(this.base + path, {
            method,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const text = await resp.text();
        let parsed = {};
        try {
            parsed = text ? JSON.parse(text) : {};
        }
        catch {
            parsed = { error: text };
        }
        if (!resp.ok)
            throw new ApiError(resp.status, parsed.error ?? `HTTP ${resp.status}`);
        return parsed;
    }
    get(path) {
        return this.call("GET", path);
    }
    post(path, body) {
        return this.call("POST", path, body);
    }
    put(path, body) {
        return this.call("PUT", path, body);
    }
    del(path) {
        return this.call("DELETE", path);
    }
    // session ------------------------------------------------------------
    async login(login, credential) {
        const session = await this.post("/api/login", { login, credential });
        this.token = session.token;
        return session;
    }
    async logout() {
        await this.post("/api/logout", {});
        this.token = null;
    }
    me() {
        return this.get("/api/me");
    }
    home() {
        return this.get("/api/home");
    }
    // editor ----------------------------------------------------------------
    editorContext(event, problem) {
        const q = `event=${encodeURIComponent(event)}&problem=${encodeURIComponent(problem)}`;
        return this.get(`/api/editor/context?${q}`);
    }
    save(event, problem, code, stimulus) {
        return this.post("/api/editor/save", { event, problem, code, stimulus });
    }
    engine(action, body) {
        return this.post(`/engine/${action}`, body);
    }
    history(user, event, problem) {
        const q = `user=${user}&event=${event}&problem=${problem}`;
        return this.get(`/api/editor/history?${q}`);
    }
    submissions(event, problem) {
        const q = [event && `event=${event}`, problem && `problem=${problem}`].filter(Boolean).join("&");
        return this.get(`/api/submissions${q ? "?" + q : ""}`);
    }
    grade(user, event, problem, score, max_score, remarks) {
        return this.post("/api/editor/grade", { user, event, problem, score, max_score, remarks });
    }
    // analytics ----------------------------------------------------------------
    analytics(series, user, event, problem) {
        const q = `user=${user}&event=${event}&problem=${problem}`;
        return this.get(`/api/analytics/${series}?${q}`);
    }
}
export function navItemsFor(role) {
    // navigation mirrors the server's permission floors: show exactly what the
    // role may reach, never more, never less
    const student = [
        { hash: "#/home", label: "Home" },
        { hash: "#/practice", label: "Practice arena" },
        { hash: "#/scratchpad", label: "Scratchpad" },
        { hash: "#/codebook", label: "Codebook" },
        { hash: "#/gradecard", label: "Grades" },
        { hash: "#/pager", label: "Pager" },
    ];
    const ta = [
        ...student,
        { hash: "#/submissions", label: "Submissions" },
        { hash: "#/tasks", label: "Tasks" },
    ];
    const tutor = [...ta, { hash: "#/problems", label: "Problems" }];
    const teacher = [
        ...tutor,
        { hash: "#/events", label: "Events" },
        { hash: "#/accounts", label: "Accounts" },
        { hash: "#/control", label: "Control panel" },
    ];
    switch (role) {
        case "STUDENT":
            return student;
        case "TA":
            return ta;
        case "TUTOR":
            return tutor;
        case "TEACHER":
            return teacher;
        default:
            return [];
    }
}
