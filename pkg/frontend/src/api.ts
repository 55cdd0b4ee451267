// Typed client for the platform API. The UI holds no state beyond the session
// token; every view rebuilds itself from these calls.

export interface Session {
  token: string;
  user_id: string;
  role: string;
  display_name: string;
}

export interface Diagnostic {
  file: string;
  line: number;
  col: number;
  severity: string;
  text: string;
  raw: string;
}

export interface PerTest {
  test_id: string;
  verdict: "PASS" | "FAIL" | "TLE" | "RTE";
  visible: boolean;
  expected_output?: string;
  actual_output?: string;
}

export interface JobResult {
  job_id: string;
  action: string;
  status: string;
  diagnostics: Diagnostic[];
  stdout: string;
  stderr: string;
  per_test: PerTest[] | null;
  feedback: { plugin: string; trigger: string; body: unknown }[];
  wall_ms: number;
  log_id: string | null;
}

export interface Snapshot {
  snapshot_id: number;
  assignment_key: string;
  code: string;
  stimulus: string;
  created_at: number;
  linked_log: string | null;
  deleted: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class Api {
  token: string | null = null;

  constructor(private base: string = "") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["X-Session-Token"] = this.token;
    const resp = await fetch(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    let parsed: any = {};
    try {
      parsed = text ? JSON.parse(text) : {};
    } catch {
      parsed = { error: text };
    }
    if (!resp.ok) throw new ApiError(resp.status, parsed.error ?? `HTTP ${resp.status}`);
    return parsed as T;
  }

  get<T>(path: string): Promise<T> {
    return this.call<T>("GET", path);
  }
  post<T>(path: string, body: unknown): Promise<T> {
    return this.call<T>("POST", path, body);
  }
  put<T>(path: string, body: unknown): Promise<T> {
    return this.call<T>("PUT", path, body);
  }
  del<T>(path: string): Promise<T> {
    return this.call<T>("DELETE", path);
  }

  // session ------------------------------------------------------------
  async login(login: string, credential: string): Promise<Session> {
    const session = await this.post<Session>("/api/login", { login, credential });
    this.token = session.token;
    return session;
  }
  async logout(): Promise<void> {
    await this.post("/api/logout", {});
    this.token = null;
  }
  me() {
    return this.get<{ user_id: string; role: string; display_name: string }>("/api/me");
  }
  home() {
    return this.get<{
      course_id: string;
      user_id: string;
      display_name: string;
      role: string;
      ongoing_events: { event_id: string; kind: string; title: string; problems: { problem_id: string; title: string }[] }[];
      autosave_period_s: number;
    }>("/api/home");
  }

  // editor ----------------------------------------------------------------
  editorContext(event: string, problem: string) {
    const q = `event=${encodeURIComponent(event)}&problem=${encodeURIComponent(problem)}`;
    return this.get<{
      problem_id: string;
      title: string;
      statement: string;
      template_code: string;
      code: string;
      submitted_snapshot_id: number | null;
    }>(`/api/editor/context?${q}`);
  }
  save(event: string, problem: string, code: string, stimulus: string) {
    return this.post<{ snapshot_id: number }>("/api/editor/save", { event, problem, code, stimulus });
  }
  engine(action: "compile" | "execute" | "evaluate", body: Record<string, unknown>) {
    return this.post<JobResult>(`/engine/${action}`, body);
  }
  history(user: string, event: string, problem: string) {
    const q = `user=${user}&event=${event}&problem=${problem}`;
    return this.get<{ snapshots: Snapshot[] }>(`/api/editor/history?${q}`);
  }
  submissions(event?: string, problem?: string) {
    const q = [event && `event=${event}`, problem && `problem=${problem}`].filter(Boolean).join("&");
    return this.get<{ submissions: any[] }>(`/api/submissions${q ? "?" + q : ""}`);
  }
  grade(user: string, event: string, problem: string, score: number, max_score: number, remarks: string) {
    return this.post("/api/editor/grade", { user, event, problem, score, max_score, remarks });
  }

  // analytics ----------------------------------------------------------------
  analytics(series: string, user: string, event: string, problem: string) {
    const q = `user=${user}&event=${event}&problem=${problem}`;
    return this.get<any>(`/api/analytics/${series}?${q}`);
  }
}

export function navItemsFor(role: string): { hash: string; label: string }[] {
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
