from __future__ import annotations

import time

import pytest

from tutorkernel.common.util import now_ms
from tutorkernel.engine.corpus import seed_corpus

HOUR = 3600_000


@pytest.fixture(scope="module")
def cluster():
    from tutorkernel.cluster import LocalCluster

    c = LocalCluster(webapps=1, engines=1, store_replicas=1, cache_shards=2,
                     config_poll_s=0.3).start()
    c.seed(students=8, tas=3, tutors=2)
    seed_corpus(c.store_client())
    yield c
    c.stop()


@pytest.fixture(scope="module")
def tokens(cluster):
    return {
        "teacher": cluster.login("teacher1"),
        "tutor": cluster.login("tutor01"),
        "ta": cluster.login("ta01"),
        "student": cluster.login("s001"),
        "student2": cluster.login("s002"),
    }


def _make_event(cluster, token, kind="LAB", problems=("p-sum",), students=None,
                start_delta=-HOUR, end_delta=HOUR):
    status, event = cluster.api("POST", "/api/events", token, {"kind": kind, "title": f"{kind} x"})
    assert status == 201, event
    eid = event["event_id"]
    now = now_ms()
    status, _ = cluster.api("POST", f"/api/events/{eid}/schedules", token,
                            {"start": now + start_delta, "end": now + end_delta})
    assert status == 201
    status, body = cluster.api("POST", f"/api/events/{eid}/assign", token,
                               {"strategy": "SAME_FOR_ALL", "problem_ids": list(problems),
                                "seed": 1, "students": students or ["u-s001", "u-s002"]})
    assert status == 200, body
    return eid


class TestAuth:
    def test_login_yields_working_token(self, cluster):
        token = cluster.login("s003")
        status, body = cluster.api("GET", "/api/me", token)
        assert status == 200 and body["user_id"] == "u-s003"

    def test_bad_credential_and_unknown_user_indistinguishable(self, cluster):
        s1, b1 = cluster.api("POST", "/api/login", body={"login": "s001", "credential": "wrong"})
        s2, b2 = cluster.api("POST", "/api/login", body={"login": "ghost", "credential": "x"})
        assert s1 == s2 == 401
        assert b1 == b2

    def test_logout_invalidates_token(self, cluster):
        token = cluster.login("s004")
        cluster.api("POST", "/api/logout", token)
        status, _ = cluster.api("GET", "/api/me", token)
        assert status == 401

    def test_every_protected_route_needs_a_session(self, cluster):
        status, _ = cluster.api("GET", "/api/home")
        assert status == 401

    def test_administrator_cannot_use_web_interface(self, cluster):
        status, _ = cluster.api("POST", "/api/login",
                                body={"login": "admin", "credential": "admin"})
        assert status == 403


class TestSaveAndHistory:
    def test_saves_accumulate_in_order(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        for iatx, stim in enumerate(["MANUAL_SAVE", "COMPILE"]):
            status, body = cluster.api("POST", "/api/editor/save", tokens["student"],
                                       {"event": eid, "problem": "p-sum",
                                        "code": f"# v{iatx}\n", "stimulus": stim})
            assert status == 200, body
        status, hist = cluster.api(
            "GET", f"/api/editor/history?user=u-s001&event={eid}&problem=p-sum", tokens["ta"])
        snaps = hist["snapshots"]
        assert [s["stimulus"] for s in snaps] == ["MANUAL_SAVE", "COMPILE"]
        assert snaps[0]["snapshot_id"] < snaps[1]["snapshot_id"]
        assert snaps[0]["created_at"] < snaps[1]["created_at"]

    def test_save_outside_schedule_window_forbidden(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"], start_delta=-2 * HOUR, end_delta=-HOUR)
        status, body = cluster.api("POST", "/api/editor/save", tokens["student"],
                                   {"event": eid, "problem": "p-sum", "code": "x"})
        assert status == 403

    def test_unassigned_problem_forbidden(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"], problems=("p-sum",))
        status, _ = cluster.api("POST", "/api/editor/save", tokens["student"],
                                {"event": eid, "problem": "p-max", "code": "x"})
        assert status == 403

    def test_oversized_code_rejected(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        status, _ = cluster.api("POST", "/api/editor/save", tokens["student"],
                                {"event": eid, "problem": "p-sum", "code": "x" * (257 << 10)})
        assert status == 413

    def test_practice_saves_allowed_anytime(self, cluster, tokens):
        status, body = cluster.api("POST", "/api/editor/save", tokens["student"],
                                   {"problem": "p-echo", "code": "print(input())\n"})
        assert status == 200, body

    def test_second_submit_supersedes_graded_mark(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        ids = []
        for i in range(2):
            status, body = cluster.api("POST", "/api/editor/save", tokens["student"],
                                       {"event": eid, "problem": "p-sum",
                                        "code": f"# submit {i}\n", "stimulus": "SUBMIT"})
            ids.append(body["snapshot_id"])
        status, sub = cluster.api(
            "GET", f"/api/editor/submission?user=u-s001&event={eid}&problem=p-sum", tokens["ta"])
        assert sub["snapshot"]["snapshot_id"] == ids[-1]  # at most one graded mark

    def test_teacher_tombstone_preserves_ids(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        _, first = cluster.api("POST", "/api/editor/save", tokens["student"],
                               {"event": eid, "problem": "p-sum", "code": "secret\n"})
        _, second = cluster.api("POST", "/api/editor/save", tokens["student"],
                                {"event": eid, "problem": "p-sum", "code": "v2\n"})
        status, _ = cluster.api("DELETE", f"/api/editor/snapshots/{first['snapshot_id']}",
                                tokens["teacher"])
        assert status == 200
        _, hist = cluster.api(
            "GET", f"/api/editor/history?user=u-s001&event={eid}&problem=p-sum", tokens["ta"])
        snaps = hist["snapshots"]
        assert [s["snapshot_id"] for s in snaps] == [first["snapshot_id"], second["snapshot_id"]]
        assert snaps[0]["deleted"] and snaps[0]["code"] == ""
        status, _ = cluster.api("DELETE", f"/api/editor/snapshots/{second['snapshot_id']}",
                                tokens["ta"])
        assert status == 403  # tombstoning is teacher-only


class TestGrading:
    def _submitted(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        cluster.api("POST", "/api/editor/save", tokens["student"],
                    {"event": eid, "problem": "p-sum", "code": "print(1)\n", "stimulus": "SUBMIT"})
        return eid

    def test_grade_recorded_and_visible_on_gradecard(self, cluster, tokens):
        eid = self._submitted(cluster, tokens)
        status, grade = cluster.api("POST", "/api/editor/grade", tokens["ta"],
                                    {"user": "u-s001", "event": eid, "problem": "p-sum",
                                     "score": 8, "max_score": 10, "remarks": "solid"})
        assert status == 200 and grade["grader"] == "u-ta01"
        status, card = cluster.api("GET", "/api/gradecard", tokens["student"])
        entry = card["grades_by_event"][eid][0]
        assert (entry["score"], entry["max_score"]) == (8, 10)

    def test_grading_unsubmitted_assignment_conflicts(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        status, _ = cluster.api("POST", "/api/editor/grade", tokens["ta"],
                                {"user": "u-s001", "event": eid, "problem": "p-sum",
                                 "score": 5, "max_score": 10})
        assert status == 409

    def test_score_beyond_max_rejected(self, cluster, tokens):
        eid = self._submitted(cluster, tokens)
        status, _ = cluster.api("POST", "/api/editor/grade", tokens["ta"],
                                {"user": "u-s001", "event": eid, "problem": "p-sum",
                                 "score": 11, "max_score": 10})
        assert status == 400

    def test_tasks_flow_pending_to_complete(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"], students=["u-s001", "u-s002"])
        for student in ("s001", "s002"):
            token = cluster.login(student)
            cluster.api("POST", "/api/editor/save", token,
                        {"event": eid, "problem": "p-sum", "code": "x", "stimulus": "SUBMIT"})
        status, body = cluster.api("POST", f"/api/events/{eid}/assign-graders",
                                   tokens["teacher"], {"graders": ["u-ta02"]})
        assert body["created"] == 2
        ta2 = cluster.login("ta02")
        _, tasks = cluster.api("GET", "/api/tasks", ta2)
        assert len(tasks["pending"]) == 2 and len(tasks["complete"]) == 0
        cluster.api("POST", "/api/editor/grade", ta2,
                    {"user": "u-s001", "event": eid, "problem": "p-sum",
                     "score": 9, "max_score": 10})
        _, tasks = cluster.api("GET", "/api/tasks", ta2)
        assert len(tasks["pending"]) == 1 and len(tasks["complete"]) == 1
        _, overall = cluster.api("GET", "/api/tasks/overall", tokens["ta"])
        mine = overall["by_grader"]["u-ta02"][eid]
        assert len(mine["pending"]) + len(mine["complete"]) == 2


class TestExamLockdownRoutes:
    def test_ta_locked_out_while_exam_open_tutor_not(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"], kind="EXAM")
        cluster.api("POST", "/api/editor/save", tokens["student"],
                    {"event": eid, "problem": "p-sum", "code": "x", "stimulus": "SUBMIT"})
        path = f"/api/editor/history?user=u-s001&event={eid}&problem=p-sum"
        status, _ = cluster.api("GET", path, tokens["ta"])
        assert status == 403
        status, _ = cluster.api("GET", path, tokens["tutor"])
        assert status == 200

    def test_ta_allowed_after_exam_ends(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"], kind="EXAM",
                          start_delta=-2 * HOUR, end_delta=-HOUR)
        status, _ = cluster.api(
            "GET", f"/api/editor/history?user=u-s001&event={eid}&problem=p-sum", tokens["ta"])
        assert status == 200

    def test_lab_never_locks_tas(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"], kind="LAB")
        status, _ = cluster.api(
            "GET", f"/api/editor/history?user=u-s001&event={eid}&problem=p-sum", tokens["ta"])
        assert status == 200


class TestProblems:
    def test_tutor_creates_ta_adds_tests(self, cluster, tokens):
        status, problem = cluster.api("POST", "/api/problems", tokens["tutor"],
                                      {"title": "New", "statement": "do it"})
        assert status == 201
        pid = problem["problem_id"]
        for i in range(3):
            status, _ = cluster.api("POST", f"/api/problems/{pid}/tests", tokens["ta"],
                                    {"input": f"{i}\n", "expected_output": f"{i}\n"})
            assert status == 201
        _, tests = cluster.api("GET", f"/api/problems/{pid}/tests", tokens["ta"])
        assert len(tests["tests"]) == 3

    def test_ta_cannot_create_problems(self, cluster, tokens):
        status, _ = cluster.api("POST", "/api/problems", tokens["ta"], {"title": "Nope"})
        assert status == 403

    def test_bulk_test_upload(self, cluster, tokens):
        _, problem = cluster.api("POST", "/api/problems", tokens["tutor"], {"title": "Bulk"})
        pid = problem["problem_id"]
        batch = [{"input": f"{i}", "expected_output": f"{i}"} for i in range(5)]
        status, body = cluster.api("POST", f"/api/problems/{pid}/tests/bulk", tokens["ta"],
                                   {"tests": batch})
        assert status == 201 and len(body["created"]) == 5

    def test_edits_visible_immediately(self, cluster, tokens):
        _, problem = cluster.api("POST", "/api/problems", tokens["tutor"], {"title": "Old"})
        pid = problem["problem_id"]
        cluster.api("PUT", f"/api/problems/{pid}", tokens["tutor"], {"statement": "fresh words"})
        _, seen = cluster.api("GET", f"/api/problems/{pid}", tokens["ta"])
        assert seen["statement"] == "fresh words"

    def test_students_never_see_solutions(self, cluster, tokens):
        _, problem = cluster.api("GET", "/api/problems/p-echo", tokens["student"])
        assert "solution_code" not in problem
        _, full = cluster.api("GET", "/api/problems/p-echo", tokens["ta"])
        assert full["solution_code"]

    def test_delete_refused_while_open_event_references(self, cluster, tokens):
        _, problem = cluster.api("POST", "/api/problems", tokens["tutor"], {"title": "Ref"})
        pid = problem["problem_id"]
        _make_event(cluster, tokens["teacher"], problems=(pid,))
        status, _ = cluster.api("DELETE", f"/api/problems/{pid}", tokens["tutor"])
        assert status == 409


class TestEvents:
    def test_create_with_two_schedules_lists_both(self, cluster, tokens):
        _, event = cluster.api("POST", "/api/events", tokens["teacher"],
                               {"kind": "LAB", "title": "L"})
        eid = event["event_id"]
        now = now_ms()
        for offset in (0, 2 * HOUR):
            cluster.api("POST", f"/api/events/{eid}/schedules", tokens["teacher"],
                        {"start": now + offset, "end": now + offset + HOUR})
        _, events = cluster.api("GET", "/api/events", tokens["teacher"])
        mine = next(e for e in events["events"] if e["event_id"] == eid)
        assert len(mine["schedules"]) == 2

    def test_tutor_cannot_create_events(self, cluster, tokens):
        status, _ = cluster.api("POST", "/api/events", tokens["tutor"],
                                {"kind": "LAB", "title": "nope"})
        assert status == 403

    def test_delete_event_with_grades_conflicts(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        cluster.api("POST", "/api/editor/save", tokens["student"],
                    {"event": eid, "problem": "p-sum", "code": "x", "stimulus": "SUBMIT"})
        cluster.api("POST", "/api/editor/grade", tokens["tutor"],
                    {"user": "u-s001", "event": eid, "problem": "p-sum",
                     "score": 1, "max_score": 10})
        status, _ = cluster.api("DELETE", f"/api/events/{eid}", tokens["teacher"])
        assert status == 409

    def test_slots_must_be_enrolled_students(self, cluster, tokens):
        _, event = cluster.api("POST", "/api/events", tokens["teacher"],
                               {"kind": "QUIZ", "title": "Q"})
        eid = event["event_id"]
        now = now_ms()
        _, body = cluster.api("POST", f"/api/events/{eid}/schedules", tokens["teacher"],
                              {"start": now, "end": now + HOUR, "schedule_id": "sch-x"})
        status, _ = cluster.api("POST", f"/api/events/{eid}/schedules/sch-x/slots",
                                tokens["teacher"], {"slot_members": ["u-ghost"]})
        assert status == 400


class TestScratchpad:
    def test_tree_round_trip(self, cluster):
        token = cluster.login("s005")
        _, folder = cluster.api("POST", "/api/scratchpad/nodes", token,
                                {"kind": "FOLDER", "name": "proj"})
        _, file = cluster.api("POST", "/api/scratchpad/nodes", token,
                              {"kind": "FILE", "name": "main.py", "parent": folder["node_id"]})
        cluster.api("PUT", f"/api/scratchpad/nodes/{file['node_id']}", token,
                    {"content": "print('hi')\n"})
        _, tree = cluster.api("GET", "/api/scratchpad/tree", token)
        by_name = {n["name"]: n for n in tree["nodes"]}
        assert by_name["main.py"]["content"] == "print('hi')\n"
        assert by_name["main.py"]["parent"] == folder["node_id"]

    def test_cycle_move_rejected(self, cluster):
        token = cluster.login("s006")
        _, outer = cluster.api("POST", "/api/scratchpad/nodes", token,
                               {"kind": "FOLDER", "name": "outer"})
        _, inner = cluster.api("POST", "/api/scratchpad/nodes", token,
                               {"kind": "FOLDER", "name": "inner", "parent": outer["node_id"]})
        status, _ = cluster.api("POST", f"/api/scratchpad/nodes/{outer['node_id']}/move",
                                token, {"parent": inner["node_id"]})
        assert status == 409

    def test_delete_nonempty_folder_conflicts(self, cluster):
        token = cluster.login("s007")
        _, folder = cluster.api("POST", "/api/scratchpad/nodes", token,
                                {"kind": "FOLDER", "name": "full"})
        cluster.api("POST", "/api/scratchpad/nodes", token,
                    {"kind": "FILE", "name": "f.py", "parent": folder["node_id"]})
        status, _ = cluster.api("DELETE", f"/api/scratchpad/nodes/{folder['node_id']}", token)
        assert status == 409

    def test_duplicate_names_in_folder_conflict(self, cluster):
        token = cluster.login("s008")
        cluster.api("POST", "/api/scratchpad/nodes", token, {"kind": "FILE", "name": "dup.py"})
        status, _ = cluster.api("POST", "/api/scratchpad/nodes", token,
                                {"kind": "FILE", "name": "dup.py"})
        assert status == 409

    def test_scratchpad_run_produces_no_log_rows(self, cluster, tokens):
        store = cluster.store_client()
        token = cluster.login("s005")
        _, node = cluster.api("POST", "/api/scratchpad/nodes", token,
                              {"kind": "FILE", "name": "run.py", "content": "print(2+2)\n"})
        before = len(store.scan("logs"))
        status, res = cluster.api("POST", "/api/scratchpad/run", token,
                                  {"node_id": node["node_id"], "action": "execute"}, timeout=60)
        assert status == 200 and res["stdout"] == "4\n"
        assert len(store.scan("logs")) == before  # no course log rows

    def test_owner_only(self, cluster, tokens):
        token = cluster.login("s005")
        _, node = cluster.api("POST", "/api/scratchpad/nodes", token,
                              {"kind": "FILE", "name": "mine.py"})
        status, _ = cluster.api("DELETE", f"/api/scratchpad/nodes/{node['node_id']}",
                                tokens["student2"])
        assert status == 403


class TestPagerRoutes:
    def test_student_opens_ta_replies_teacher_sees(self, cluster, tokens):
        status, thread = cluster.api("POST", "/api/pager/threads", tokens["student"],
                                     {"text": "stuck on p-sum"})
        assert status == 201
        tid = thread["thread_id"]
        status, _ = cluster.api("POST", f"/api/pager/threads/{tid}/replies", tokens["ta"],
                                {"text": "check your loop"})
        assert status == 200
        _, listing = cluster.api("GET", "/api/pager/threads", tokens["teacher"])
        assert any(t["thread_id"] == tid and len(t["messages"]) == 2 for t in listing["threads"])

    def test_ta_cannot_open_thread(self, cluster, tokens):
        status, _ = cluster.api("POST", "/api/pager/threads", tokens["ta"], {"text": "hi"})
        assert status == 403

    def test_students_see_only_their_threads(self, cluster, tokens):
        _, thread = cluster.api("POST", "/api/pager/threads", tokens["student"], {"text": "mine"})
        _, listing = cluster.api("GET", "/api/pager/threads", tokens["student2"])
        assert all(t["thread_id"] != thread["thread_id"] for t in listing["threads"])


class TestControlPanel:
    def test_non_numeric_quota_rejected(self, cluster, tokens):
        status, _ = cluster.api("PUT", "/api/control/config", tokens["teacher"],
                                {"time_quota_ms": "fast"})
        assert status == 400

    def test_engines_observe_config_within_poll_interval(self, cluster, tokens):
        status, _ = cluster.api("PUT", "/api/control/config", tokens["teacher"],
                                {"max_concurrent": 7})
        assert status == 200
        engine = next(iter(cluster.engines.values()))
        deadline = time.monotonic() + 3
        while time.monotonic() < deadline:
            if engine.config.max_concurrent == 7:
                break
            time.sleep(0.05)
        assert engine.config.max_concurrent == 7

    def test_logging_toggle_stops_new_rows(self, cluster, tokens):
        store = cluster.store_client()
        eid = _make_event(cluster, tokens["teacher"])
        cluster.api("PUT", "/api/control/config", tokens["teacher"],
                    {"logging_enabled": {"compile": False, "execute": True, "evaluate": True}})
        time.sleep(0.7)  # one engine poll
        before = len(store.scan("logs"))
        cluster.api("POST", "/engine/compile", tokens["student"],
                    {"code": "print(1)\n",
                     "context": {"kind": "course", "event_id": eid, "problem_id": "p-sum"}},
                    timeout=60)
        assert len(store.scan("logs")) == before
        cluster.api("PUT", "/api/control/config", tokens["teacher"],
                    {"logging_enabled": {"compile": True, "execute": True, "evaluate": True}})
        time.sleep(0.7)

    def test_ta_cannot_touch_control_panel(self, cluster, tokens):
        status, _ = cluster.api("GET", "/api/control/config", tokens["ta"])
        assert status == 403


class TestAccounts:
    def test_promote_ta_to_tutor_takes_effect_next_check(self, cluster, tokens):
        _, created = cluster.api("POST", "/api/accounts", tokens["teacher"],
                                 {"login": "upgrade-me", "credential": "pw", "role": "TA"})
        token = cluster.login("upgrade-me", "pw")
        status, _ = cluster.api("POST", "/api/problems", token, {"title": "denied"})
        assert status == 403
        cluster.api("PUT", f"/api/accounts/{created['user_id']}", tokens["teacher"],
                    {"role": "TUTOR"})
        status, _ = cluster.api("POST", "/api/problems", token, {"title": "now allowed"})
        assert status == 201

    def test_deleted_account_cannot_login_or_use_session(self, cluster, tokens):
        _, created = cluster.api("POST", "/api/accounts", tokens["teacher"],
                                 {"login": "doomed", "credential": "pw", "role": "STUDENT"})
        token = cluster.login("doomed", "pw")
        cluster.api("DELETE", f"/api/accounts/{created['user_id']}", tokens["teacher"])
        assert cluster.api("GET", "/api/home", token)[0] == 401
        assert cluster.api("POST", "/api/login",
                           body={"login": "doomed", "credential": "pw"})[0] == 401

    def test_password_change_invalidates_existing_sessions(self, cluster, tokens):
        _, created = cluster.api("POST", "/api/accounts", tokens["teacher"],
                                 {"login": "rotated", "credential": "old", "role": "STUDENT"})
        token = cluster.login("rotated", "old")
        cluster.api("PUT", f"/api/accounts/{created['user_id']}", tokens["teacher"],
                    {"credential": "new"})
        assert cluster.api("GET", "/api/home", token)[0] == 401
        assert cluster.login("rotated", "new")

    def test_self_delete_refused(self, cluster, tokens):
        status, _ = cluster.api("DELETE", "/api/accounts/u-teacher1", tokens["teacher"])
        assert status == 409

    def test_duplicate_login_conflicts(self, cluster, tokens):
        status, _ = cluster.api("POST", "/api/accounts", tokens["teacher"],
                                {"login": "s001", "credential": "x", "role": "STUDENT"})
        assert status == 409

    def test_account_creation_writes_outbox_mail(self, cluster, tokens):
        store = cluster.store_client()
        before = len(store.scan("outbox"))
        cluster.api("POST", "/api/accounts", tokens["teacher"],
                    {"login": "mailed", "credential": "x", "role": "STUDENT"})
        assert len(store.scan("outbox")) == before + 1


class TestAdminEditor:
    def _submission(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"])
        cluster.api("POST", "/api/editor/save", tokens["student"],
                    {"event": eid, "problem": "p-sum",
                     "code": "a, b = map(int, input().split())\nprint(a + b)\n",
                     "stimulus": "SUBMIT"})
        return eid

    def test_copy_edit_evaluate_leaves_history_untouched(self, cluster, tokens):
        eid = self._submission(cluster, tokens)
        _, copy = cluster.api("POST", "/api/admin-editor/sessions", tokens["ta"],
                              {"user": "u-s001", "event": eid, "problem": "p-sum"})
        cluster.api("PUT", f"/api/admin-editor/{copy['copy_id']}", tokens["ta"],
                    {"code": "print('probe')\n"})
        status, res = cluster.api("POST", f"/api/admin-editor/{copy['copy_id']}/run",
                                  tokens["ta"], {"action": "execute"}, timeout=60)
        assert status == 200 and res["stdout"] == "probe\n"
        _, hist = cluster.api(
            "GET", f"/api/editor/history?user=u-s001&event={eid}&problem=p-sum", tokens["ta"])
        assert all(s["code"] != "print('probe')\n" for s in hist["snapshots"])

    def test_close_destroys_copy(self, cluster, tokens):
        eid = self._submission(cluster, tokens)
        _, copy = cluster.api("POST", "/api/admin-editor/sessions", tokens["ta"],
                              {"user": "u-s001", "event": eid, "problem": "p-sum"})
        cluster.api("DELETE", f"/api/admin-editor/{copy['copy_id']}", tokens["ta"])
        status, _ = cluster.api("GET", f"/api/admin-editor/{copy['copy_id']}", tokens["ta"])
        assert status == 404

    def test_two_admins_get_independent_copies(self, cluster, tokens):
        eid = self._submission(cluster, tokens)
        copies = []
        for who in ("ta", "tutor"):
            _, copy = cluster.api("POST", "/api/admin-editor/sessions", tokens[who],
                                  {"user": "u-s001", "event": eid, "problem": "p-sum"})
            copies.append(copy["copy_id"])
        cluster.api("PUT", f"/api/admin-editor/{copies[0]}", tokens["ta"], {"code": "changed"})
        _, other = cluster.api("GET", f"/api/admin-editor/{copies[1]}", tokens["tutor"])
        assert other["code"] != "changed"


class TestStudentViews:
    def test_no_open_event_means_empty_summary(self, cluster, tokens):
        token = cluster.login("s008")  # never assigned anything
        _, home = cluster.api("GET", "/api/home", token)
        assert home["ongoing_events"] == []
        assert home["autosave_period_s"] > 0

    def test_codebook_shows_last_practice_save(self, cluster, tokens):
        token = cluster.login("s007")
        for code in ("print(1)\n", "print(2)\n"):
            cluster.api("POST", "/api/editor/save", token,
                        {"problem": "p-echo", "code": code})
        _, entry = cluster.api("GET", "/api/codebook/entry?problem=p-echo", token)
        assert entry["code"] == "print(2)\n"

    def test_practice_arena_lists_marked_problems(self, cluster, tokens):
        _, arena = cluster.api("GET", "/api/practice", tokens["student"])
        ids = [p["problem_id"] for p in arena["problems"]]
        assert "p-echo" in ids and "p-sum" in ids

    def test_students_never_see_others_assignments(self, cluster, tokens):
        eid = _make_event(cluster, tokens["teacher"], students=["u-s001"])
        status, _ = cluster.api(
            "GET", f"/api/editor/history?user=u-s001&event={eid}&problem=p-sum",
            tokens["student2"])
        assert status == 403
        _, events = cluster.api("GET", "/api/events", tokens["student2"])
        assert all(e["event_id"] != eid for e in events["events"])
