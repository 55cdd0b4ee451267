from __future__ import annotations

import threading

import pytest

from tutorkernel.store.client import StoreClient
from tutorkernel.store.errors import NotFound, StoreUnavailable
from tutorkernel.store.proxy import StoreProxy
from tutorkernel.store.replica import StoreReplica
from tutorkernel.store.tables import TableSet


class TestTableSet:
    def test_versions_increment_by_one(self):
        t = TableSet()
        assert t.write("a", "k", 1) == 1
        assert t.write("a", "k", 2) == 2
        t.delete("a", "k")
        assert t.write("a", "k", 3) == 3  # version sequence survives deletion

    def test_payload_round_trip(self):
        t = TableSet()
        payload = {"nested": {"x": [1, 2, 3]}, "text": "héllo\n"}
        t.write("a", "k", payload)
        assert t.read("a", "k")["payload"] == payload

    def test_indexed_scan_matches_linear_scan(self):
        t = TableSet()
        for i in range(20):
            t.write("snapshots", f"s{i:02d}", {"assignment_key": f"ak{i % 3}", "n": i})
        fast = t.scan("snapshots", "assignment_key", "ak1")
        slow = [r for r in t.scan("snapshots") if r["payload"]["assignment_key"] == "ak1"]
        assert fast == slow and len(fast) == 7

    def test_journal_replay(self, tmp_path):
        path = str(tmp_path / "journal.jsonl")
        t = TableSet(path)
        t.write("a", "k1", {"v": 1})
        t.write("a", "k2", {"v": 2})
        t.delete("a", "k1")
        t.close()
        reborn = TableSet(path)
        assert reborn.read("a", "k1") is None
        assert reborn.read("a", "k2")["payload"] == {"v": 2}
        assert reborn.write("a", "k1", {"v": 9}) == 2  # version memory replayed too


class TestWrites:
    def test_write_lands_on_all_replicas(self, store_trio):
        replicas, _, client = store_trio
        version = client.write("t", "k", {"v": 1})
        assert version == 1
        for r in replicas:
            assert r.tables.read("t", "k")["payload"] == {"v": 1}

    def test_write_with_zero_replicas_unavailable(self):
        proxy = StoreProxy()
        proxy.start()
        client = StoreClient(proxy.server.host, proxy.server.port)
        with pytest.raises(StoreUnavailable):
            client.write("t", "k", 1)
        proxy.stop()

    def test_mid_batch_replica_kill_keeps_acknowledged_writes(self, store_trio):
        replicas, proxy, client = store_trio
        acknowledged = []
        for i in range(100):
            if i == 50:
                replicas[1].kill()
            client.write("t", f"k{i:03d}", {"i": i})
            acknowledged.append(f"k{i:03d}")
        survivors = [replicas[0], replicas[2]]
        for key in acknowledged:
            for replica in survivors:
                assert replica.tables.read("t", key) is not None, (key, replica.instance_id)

    def test_survivors_stay_byte_identical(self, store_trio):
        replicas, proxy, client = store_trio
        for i in range(60):
            if i == 30:
                replicas[0].kill()
            client.write("t", f"k{i}", i)
        checks = proxy.checksums()
        assert len(checks) == 2
        assert len({tuple(sorted(v.items())) for v in checks.values()}) == 1
        assert not proxy.divergence_alarm

    def test_bump_is_a_counter(self, store_trio):
        _, _, client = store_trio
        values = [client.bump("counters", "c") for _ in range(5)]
        assert values == [1, 2, 3, 4, 5]

    def test_concurrent_bumps_never_collide(self, store_trio):
        _, _, client = store_trio
        seen = []
        lock = threading.Lock()

        def worker():
            mine = [client.bump("counters", "c2") for _ in range(20)]
            with lock:
                seen.extend(mine)

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(seen) == list(range(1, 81))


class TestReads:
    def test_read_after_write(self, store_trio):
        _, _, client = store_trio
        client.write("t", "k", {"v": "x"})
        assert client.read("t", "k")["payload"] == {"v": "x"}

    def test_missing_key_not_found(self, store_trio):
        _, _, client = store_trio
        with pytest.raises(NotFound):
            client.read("t", "nope")

    def test_read_during_replica_outage(self, store_trio):
        replicas, _, client = store_trio
        client.write("t", "k", 42)
        replicas[0].kill()
        assert client.read("t", "k")["payload"] == 42

    def test_lockstep_reads_split_evenly(self):
        """1000 reads in dispatch/complete lockstep: counters alternate, so
        two idle replicas serve 500 each (tie-break drift at most 1)."""
        proxy = StoreProxy()
        for iid in ("r-a", "r-b"):
            proxy.add_replica(iid, "127.0.0.1", 1)  # selection only, no traffic
        counts = {"r-a": 0, "r-b": 0}
        held = []
        for _ in range(1000):
            link = proxy._acquire_read_link()
            counts[link.instance_id] += 1
            held.append(link)
            if len(held) == 2:
                proxy._release_read_link(held.pop())
                proxy._release_read_link(held.pop())
        assert abs(counts["r-a"] - counts["r-b"]) <= 1

    def test_select_backend_contract(self, store_trio):
        replicas, proxy, _ = store_trio
        assert proxy.select_backend() == min(r.instance_id for r in replicas)


class TestMembership:
    def _view(self, records):
        return [
            {"instance_id": iid, "health": health, "address": {"host": h, "port": p}}
            for iid, health, h, p in records
        ]

    def test_new_replica_joins_with_zero_connections(self, store_trio):
        replicas, proxy, client = store_trio
        extra = StoreReplica("st-extra")
        extra.start()
        view = self._view(
            [(r.instance_id, "PASSING", r.server.host, r.server.port) for r in replicas]
            + [("st-extra", "PASSING", extra.server.host, extra.server.port)]
        )
        proxy.apply_view(view)
        client.write("t", "k", 1)
        assert extra.tables.read("t", "k") is not None
        extra.stop()

    def test_failing_replica_excluded_on_rebuild(self, store_trio):
        replicas, proxy, client = store_trio
        view = self._view(
            [(replicas[0].instance_id, "FAILING", replicas[0].server.host, replicas[0].server.port)]
            + [(r.instance_id, "PASSING", r.server.host, r.server.port) for r in replicas[1:]]
        )
        proxy.apply_view(view)
        client.write("t", "k", 1)
        assert replicas[0].tables.read("t", "k") is None

    def test_empty_view_retains_list_and_flags_staleness(self, store_trio):
        replicas, proxy, client = store_trio
        proxy.apply_view([], stale=False)  # simulated registry outage
        assert proxy.stale_view
        client.write("t", "k", 1)  # previous list still serving
        assert client.read("t", "k")["payload"] == 1


class TestBackup:
    def test_dump_load_round_trip(self, store_trio, tmp_path):
        replicas, _, client = store_trio
        for i in range(10):
            client.write("snapshots", f"s{i}", {"assignment_key": "ak", "i": i})
        client.write("grades", "g", {"score": 9})
        client.dump_to_dir(str(tmp_path / "backup"))

        fresh = StoreReplica("fresh")
        fresh.start()
        proxy2 = StoreProxy()
        proxy2.start()
        proxy2.add_replica("fresh", fresh.server.host, fresh.server.port)
        client2 = StoreClient(proxy2.server.host, proxy2.server.port)
        client2.load_from_dir(str(tmp_path / "backup"))
        assert client2.scan("snapshots") == client.scan("snapshots")
        assert client2.read("grades", "g")["payload"] == {"score": 9}
        proxy2.stop()
        fresh.stop()

    def test_anti_entropy_then_reconcile(self, store_trio):
        replicas, proxy, client = store_trio
        client.write("t", "old", 1)
        joiner = StoreReplica("joiner")
        joiner.start()
        joiner.anti_entropy(replicas[0].server.host, replicas[0].server.port)
        assert joiner.tables.read("t", "old")["payload"] == 1
        client.write("t", "during-join", 2)  # lands on the original trio only
        adopted = joiner.reconcile(replicas[0].server.host, replicas[0].server.port)
        assert adopted >= 1
        assert joiner.tables.read("t", "during-join")["payload"] == 2
        joiner.stop()
