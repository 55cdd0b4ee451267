#!/usr/bin/env python3
"""Seed a running deployment with the reference course fixture:
1 teacher, 12 tutors, 48 TAs, 450 students, the problem corpus, and the
default rephrase rules. Point it at the registry of a deployed system.

    python scripts/seed_course.py --registry 127.0.0.1:8500
"""
from __future__ import annotations

import argparse

from tutorkernel.engine.corpus import seed_corpus
from tutorkernel.model.fixture import seed_accounts
from tutorkernel.plugins.rephrase import seed_default_rules
from tutorkernel.registry.client import RegistryClient
from tutorkernel.store.client import StoreClient


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--registry", default="127.0.0.1:8500")
    parser.add_argument("--students", type=int, default=450)
    args = parser.parse_args()
    host, port = args.registry.rsplit(":", 1)
    registry = RegistryClient(host, int(port))
    proxies = registry.passing_instances("STORE_PROXY")
    if not proxies:
        print("no store proxy registered; deploy first")
        return 1
    store = StoreClient(proxies[0]["address"]["host"], proxies[0]["address"]["port"])
    accounts = seed_accounts(students=args.students)
    for account in accounts:
        store.write("accounts", account.user_id, account.to_row())
    seed_corpus(store)
    seed_default_rules(store)
    print(f"seeded {len(accounts)} accounts, the problem corpus, and rephrase rules")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
