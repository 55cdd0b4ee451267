"""Seeded problem corpus: ten problems, each with a model solution, three
buggy variants, and test cases. Used to seed demo courses and to pin the
judge against an independent runner.

Variant naming: "wrong" produces incorrect values on some inputs, "crash"
raises on some inputs, "loop" spins forever on some inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..model.records import Problem, TestCase


@dataclass
class CorpusProblem:
    problem_id: str
    title: str
    statement: str
    category: str
    solution: str
    variants: dict[str, str]
    tests: list[tuple[str, str]]  # (stdin, expected stdout)
    template: str = "# write your program here\n"

    def problem(self, practice: bool = False) -> Problem:
        return Problem(
            problem_id=self.problem_id,
            title=self.title,
            statement=self.statement,
            solution_code=self.solution,
            template_code=self.template,
            category=self.category,
            practice=practice,
        )

    def testcases(self, visible_first: int = 2) -> list[TestCase]:
        return [
            TestCase(
                test_id=f"{self.problem_id}-t{i}",
                problem_id=self.problem_id,
                input=stdin,
                expected_output=expected,
                visible=i < visible_first,
            )
            for i, (stdin, expected) in enumerate(self.tests)
        ]


CORPUS: list[CorpusProblem] = [
    CorpusProblem(
        "p-echo", "Echo", "Read one line and print it back.", "io",
        solution="print(input())\n",
        variants={
            "wrong": "print(input().upper())\n",
            "crash": "s = input()\nprint(s[99999])\n",
            "loop": "s = input()\nwhile s: pass\nprint(s)\n",
        },
        tests=[("hello\n", "hello\n"), ("42\n", "42\n"), ("a b c\n", "a b c\n")],
    ),
    CorpusProblem(
        "p-sum", "Sum of two", "Read two integers on one line; print their sum.", "arithmetic",
        solution="a, b = map(int, input().split())\nprint(a + b)\n",
        variants={
            "wrong": "a, b = map(int, input().split())\nprint(a - b)\n",
            "crash": "a, b = map(int, input().split())\nprint((a + b) // (a - b))\n",
            "loop": "a, b = map(int, input().split())\nwhile a != b: a = a\nprint(a + b)\n",
        },
        tests=[("2 3\n", "5\n"), ("10 10\n", "20\n"), ("-4 9\n", "5\n")],
    ),
    CorpusProblem(
        "p-max", "Maximum", "Read n, then n integers; print the maximum.", "lists",
        solution="n = int(input())\nxs = [int(input()) for _ in range(n)]\nprint(max(xs))\n",
        variants={
            "wrong": "n = int(input())\nxs = [int(input()) for _ in range(n)]\nprint(min(xs))\n",
            "crash": "n = int(input())\nxs = [int(input()) for _ in range(n + 1)]\nprint(max(xs))\n",
            "loop": "n = int(input())\nxs = [int(input()) for _ in range(n)]\nwhile n: n = n\nprint(max(xs))\n",
        },
        tests=[("3\n1\n5\n3\n", "5\n"), ("1\n-7\n", "-7\n"), ("4\n2\n2\n9\n2\n", "9\n")],
    ),
    CorpusProblem(
        "p-reverse", "Reverse", "Read one line; print it reversed.", "strings",
        solution="print(input()[::-1])\n",
        variants={
            "wrong": "print(input())\n",
            "crash": "s = input()\nprint(s[::-1] + s[len(s) * 2])\n",
            "loop": "s = input()\ni = 0\nwhile i < len(s): pass\nprint(s[::-1])\n",
        },
        tests=[("abc\n", "cba\n"), ("racecar\n", "racecar\n"), ("ab cd\n", "dc ba\n")],
    ),
    CorpusProblem(
        "p-vowels", "Count vowels", "Read one line; print how many vowels (aeiou) it contains.", "strings",
        solution="print(sum(1 for c in input().lower() if c in 'aeiou'))\n",
        variants={
            "wrong": "print(sum(1 for c in input() if c in 'aeiou'))\n",
            "crash": "s = input()\nprint(len(s) // s.count('z'))\n",
            "loop": "s = input()\nn = 0\nwhile s: n += 0\nprint(n)\n",
        },
        tests=[("Education\n", "5\n"), ("xyz\n", "0\n"), ("AEIOU\n", "5\n")],
    ),
    CorpusProblem(
        "p-fact", "Factorial", "Read n; print n factorial.", "arithmetic",
        solution="import math\nprint(math.factorial(int(input())))\n",
        variants={
            "wrong": "import math\nn = int(input())\nprint(math.factorial(n) if n else 0)\n",
            "crash": "import math\nprint(math.factorial(int(input()) - 10**6))\n",
            "loop": "n = int(input())\nr = 1\nwhile n > 0: r *= n\nprint(r)\n",
        },
        tests=[("5\n", "120\n"), ("0\n", "1\n"), ("10\n", "3628800\n")],
    ),
    CorpusProblem(
        "p-fib", "Fibonacci", "Read n; print the n-th Fibonacci number (F0=0, F1=1).", "recursion",
        solution="n = int(input())\na, b = 0, 1\nfor _ in range(n): a, b = b, a + b\nprint(a)\n",
        variants={
            "wrong": "n = int(input())\na, b = 1, 1\nfor _ in range(n): a, b = b, a + b\nprint(a)\n",
            "crash": "def f(n):\n    return f(n - 1) + f(n - 2)\nprint(f(int(input())))\n",
            "loop": "n = int(input())\na, b = 0, 1\nwhile n: a, b = b, a + b\nprint(a)\n",
        },
        tests=[("0\n", "0\n"), ("7\n", "13\n"), ("12\n", "144\n")],
    ),
    CorpusProblem(
        "p-sort", "Sort numbers", "Read n, then n integers; print them ascending, one per line.", "lists",
        solution="n = int(input())\nxs = sorted(int(input()) for _ in range(n))\nprint('\\n'.join(map(str, xs)))\n",
        variants={
            "wrong": "n = int(input())\nxs = sorted((int(input()) for _ in range(n)), reverse=True)\nprint('\\n'.join(map(str, xs)))\n",
            "crash": "n = int(input())\nxs = sorted(int(input()) for _ in range(n))\nprint(xs[n])\n",
            "loop": "n = int(input())\nxs = [int(input()) for _ in range(n)]\nwhile xs: xs = xs\nprint(0)\n",
        },
        tests=[("3\n3\n1\n2\n", "1\n2\n3\n"), ("1\n5\n", "5\n"), ("4\n9\n-1\n4\n0\n", "-1\n0\n4\n9\n")],
    ),
    CorpusProblem(
        "p-gcd", "Greatest common divisor", "Read two positive integers; print their gcd.", "arithmetic",
        solution="import math\na, b = map(int, input().split())\nprint(math.gcd(a, b))\n",
        variants={
            "wrong": "a, b = map(int, input().split())\nprint(min(a, b))\n",
            "crash": "a, b = map(int, input().split())\nwhile b: a, b = b, a % b\nprint(a // 0 if a == 1 else a)\n",
            "loop": "a, b = map(int, input().split())\nwhile b: a = b\nprint(a)\n",
        },
        tests=[("12 18\n", "6\n"), ("7 13\n", "1\n"), ("100 75\n", "25\n")],
    ),
    CorpusProblem(
        "p-words", "Word count", "Read one line; print the number of whitespace-separated words.", "strings",
        solution="print(len(input().split()))\n",
        variants={
            "wrong": "print(input().count(' ') + 1)\n",
            "crash": "words = input().split()\nprint(len(words) + words[9999].__len__())\n",
            "loop": "s = input()\nwhile s.split(): pass\nprint(0)\n",
        },
        tests=[("one two three\n", "3\n"), ("  spaced   out  \n", "2\n"), ("single\n", "1\n")],
    ),
]


def seed_corpus(store, practice_ids: tuple[str, ...] = ("p-echo", "p-sum")) -> None:
    """Write the corpus problems and test cases into the store."""
    for cp in CORPUS:
        store.write("problems", cp.problem_id, cp.problem(practice=cp.problem_id in practice_ids).to_row())
        for tc in cp.testcases():
            store.write("testcases", tc.test_id, tc.to_row())
