"""Acceptance gate: one PASS/FAIL line per criterion, with its time limit.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import json
import sys
import time
from pathlib import Path

import pytest

from relcalc import cor
from relcalc import harness as H
from relcalc import translations as tr
from relcalc.cli import main

from conftest import ACCEPTANCE_LINES

DATA = Path(__file__).parent / "data"
RESULTS: dict[int, bool] = {}


def report(number: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> bool:
    ok = ok and elapsed < limit
    RESULTS[number] = ok
    line = f"{'PASS' if ok else 'FAIL'} [{number:>2}] {title}: {detail} ({elapsed:.2f}s, limit {limit:.0f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def suite(name: str, samples: int, seed: int = 0) -> H.SuiteReport:
    return H.run_suite(name, H.GenConfig(seed=seed, sample_count=samples))


def test_01_fig1_golden(capsys):
    start = time.perf_counter()
    code = main(["ktuple", "-k", "2", "-m", str(DATA / "fig1.json")])
    out = capsys.readouterr().out
    same = code == 0 and out == (DATA / "fig1_k2.json").read_text()
    assert report(1, "two-tuple structure golden", same, time.perf_counter() - start, 1, "byte-for-byte")


def test_02_example_display():
    start = time.perf_counter()
    t = cor.parse_term("((b ; c)^c ; d)^c")
    res = tr.sigma2_pipeline(cor.Equation(t, cor.TOP))
    a = lambda s: cor.RelVar(res.env.name_of[cor.parse_term(s)])  # noqa: E731
    bc, nbc, nbcd, root = a("b ; c"), a("(b ; c)^c"), a("(b ; c)^c ; d"), a("((b ; c)^c ; d)^c")
    want = [
        cor.Inter(bc, cor.dagger(cor.Comp(a("b")), cor.Comp(a("c")))),
        cor.Inter(cor.Comp(bc), cor.Dot(a("b"), a("c"))),
        cor.Inter(nbc, bc),
        cor.Inter(cor.Comp(nbc), cor.Comp(bc)),
        cor.Inter(nbcd, cor.dagger(cor.Comp(nbc), cor.Comp(a("d")))),
        cor.Inter(cor.Comp(nbcd), cor.Dot(nbc, a("d"))),
        cor.Inter(root, nbcd),
        cor.Inter(cor.Comp(root), cor.Comp(nbcd)),
    ]
    found = sum(w in res.display for w in want)
    shape = bool(cor.check_sigma2(res.equation))
    ok = found == 8 and shape
    assert report(2, "Tseitin display terms", ok, time.perf_counter() - start, 1, f"{found}/8 terms, shape ok={shape}")


@pytest.mark.parametrize(
    "number, title, name, samples, seed, limit",
    [
        (3, "T^(k) pointwise", "lemma33", 500, 42, 120),
        (4, "finite direction of the translation", "lemma35", 300, 0, 120),
        (5, "Γ^(k) soundness", "gamma-sound", 200, 0, 60),
        (7, "Schröder-Tarski", "schroder", 300, 0, 60),
        (8, "standard translation", "standard", 300, 0, 60),
        (9, "Tseitin witness and validity", "tseitin", 200, 0, 300),
        (12, "Gödel class shape", "godel", 100, 0, 60),
    ],
)
def test_sampled_suites(number, title, name, samples, seed, limit):
    r = suite(name, samples, seed)
    ok = r.samples == samples and not r.failures
    assert report(number, title, ok, r.elapsed, limit, f"{r.samples} samples, {len(r.failures)} failures")


def test_06_micro_completeness():
    start = time.perf_counter()
    one = H.gamma_completeness_microscale(max_size=1)
    two = H.gamma_completeness_microscale(max_size=2)
    ok = one.ok and two.ok and two.checked == 2**5 + 2**20
    detail = f"{two.checked} structures, {two.models} models, {len(two.failures)} failures"
    assert report(6, "Γ^(1) completeness at size ≤ 2", ok, time.perf_counter() - start, 600, detail)


def test_10_three_variable_and_equality():
    fo3 = suite("fo3", 200)
    eq = suite("equality", 200)
    ok = not fo3.failures and not eq.failures and fo3.samples == eq.samples == 200
    detail = f"fo3 {len(fo3.failures)} failures, equality {len(eq.failures)} failures"
    assert report(10, "three-variable translation and equality", ok, fo3.elapsed + eq.elapsed, 180, detail)


def test_11_linearity(capsys):
    start = time.perf_counter()
    code = main(["size-report", "--json"])
    rows = json.loads(capsys.readouterr().out)["rows"]
    worst = {}
    for r in rows:
        worst[r["op"]] = max(worst.get(r["op"], 0.0), r["ratio"])
    largest = max(r["input_size"] for r in rows)
    ok = code == 0 and all(worst[op] <= H.LINEARITY_BOUNDS[op] for op in H.LINEARITY_BOUNDS) and largest >= 10_000
    detail = ", ".join(f"{op} {worst[op]:.2f}/{H.LINEARITY_BOUNDS[op]}" for op in sorted(worst))
    assert report(11, "linear size", ok, time.perf_counter() - start, 60, f"{detail}; largest input {largest}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
