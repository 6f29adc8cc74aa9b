"""Acceptance criteria, one test per criterion.

Each test records a single ``[PASS]``/``[FAIL]`` line, printed together at the
end of the pytest run (see conftest.py). ``python tests/test_acceptance.py``
prints the same lines without pytest.
"""
from __future__ import annotations

import subprocess
import sys
import time
from fractions import Fraction
from math import factorial

import pytest

from permstat import guess as gv
from permstat.jointdist import f_table, h_table, netto_poly
from permstat.moments import all_tables, covariance_closed, mean_closed, variance_closed
from permstat.oracle import brute_joint_by_last

RESULTS: list[str] = []


def _record(number: int, title: str, passed: bool, detail: str) -> None:
    RESULTS.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})")


def criterion_1():
    t0 = time.perf_counter()
    bad = []
    for row in f_table(8):
        brute, visited = brute_joint_by_last(row.n, cap=8)
        h = brute[0]
        for poly in brute[1:]:
            h = h + poly
        if list(row.entries) != brute or row.total() != h or visited != factorial(row.n):
            bad.append(row.n)
    dt = time.perf_counter() - t0
    return not bad and dt < 60, f"mismatched n: {bad or 'none'}, {dt:.1f}s"


def criterion_2():
    t0 = time.perf_counter()
    bad = [
        h.n for h in h_table(30)
        if not h.payload.marginal("p") == netto_poly(h.n) == h.payload.marginal("q")
    ]
    dt = time.perf_counter() - t0
    return not bad and dt < 60, f"n <= 30, mismatched n: {bad or 'none'}, {dt:.1f}s"


def criterion_3():
    t0 = time.perf_counter()
    bad = []
    cov = []
    for t in all_tables(30, 2):
        cp = t.central_power
        if t.n <= 5:
            cov.append(cp[1][1])
        if t.n >= 2 and not (
            t.mean_inv == t.mean_maj == mean_closed(t.n)
            and cp[2][0] == cp[0][2] == variance_closed(t.n)
            and cp[1][1] == covariance_closed(t.n)
        ):
            bad.append(t.n)
    dt = time.perf_counter() - t0
    small_ok = cov == [0, Fraction(1, 4), Fraction(3, 4), Fraction(3, 2), Fraction(5, 2)]
    return not bad and small_ok and dt < 60, f"n = 2..30 mismatched: {bad or 'none'}, cov(1..5) = {[str(c) for c in cov]}, {dt:.1f}s"


def criterion_4():
    bad = [t.n for t in all_tables(30, 2) if t.n >= 2 and t.normalized[1][1] * (2 * t.n + 5) != 9]
    return not bad, f"n = 2..30 mismatched: {bad or 'none'}"


def criterion_5():
    bad = []
    for t in all_tables(20, 5):
        for a in range(6):
            for b in range(6):
                if (a + b) % 2 and t.central_power[a][b] != 0:
                    bad.append((t.n, a, b))
    return not bad, f"a, b <= 5, n <= 20, nonzero odd entries: {bad or 'none'}"


def criterion_6():
    src = gv.SnMoments(2)
    g = gv.guess_univariate(src.oracle("central_power", 1, 1), 4, 1)
    ok = (
        g.validated
        and g.coefficients == {(2,): Fraction(1, 8), (1,): Fraction(-1, 8)}
        and [p[0] for p in g.fit_points] == [1, 2, 3, 4, 5]
        and [p[0] for p in g.validation_points] == [6, 7, 8]
    )
    return ok, f"guess = {g}, status {g.status}, validated on n = 6..8"


def criterion_7():
    t0 = time.perf_counter()
    last = gv.LastEntryMoments(2)
    allsn = gv.SnMoments(3)
    failed = [f"FM({a},{b}) last" for a in range(3) for b in range(3) if not gv.leading_check(last, a, b).passed]
    failed += [f"FM({a},{b}) all" for a in range(4) for b in range(4) if not gv.leading_check(allsn, a, b).passed]
    dt = time.perf_counter() - t0
    return not failed and dt < 1800, f"25 checks, failed: {failed or 'none'}, {dt:.1f}s"


def criterion_8():
    ns = [20, 40, 60]
    rat = gv.finale_series(1, 1, ns, lambda n: -(-n // 2))
    ee = [x.even_even for x in rat]
    oo = [x.odd_odd for x in rat]
    ee_ok = abs(ee[-1] - 1) <= Fraction(1, 10) and all(abs(ee[k + 1] - 1) < abs(ee[k] - 1) for k in range(2))
    errs = gv.successive_slope_errors(oo, ns, 1)
    oo_ok = all(e <= 0.25 for e in errs)
    detail = (
        f"even-even {[round(float(x), 5) for x in ee]} {'ok' if ee_ok else 'FAIL'}; "
        f"odd-odd {[round(float(x), 5) for x in oo]}, 1/n slope errors {[round(e, 3) for e in errs]} "
        f"{'ok' if oo_ok else 'FAIL'} (limit 0.25)"
    )
    return ee_ok and oo_ok, detail


def criterion_9():
    t0 = time.perf_counter()
    src = gv.SnMoments(4)
    rows = gv.check_alpha_asymptotics(gv.EVEN_EVEN, [(1, 1), (2, 1), (1, 2), (2, 2)], (40, 50, 60), 1e-2,
                                      c0_tolerance=1e-3, exact=False, source=src)
    rows += gv.check_alpha_asymptotics(gv.ODD_ODD, [(1, 1)], (40, 50, 60), 1e-2, c2_tolerance=0.05,
                                       c0_tolerance=1e-3, exact=False, source=src)
    dt = time.perf_counter() - t0
    parts = []
    for row in rows:
        a, b = row.spec.orders
        errs = f"c0 {row.c0_rel_err:.2e}, c1 {row.c1_rel_err:.2e}"
        if row.c2_rel_err is not None:
            errs += f", c2 {row.c2_rel_err:.2e}"
        parts.append(f"alpha({a},{b}) {'ok' if row.fit_passed else 'FAIL'} [{errs}]")
    return all(r.fit_passed for r in rows) and dt < 600, "; ".join(parts) + f"; {dt:.1f}s"


DETERMINISM_COMMANDS = [
    ("dist", "--n", "6"),
    ("dist", "--n", "30", "--mode", "truncated", "--M", "4"),
    ("moments", "--n-range", "1:8", "--M", "4", "--format", "csv"),
    ("moments", "--n", "7", "--i", "3", "--M", "3"),
    ("guess", "--target", "FM", "--r", "1", "--s", "2"),
    ("oracle", "--n", "8"),
    ("verify", "--suite", "oracle", "--cap", "8"),
    ("verify", "--suite", "leading"),
]


def criterion_10():
    differing = []
    for argv in DETERMINISM_COMMANDS:
        outs = set()
        for workers in ("1", "1", "4"):
            proc = subprocess.run([sys.executable, "-m", "permstat", *argv, "--workers", workers],
                                  capture_output=True, check=False)
            outs.add((proc.returncode, proc.stdout))
        if len(outs) != 1:
            differing.append(" ".join(argv))
    return not differing, f"{len(DETERMINISM_COMMANDS)} commands x workers 1, 1, 4; differing: {differing or 'none'}"


CRITERIA = [
    (1, "oracle equivalence n <= 8", criterion_1),
    (2, "Netto/MacMahon product for both marginals", criterion_2),
    (3, "closed-form mean, variance, covariance", criterion_3),
    (4, "exact correlation 9/(2n+5)", criterion_4),
    (5, "odd central moments vanish", criterion_5),
    (6, "covariance re-guessed from n = 1..5", criterion_6),
    (7, "leading-term families", criterion_7),
    (8, "finale ratios at i = ceil(n/2)", criterion_8),
    (9, "alpha asymptotics from a 3-point fit", criterion_9),
    (10, "determinism across reruns and workers", criterion_10),
]


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, check):
    passed, detail = check()
    _record(number, title, passed, detail)
    assert passed, detail


if __name__ == "__main__":
    ok = True
    for number, title, check in CRITERIA:
        passed, detail = check()
        ok &= passed
        _record(number, title, passed, detail)
        print(RESULTS[-1], flush=True)
    sys.exit(0 if ok else 1)
