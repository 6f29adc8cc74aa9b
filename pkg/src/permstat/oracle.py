"""Brute-force ground truth over small symmetric groups.

Everything here enumerates permutations directly and shares no code with the
recurrence engine beyond the ``BiPoly`` container.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .arith import BiPoly

Permutation = Tuple[int, ...]

DEFAULT_CAP = 9


class OracleCapExceeded(ValueError):
    pass


def check_permutation(pi: Sequence[int]) -> None:
    if sorted(pi) != list(range(1, len(pi) + 1)):
        raise ValueError(f"not a permutation of 1..{len(pi)}: {tuple(pi)}")


def parse_permutation(text: str) -> Permutation:
    """Accept ``"314625"`` (n <= 9) or comma/space separated values."""
    text = text.strip()
    if "," in text or " " in text:
        pi = tuple(int(x) for x in text.replace(",", " ").split())
    else:
        pi = tuple(int(ch) for ch in text)
    check_permutation(pi)
    return pi


def inv(pi: Sequence[int]) -> int:
    n = len(pi)
    return sum(1 for a in range(n) for b in range(a + 1, n) if pi[a] > pi[b])


def maj(pi: Sequence[int]) -> int:
    return sum(k + 1 for k in range(len(pi) - 1) if pi[k] > pi[k + 1])


def complement(pi: Sequence[int]) -> Permutation:
    n = len(pi)
    return tuple(n + 1 - x for x in pi)


def foata(pi: Sequence[int]) -> Permutation:
    """Foata's second fundamental transformation.

    Satisfies inv(foata(pi)) == maj(pi) and keeps the last letter in place.
    """
    if not pi:
        return ()
    gamma: List[int] = [pi[0]]
    for x in pi[1:]:
        big = gamma[-1] > x
        blocks: List[List[int]] = []
        cur: List[int] = []
        for y in gamma:
            cur.append(y)
            if (y > x) == big:
                blocks.append(cur)
                cur = []
        gamma = []
        for blk in blocks:
            gamma.append(blk[-1])
            gamma.extend(blk[:-1])
        gamma.append(x)
    return tuple(gamma)


def permutations(n: int, first: Optional[int] = None) -> Iterator[Permutation]:
    """All of S_n in lexicographic order, by the iterative successor rule.

    With ``first`` given, only permutations starting with that value.
    """
    if n == 0:
        yield ()
        return
    if first is None:
        a = list(range(1, n + 1))
        stop = None
    else:
        a = [first] + [x for x in range(1, n + 1) if x != first]
        stop = first
    while True:
        yield tuple(a)
        k = n - 2
        while k >= 0 and a[k] >= a[k + 1]:
            k -= 1
        if k < 0:
            return
        j = n - 1
        while a[j] <= a[k]:
            j -= 1
        a[k], a[j] = a[j], a[k]
        a[k + 1:] = reversed(a[k + 1:])
        if stop is not None and a[0] != stop:
            return


def _joint_counts(n: int, first: Optional[int]) -> Tuple[Dict[Tuple[int, int, int], int], int]:
    """Counts keyed by (last entry, inv, maj) over one shard."""
    counts: Dict[Tuple[int, int, int], int] = {}
    visited = 0
    for pi in permutations(n, first):
        visited += 1
        key = (pi[-1], inv(pi), maj(pi))
        counts[key] = counts.get(key, 0) + 1
    return counts, visited


def _shard(args):
    return _joint_counts(*args)


def brute_joint_by_last(n: int, cap: int = DEFAULT_CAP, workers: int = 1) -> Tuple[List[BiPoly], int]:
    """Brute-force F(n, i) for every i at once; returns ([F(n,1)..F(n,n)], visited)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise OracleCapExceeded(f"n={n} exceeds oracle cap {cap}")
    jobs = [(n, f) for f in range(1, n + 1)]
    if workers > 1 and n >= 7:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_shard, jobs))
    else:
        parts = [_shard(j) for j in jobs]
    merged: List[Dict[Tuple[int, int], int]] = [{} for _ in range(n)]
    visited = 0
    for counts, seen in parts:
        visited += seen
        for (last, a, b), c in counts.items():
            bucket = merged[last - 1]
            bucket[(a, b)] = bucket.get((a, b), 0) + c
    return [BiPoly(m) for m in merged], visited


def brute_joint(
    n: int,
    last: Optional[int] = None,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> BiPoly:
    """Sum of p^inv q^maj over S_n, optionally only over pi_n == ``last``.

    Enumeration is sharded by first entry; shards are merged in order, so the
    result does not depend on ``workers``.
    """
    poly, _ = brute_joint_counted(n, last, cap, workers)
    return poly


def brute_joint_counted(
    n: int,
    last: Optional[int] = None,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> Tuple[BiPoly, int]:
    """As ``brute_joint`` but also returns the number of permutations visited."""
    if last is not None and not 1 <= last <= n:
        raise ValueError(f"last entry {last} outside 1..{n}")
    rows, visited = brute_joint_by_last(n, cap, workers)
    if last is not None:
        return rows[last - 1], visited
    total = BiPoly.zero()
    for poly in rows:
        total = total + poly
    return total, visited


def brute_moment(
    n: int,
    r: int,
    s: int,
    *,
    last: Optional[int] = None,
    central: bool = False,
    falling: bool = False,
    cap: int = DEFAULT_CAP,
) -> Fraction:
    """E[f(inv) g(maj)] by direct enumeration.

    ``central`` subtracts the exact means first; ``falling`` uses falling
    factorial powers z(z-1)...(z-r+1) instead of ordinary powers.
    """
    if n > cap:
        raise OracleCapExceeded(f"n={n} exceeds oracle cap {cap}")
    pairs = [
        (inv(pi), maj(pi))
        for pi in permutations(n)
        if last is None or pi[-1] == last
    ]
    size = len(pairs)
    if central:
        mx = Fraction(sum(x for x, _ in pairs), size)
        my = Fraction(sum(y for _, y in pairs), size)
    else:
        mx = my = Fraction(0)
    total = Fraction(0)
    for x, y in pairs:
        total += _power(x - mx, r, falling) * _power(y - my, s, falling)
    return total / size


def _power(z: Fraction, k: int, falling: bool) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= (z - j) if falling else z
    return out


def foata_contract_violations(n: int) -> List[Permutation]:
    """Permutations of S_n breaking inv(foata(pi)) == maj(pi), the last-letter
    rule, or injectivity. Empty means the contract holds."""
    bad: List[Permutation] = []
    seen = set()
    for pi in permutations(n):
        phi = foata(pi)
        if inv(phi) != maj(pi) or phi[-1] != pi[-1] or phi in seen:
            bad.append(pi)
        seen.add(phi)
    if len(seen) != factorial(n) and not bad:
        bad.append(())
    return bad
