"""Joint (inv, maj) generating polynomials via the last-letter recurrence.

F(n, i) is the sum of p^inv q^maj over permutations of length n ending in i.
Row n is built from row n-1 alone:

    F(n, n) = sum_j F(n-1, j)
    F(n, i) = p F(n, i+1) + p^(n-i) (q^(n-1) - 1) F(n-1, i),   i = n-1 .. 1

In truncated mode the same sweep runs on the expansions at p = 1+u, q = 1+v,
so no polynomial of degree ~n^2 is ever materialised.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterator, List, Optional, Tuple, Union

from .arith import BiPoly, TruncSeries, binomial_row, fraction_str

Entry = Union[BiPoly, TruncSeries]


@dataclass(frozen=True)
class FRow:
    """Row n of the F table; ``entries[i-1]`` is F(n, i)."""

    n: int
    entries: Tuple[Entry, ...]

    def __getitem__(self, i: int) -> Entry:
        if not 1 <= i <= self.n:
            raise IndexError(f"i={i} outside 1..{self.n}")
        return self.entries[i - 1]

    def total(self) -> Entry:
        return _sum(self.entries)


@dataclass(frozen=True)
class DistResult:
    """H(n) (or a single F(n, i)) in full or truncated representation.

    ``order`` is None for full polynomials, else the truncation order M.
    """

    n: int
    order: Optional[int]
    payload: Entry
    last: Optional[int] = None

    @property
    def representation(self) -> str:
        return "full" if self.order is None else "truncated"

    @property
    def population(self) -> int:
        return factorial(self.n - 1) if self.last is not None else factorial(self.n)

    def to_json(self) -> dict:
        doc: dict = {"n": self.n}
        if self.last is not None:
            doc["i"] = self.last
        doc["representation"] = self.representation
        if self.order is None:
            doc["terms"] = self.payload.to_json()["terms"]
        else:
            doc["order"] = self.order
            doc["terms"] = [
                [a, b, fraction_str(self.payload.coeff(a, b))]
                for a in range(self.order + 1)
                for b in range(self.order + 1)
                if self.payload.coeff(a, b)
            ]
        return doc


def _sum(items) -> Entry:
    it = iter(items)
    acc = next(it)
    for x in it:
        acc = acc + x
    return acc


def f_table(N: int, order: Optional[int] = None) -> Iterator[FRow]:
    """Yield the rows F(1, .), ..., F(N, .).

    ``order=None`` computes full polynomials with sparse shifted adds (the
    reference path; ``f_row``/``h_poly`` use a faster packed form); an integer M computes the
    expansions at (1+u, 1+v) modulo (u^(M+1), v^(M+1)). Only the previous row is
    held internally, so callers that keep just the last row run in two-row memory.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if order is None:
        step = _next_row_full
        prev = FRow(1, (BiPoly.one(),))
    else:
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        step = _next_row_series
        prev = FRow(1, (TruncSeries.constant(1, order),))
    yield prev
    for n in range(2, N + 1):
        prev = step(prev, order)
        yield prev


def _next_row_full(prev: FRow, _order: Optional[int]) -> FRow:
    n = prev.n + 1
    out: List[BiPoly] = [BiPoly.zero()] * n
    out[n - 1] = prev.total()
    for i in range(n - 1, 0, -1):
        g = prev.entries[i - 1]
        term = g.shift(n - i, n - 1) - g.shift(n - i, 0)
        out[i - 1] = out[i].shift(1, 0) + term
    return FRow(n, tuple(out))


def _next_row_series(prev: FRow, order: int) -> FRow:
    n = prev.n + 1
    out: List[TruncSeries] = [None] * n  # type: ignore[list-item]
    out[n - 1] = prev.total()
    # (1+v)^(n-1) - 1, shared by every i in this row
    qfac = binomial_row(n - 1, order)
    qfac[0] = 0
    one_plus_u = [1, 1]
    for i in range(n - 1, 0, -1):
        g = prev.entries[i - 1]
        term = g.mul_univariate(qfac, "v").mul_univariate(binomial_row(n - i, order), "u")
        out[i - 1] = out[i].mul_univariate(one_plus_u, "u") + term
    return FRow(n, tuple(out))


def f_row(n: int, order: Optional[int] = None) -> FRow:
    """Row n alone (streams through the earlier rows)."""
    if order is None:
        return _unpack_row(*_last(_packed_sweep(n)))
    row = None
    for row in f_table(n, order):
        pass
    return row


# Dense packed path for full polynomials: F(n, i) is stored as the integer
# F(X^W, X) with X = 2^B, so p^a q^b shifts become bit shifts. B is wide enough
# for N! and W exceeds every q-degree, so slots never overlap once a row is
# final (intermediate negative terms cancel exactly).

def _packing(N: int) -> Tuple[int, int]:
    bits = factorial(N).bit_length() + 1
    B = 8 * ((bits + 7) // 8)
    W = N * (N - 1) // 2 + 1
    return B, W


def _packed_sweep(N: int) -> Iterator[Tuple[int, List[int], int, int]]:
    if N < 1:
        raise ValueError("N must be >= 1")
    B, W = _packing(N)
    p_shift = B * W
    prev = [1]
    yield 1, prev, B, W
    for n in range(2, N + 1):
        out = [0] * n
        out[n - 1] = sum(prev)
        q_shift = B * (n - 1)
        for i in range(n - 1, 0, -1):
            g = prev[i - 1] << (p_shift * (n - i))
            out[i - 1] = (out[i] << p_shift) + (g << q_shift) - g
        prev = out
        yield n, prev, B, W


def _last(it):
    item = None
    for item in it:
        pass
    return item


def _unpack(value: int, n: int, B: int, W: int) -> BiPoly:
    if value < 0:
        raise ArithmeticError("packed polynomial has negative slots")
    d = n * (n - 1) // 2
    w = B // 8
    buf = value.to_bytes(w * ((d + 1) * W) + w, "little")
    coeffs = {}
    for a in range(d + 1):
        base = a * W * w
        for b in range(d + 1):
            off = base + b * w
            c = int.from_bytes(buf[off:off + w], "little")
            if c:
                coeffs[(a, b)] = c
    return BiPoly(coeffs)


def _unpack_row(n: int, entries: List[int], B: int, W: int) -> FRow:
    return FRow(n, tuple(_unpack(v, n, B, W) for v in entries))


def f_poly(n: int, i: int, order: Optional[int] = None) -> DistResult:
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got n={n}, i={i}")
    return DistResult(n, order, f_row(n, order)[i], last=i)


def h_poly(n: int, order: Optional[int] = None) -> DistResult:
    """H(n) = sum over S_n of p^inv q^maj, read off as F(n+1, n+1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if order is None:
        m, entries, B, W = _last(_packed_sweep(n))
        return DistResult(n, None, _unpack(sum(entries), m, B, W))
    row = f_row(n, order)
    return DistResult(n, order, row.total())


def h_table(N: int, order: Optional[int] = None) -> Iterator[DistResult]:
    """H(1), ..., H(N) from a single sweep."""
    if order is None:
        for n, entries, B, W in _packed_sweep(N):
            yield DistResult(n, None, _unpack(sum(entries), n, B, W))
        return
    for row in f_table(N, order):
        yield DistResult(row.n, order, row.total())


def netto_poly(n: int) -> List[int]:
    """Coefficients of prod_{k=1..n} (1 + q + ... + q^(k-1))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    coeffs = [1]
    for k in range(2, n + 1):
        # multiply by 1 + q + ... + q^(k-1) with a sliding window sum
        out = [0] * (len(coeffs) + k - 1)
        window = 0
        for d in range(len(out)):
            if d < len(coeffs):
                window += coeffs[d]
            if d - k >= 0:
                window -= coeffs[d - k]
            out[d] = window
        coeffs = out
    return coeffs
