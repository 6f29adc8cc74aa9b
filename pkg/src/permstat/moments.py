"""Exact mixed moments of (inv, maj).

The expansion of a distribution at (1+u, 1+v) yields factorial moments
directly: E[X^(r) Y^(s)] = r! s! [u^r v^s] P(1+u, 1+v) / |population|.
From there each flavour is an exact triangular transform:

    raw factorial -> raw power          (Stirling numbers of the second kind)
    raw power     -> central power      (binomial shift by the exact means)
    central power -> central factorial  (signed Stirling numbers of the first kind)

Centering is done on the moments rather than on the generating function, so
the fractional exponent of the mean never appears.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .arith import TruncSeries, fraction_str
from .jointdist import DistResult, f_table

Grid = Tuple[Tuple[Fraction, ...], ...]

DEFAULT_ORDER = 8
CSV_HEADER = (
    "r", "s", "raw_factorial", "raw_power", "central_power",
    "central_factorial", "normalized",
)


class MomentError(ValueError):
    pass


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def stirling1(n: int, k: int) -> int:
    """Signed: z(z-1)...(z-n+1) = sum_k stirling1(n, k) z^k."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return stirling1(n - 1, k - 1) - (n - 1) * stirling1(n - 1, k)


def _freeze(rows: Sequence[Sequence[Fraction]]) -> Grid:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _size(grid: Sequence[Sequence]) -> int:
    return len(grid)


def raw_factorial_moments(series: TruncSeries, population: int, order: int | None = None) -> Grid:
    """E[X^(r) Y^(s)] for r, s <= order from the expansion at (1+u, 1+v)."""
    if order is None:
        order = series.order
    if order > series.order:
        raise MomentError(f"series truncated at {series.order}, need order {order}")
    return _freeze(
        [
            [Fraction(factorial(r) * factorial(s) * series.coeff(r, s), population) for s in range(order + 1)]
            for r in range(order + 1)
        ]
    )


def _stirling_transform(grid: Grid, kernel) -> Grid:
    m = _size(grid)
    # separable: apply along r, then along s
    tmp = [[sum(kernel(a, r) * grid[r][s] for r in range(a + 1)) for s in range(m)] for a in range(m)]
    return _freeze([[sum(kernel(b, s) * tmp[a][s] for s in range(b + 1)) for b in range(m)] for a in range(m)])


def factorial_to_power(grid: Grid) -> Grid:
    return _stirling_transform(grid, stirling2)


def power_to_factorial(grid: Grid) -> Grid:
    return _stirling_transform(grid, stirling1)


def power_to_central(grid: Grid, mean_x: Fraction, mean_y: Fraction) -> Grid:
    m = _size(grid)
    mx, my = -Fraction(mean_x), -Fraction(mean_y)
    px = [mx**k for k in range(m)]
    py = [my**k for k in range(m)]
    tmp = [[sum(comb(a, j) * px[a - j] * grid[j][s] for j in range(a + 1)) for s in range(m)] for a in range(m)]
    return _freeze([[sum(comb(b, k) * py[b - k] * tmp[a][k] for k in range(b + 1)) for b in range(m)] for a in range(m)])


def central_to_central_factorial(grid: Grid) -> Grid:
    return power_to_factorial(grid)


def normalized_moments(central: Grid, variance: Fraction) -> Grid:
    """central[r][s] / variance^((r+s)/2); odd total order is exactly 0."""
    variance = Fraction(variance)
    if variance <= 0:
        raise MomentError("variance is zero; normalized moments undefined")
    m = _size(central)
    out = [[Fraction(0)] * m for _ in range(m)]
    for r in range(m):
        for s in range(m):
            if (r + s) % 2:
                if central[r][s] != 0:
                    raise MomentError(f"central[{r}][{s}] = {central[r][s]} but odd orders must vanish")
                continue
            out[r][s] = central[r][s] / variance ** ((r + s) // 2)
    return _freeze(out)


@dataclass(frozen=True)
class MomentTable:
    """All moment flavours for one population.

    ``last`` is None for all of S_n, else the fixed last entry i.
    ``normalized`` is only filled for all of S_n with n >= 2.
    """

    n: int
    last: Optional[int]
    order: int
    raw_factorial: Grid
    raw_power: Grid
    central_power: Grid
    central_factorial: Grid
    normalized: Optional[Grid] = field(default=None)

    @property
    def scope(self) -> str:
        return "all" if self.last is None else "last"

    @property
    def mean_inv(self) -> Fraction:
        return self.raw_factorial[1][0] if self.order >= 1 else Fraction(0)

    @property
    def mean_maj(self) -> Fraction:
        return self.raw_factorial[0][1] if self.order >= 1 else Fraction(0)

    @property
    def variance(self) -> Fraction:
        return self.central_power[2][0]

    def grids(self) -> Dict[str, Optional[Grid]]:
        return {
            "raw_factorial": self.raw_factorial,
            "raw_power": self.raw_power,
            "central_power": self.central_power,
            "central_factorial": self.central_factorial,
            "normalized": self.normalized,
        }

    def to_csv(self, with_float: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = list(CSV_HEADER)
        if with_float:
            header += [h + "_float" for h in CSV_HEADER[2:]]
        w.writerow(header)
        names = CSV_HEADER[2:]
        for r in range(self.order + 1):
            for s in range(self.order + 1):
                vals = [self.grids()[k] for k in names]
                exact = ["" if g is None else fraction_str(g[r][s]) for g in vals]
                row = [r, s] + exact
                if with_float:
                    row += ["" if g is None else repr(float(g[r][s])) for g in vals]
                w.writerow(row)
        return buf.getvalue()

    def to_json(self) -> dict:
        doc: dict = {"n": self.n, "scope": self.scope}
        if self.last is not None:
            doc["i"] = self.last
        doc["order"] = self.order
        for name, g in self.grids().items():
            doc[name] = None if g is None else [[fraction_str(x) for x in row] for row in g]
        return doc


def moment_table_from_series(
    series: TruncSeries, n: int, population: int, last: Optional[int] = None, order: Optional[int] = None
) -> MomentTable:
    if order is None:
        order = series.order
    rf = raw_factorial_moments(series, population, order)
    if order >= 1:
        mx, my = rf[1][0], rf[0][1]
    else:
        mx = my = Fraction(0)
    rp = factorial_to_power(rf)
    cp = power_to_central(rp, mx, my)
    cf = central_to_central_factorial(cp)
    normalized = None
    # odd orders only vanish over all of S_n (complement maps last=i to last=n+1-i)
    if last is None and order >= 2 and cp[2][0] > 0:
        if cp[2][0] != cp[0][2]:
            raise MomentError("inv and maj variances differ; normalization assumes equality")
        normalized = normalized_moments(cp, cp[2][0])
    return MomentTable(n, last, order, rf, rp, cp, cf, normalized)


def moment_table(n: int, order: int = DEFAULT_ORDER, last: Optional[int] = None) -> MomentTable:
    """Moments over S_n, or over permutations of length n ending in ``last``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if last is not None and not 1 <= last <= n:
        raise ValueError(f"need 1 <= i <= n, got n={n}, i={last}")
    row = None
    for row in f_table(n, order):
        pass
    if last is None:
        return moment_table_from_series(row.total(), n, factorial(n), None, order)
    return moment_table_from_series(row[last], n, factorial(n - 1), last, order)


def moment_table_from_dist(dist: DistResult, order: Optional[int] = None) -> MomentTable:
    if dist.order is None:
        raise MomentError("distribution must be in truncated-series mode")
    return moment_table_from_series(dist.payload, dist.n, dist.population, dist.last, order)


def all_tables(N: int, order: int = DEFAULT_ORDER) -> Iterator[MomentTable]:
    """S_n moment tables for n = 1..N from one recurrence sweep."""
    for row in f_table(N, order):
        yield moment_table_from_series(row.total(), row.n, factorial(row.n), None, order)


def last_entry_tables(N: int, order: int = DEFAULT_ORDER) -> Iterator[List[MomentTable]]:
    """For n = 1..N, the list of tables for i = 1..n."""
    for row in f_table(N, order):
        pop = factorial(row.n - 1)
        yield [
            moment_table_from_series(row[i], row.n, pop, i, order)
            for i in range(1, row.n + 1)
        ]


# closed forms -------------------------------------------------------------

def mean_closed(n: int) -> Fraction:
    return Fraction(n * (n - 1), 4)


def variance_closed(n: int) -> Fraction:
    return Fraction(2 * n**3 + 3 * n**2 - 5 * n, 72)


def covariance_closed(n: int) -> Fraction:
    return Fraction(n * (n - 1), 8)


def correlation_closed(n: int) -> Optional[Fraction]:
    """9/(2n+5); None for n = 1 where the variance vanishes."""
    if n < 2:
        return None
    return Fraction(9, 2 * n + 5)


def end_in_mean_closed(n: int, i: int) -> Fraction:
    return n - i + Fraction((n - 1) * (n - 2), 4)


@dataclass(frozen=True)
class ClosedForms:
    n: int
    mean: Fraction
    variance: Fraction
    covariance: Fraction
    correlation: Optional[Fraction]
    last: Optional[int] = None
    end_in_mean: Optional[Fraction] = None

    def to_json(self) -> dict:
        doc = {
            "n": self.n,
            "mean": fraction_str(self.mean),
            "variance": fraction_str(self.variance),
            "covariance": fraction_str(self.covariance),
            "correlation": None if self.correlation is None else fraction_str(self.correlation),
        }
        if self.last is not None:
            doc["i"] = self.last
            doc["end_in_mean"] = fraction_str(self.end_in_mean)
        return doc


def closed_forms(n: int, i: Optional[int] = None) -> ClosedForms:
    if n < 1:
        raise ValueError("n must be >= 1")
    if i is not None and not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got n={n}, i={i}")
    return ClosedForms(
        n,
        mean_closed(n),
        variance_closed(n),
        covariance_closed(n),
        correlation_closed(n),
        i,
        None if i is None else end_in_mean_closed(n, i),
    )
