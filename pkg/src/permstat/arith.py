"""Exact bivariate polynomials in (p, q) and truncated series in (u, v).

``BiPoly`` holds integer coefficients sparsely, keyed by exponent pair.
``TruncSeries`` holds a dense (M+1) x (M+1) grid of exact rationals and is
truncated per variable: only u^a v^b with a <= M and b <= M are kept.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

Rational = Fraction
Number = Union[int, Fraction]
Exponent = Tuple[int, int]


class BiPoly:
    """Immutable polynomial in p, q with arbitrary-precision integer coefficients."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[Exponent, int] | None = None):
        clean: Dict[Exponent, int] = {}
        if coeffs:
            for (a, b), c in coeffs.items():
                if a < 0 or b < 0:
                    raise ValueError(f"negative exponent ({a}, {b})")
                if c:
                    clean[(a, b)] = int(c)
        self._coeffs = clean
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: Dict[Exponent, int]) -> "BiPoly":
        # caller guarantees nonnegative exponents and no zeros
        obj = cls.__new__(cls)
        obj._coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def one(cls) -> "BiPoly":
        return cls._raw({(0, 0): 1})

    @classmethod
    def zero(cls) -> "BiPoly":
        return cls._raw({})

    @classmethod
    def monomial(cls, a: int, b: int, c: int = 1) -> "BiPoly":
        return cls({(a, b): c})

    @property
    def coeffs(self) -> Dict[Exponent, int]:
        return dict(self._coeffs)

    def terms(self) -> List[Tuple[int, int, int]]:
        """Terms as ``(a, b, coeff)`` sorted lexicographically by exponent."""
        return [(a, b, c) for (a, b), c in sorted(self._coeffs.items())]

    def __iter__(self) -> Iterator[Tuple[Exponent, int]]:
        return iter(sorted(self._coeffs.items()))

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __getitem__(self, key: Exponent) -> int:
        return self._coeffs.get(key, 0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, BiPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, int):
            return self == BiPoly({(0, 0): other})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._coeffs:
            return "BiPoly(0)"
        parts = []
        for a, b, c in self.terms():
            mono = "*".join(
                s for s in (
                    "" if a == 0 else ("p" if a == 1 else f"p^{a}"),
                    "" if b == 0 else ("q" if b == 1 else f"q^{b}"),
                ) if s
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return "BiPoly(" + " + ".join(parts) + ")"

    def __add__(self, other: "BiPoly") -> "BiPoly":
        if not isinstance(other, BiPoly):
            return NotImplemented
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return BiPoly._raw(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly._raw({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Union["BiPoly", int]) -> "BiPoly":
        if isinstance(other, int):
            if other == 0:
                return BiPoly.zero()
            return BiPoly._raw({k: c * other for k, c in self._coeffs.items()})
        if not isinstance(other, BiPoly):
            return NotImplemented
        out: Dict[Exponent, int] = {}
        for (a1, b1), c1 in self._coeffs.items():
            for (a2, b2), c2 in other._coeffs.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return BiPoly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def shift(self, da: int, db: int) -> "BiPoly":
        """Multiply by the monomial p^da q^db."""
        if da < 0 or db < 0:
            raise ValueError("shift exponents must be nonnegative")
        return BiPoly._raw({(a + da, b + db): c for (a, b), c in self._coeffs.items()})

    def swap(self) -> "BiPoly":
        """The polynomial with p and q exchanged."""
        return BiPoly._raw({(b, a): c for (a, b), c in self._coeffs.items()})

    def __call__(self, p: Number, q: Number) -> Number:
        return sum(c * p**a * q**b for (a, b), c in self._coeffs.items())

    def mass(self) -> int:
        """Value at p = q = 1."""
        return sum(self._coeffs.values())

    def degree(self) -> Exponent:
        """Maximum exponent in p and in q (``(-1, -1)`` for the zero polynomial)."""
        if not self._coeffs:
            return (-1, -1)
        return (max(a for a, _ in self._coeffs), max(b for _, b in self._coeffs))

    def marginal(self, axis: str) -> List[int]:
        """Dense coefficient list of the univariate polynomial obtained by
        setting the *other* variable to 1. ``axis='p'`` keeps p (so q = 1)."""
        if axis not in ("p", "q"):
            raise ValueError(f"axis must be 'p' or 'q', got {axis!r}")
        idx = 0 if axis == "p" else 1
        deg = max((k[idx] for k in self._coeffs), default=-1)
        out = [0] * (deg + 1)
        for k, c in self._coeffs.items():
            out[k[idx]] += c
        return out

    def to_json(self, n: int | None = None) -> dict:
        doc: dict = {}
        if n is not None:
            doc["n"] = n
        doc["terms"] = [[a, b, str(c)] for a, b, c in self.terms()]
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "BiPoly":
        return cls({(int(a), int(b)): int(c) for a, b, c in doc["terms"]})


def poly_add(a: BiPoly, b: BiPoly) -> BiPoly:
    return a + b


def poly_mul_monomial(a: BiPoly, da: int, db: int) -> BiPoly:
    return a.shift(da, db)


class TruncSeries:
    """Bivariate power series in u, v modulo (u^(M+1), v^(M+1)).

    Coefficients are exact: Python ints or ``Fraction``. ``coeff(a, b)`` is the
    coefficient of u^a v^b.
    """

    __slots__ = ("order", "_grid")

    def __init__(self, order: int, grid: Sequence[Sequence[Number]] | None = None):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.order = order
        size = order + 1
        if grid is None:
            self._grid = [[0] * size for _ in range(size)]
        else:
            if len(grid) != size or any(len(row) != size for row in grid):
                raise ValueError(f"grid must be {size}x{size}")
            self._grid = [[_canon(c) for c in row] for row in grid]

    @classmethod
    def _raw(cls, order: int, grid: List[List[Number]]) -> "TruncSeries":
        obj = cls.__new__(cls)
        obj.order = order
        obj._grid = grid
        return obj

    @classmethod
    def constant(cls, c: Number, order: int) -> "TruncSeries":
        s = cls(order)
        s._grid[0][0] = _canon(c)
        return s

    @classmethod
    def from_terms(cls, terms: Mapping[Exponent, Number], order: int) -> "TruncSeries":
        s = cls(order)
        for (a, b), c in terms.items():
            if a <= order and b <= order:
                s._grid[a][b] += _canon(c)
        return s

    @classmethod
    def from_bipoly(cls, poly: BiPoly, order: int) -> "TruncSeries":
        """Expand ``poly(1+u, 1+v)`` and truncate."""
        size = order + 1
        grid = [[0] * size for _ in range(size)]
        for (a, b), c in poly:
            ca = [comb(a, k) for k in range(min(a, order) + 1)]
            cb = [comb(b, k) for k in range(min(b, order) + 1)]
            for k, x in enumerate(ca):
                row = grid[k]
                cx = c * x
                for l, y in enumerate(cb):
                    row[l] += cx * y
        return cls._raw(order, grid)

    def coeff(self, a: int, b: int) -> Number:
        return self._grid[a][b]

    def grid(self) -> List[List[Number]]:
        return [row[:] for row in self._grid]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and self._grid == other._grid

    def __hash__(self) -> int:
        return hash((self.order, tuple(tuple(r) for r in self._grid)))

    def __repr__(self) -> str:
        terms = [
            f"{c}*u^{a}v^{b}"
            for a, row in enumerate(self._grid)
            for b, c in enumerate(row)
            if c
        ]
        return f"TruncSeries(M={self.order}: " + (" + ".join(terms) or "0") + ")"

    def _check(self, other: "TruncSeries") -> None:
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        return TruncSeries._raw(
            self.order,
            [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self._grid, other._grid)],
        )

    def __neg__(self) -> "TruncSeries":
        return TruncSeries._raw(self.order, [[-x for x in row] for row in self._grid])

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        return TruncSeries._raw(
            self.order,
            [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self._grid, other._grid)],
        )

    def __mul__(self, other: Union["TruncSeries", int, Fraction]) -> "TruncSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        size = self.order + 1
        out = [[0] * size for _ in range(size)]
        g1, g2 = self._grid, other._grid
        for a1 in range(size):
            for b1 in range(size):
                c1 = g1[a1][b1]
                if not c1:
                    continue
                for a2 in range(size - a1):
                    row2 = g2[a2]
                    orow = out[a1 + a2]
                    for b2 in range(size - b1):
                        c2 = row2[b2]
                        if c2:
                            orow[b1 + b2] += c1 * c2
        return TruncSeries._raw(self.order, _canon_grid(out))

    __rmul__ = __mul__

    def scale(self, r: Number) -> "TruncSeries":
        r = _canon(r)
        return TruncSeries._raw(self.order, _canon_grid([[x * r for x in row] for row in self._grid]))

    def mul_univariate(self, coeffs: Sequence[Number], axis: str) -> "TruncSeries":
        """Multiply by a series in a single variable (``axis`` is 'u' or 'v').

        ``coeffs[k]`` is the coefficient of u^k (or v^k); entries past the
        truncation order are ignored.
        """
        size = self.order + 1
        c = list(coeffs[:size])
        g = self._grid
        out = [[0] * size for _ in range(size)]
        if axis == "u":
            for a in range(size):
                row = g[a]
                for k in range(min(len(c), size - a)):
                    ck = c[k]
                    if not ck:
                        continue
                    orow = out[a + k]
                    for b in range(size):
                        orow[b] += ck * row[b]
        elif axis == "v":
            for a in range(size):
                row, orow = g[a], out[a]
                for b in range(size):
                    x = row[b]
                    if not x:
                        continue
                    for k in range(min(len(c), size - b)):
                        orow[b + k] += c[k] * x
        else:
            raise ValueError(f"axis must be 'u' or 'v', got {axis!r}")
        return TruncSeries._raw(self.order, out)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for row in self._grid for x in row)


def binomial_row(e: int, order: int) -> List[int]:
    """Coefficients of (1+x)^e up to x^order."""
    if e < 0:
        raise ValueError("exponent must be >= 0")
    return [comb(e, k) for k in range(order + 1)]


def series_from_binomial(e: int, var: str, order: int) -> TruncSeries:
    """(1+u)^e or (1+v)^e, truncated at ``order``."""
    row = binomial_row(e, order)
    s = TruncSeries(order)
    if var == "u":
        for k, c in enumerate(row):
            s._grid[k][0] = c
    elif var == "v":
        s._grid[0] = row
    else:
        raise ValueError(f"var must be 'u' or 'v', got {var!r}")
    return s


def series_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a + b


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def series_scale(a: TruncSeries, r: Number) -> TruncSeries:
    return a.scale(r)


def _canon(c: Number) -> Number:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


def _canon_grid(grid: List[List[Number]]) -> List[List[Number]]:
    for row in grid:
        for j, c in enumerate(row):
            if isinstance(c, Fraction) and c.denominator == 1:
                row[j] = c.numerator
    return grid


def fraction_str(x: Number) -> str:
    """Exact ``num/den`` rendering (integers carry ``/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
