"""Rigorous guessing of moment polynomials and checks of their leading terms.

A guess interpolates an exact oracle under an a-priori degree bound and then
checks held-out points. Moment orders (a, b) are sorted into four parity
families, each with a closed leading form in (n, i); a validated guess must
differ from that form only in monomials of strictly lower total degree.
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .arith import fraction_str
from .jointdist import f_table
from .moments import MomentError, MomentTable, all_tables, moment_table_from_series

Monomial = Tuple[int, ...]
Poly = Dict[Monomial, Fraction]

VALIDATED = "validated"
REFUTED = "refuted"


class SingularSystem(ValueError):
    pass


# exact linear algebra ------------------------------------------------------

def _integer_rows(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> List[List[int]]:
    rows = []
    for row, rhs in zip(A, b):
        vals = [Fraction(x) for x in row] + [Fraction(rhs)]
        scale = math.lcm(*(v.denominator for v in vals))
        rows.append([int(v * scale) for v in vals])
    return rows


def bareiss_solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> List[Fraction]:
    """Solve a square system exactly with fraction-free (Bareiss) elimination."""
    n = len(A)
    if any(len(row) != n for row in A) or len(b) != n:
        raise ValueError("bareiss_solve needs a square system")
    M = _integer_rows(A, b)
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k] != 0), None)
        if piv is None:
            raise SingularSystem(f"singular system at column {k}")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        rowk = M[k]
        for r in range(k + 1, n):
            rowr = M[r]
            rk = rowr[k]
            for c in range(k + 1, n + 1):
                rowr[c] = (pk * rowr[c] - rk * rowk[c]) // prev
            rowr[k] = 0
        prev = pk
    x = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        acc = Fraction(M[k][n])
        for c in range(k + 1, n):
            acc -= M[k][c] * x[c]
        x[k] = acc / M[k][k]
    return x


# polynomials --------------------------------------------------------------

def poly_eval(coeffs: Poly, point: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for mono, c in coeffs.items():
        term = Fraction(c)
        for x, e in zip(point, mono):
            term *= Fraction(x) ** e
        total += term
    return total


def poly_sub(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) - v
    return {k: v for k, v in out.items() if v}


def poly_degree(p: Poly) -> int:
    return max((sum(k) for k, v in p.items() if v), default=-1)


def monomial_str(mono: Monomial, names: Sequence[str]) -> str:
    parts = [v if e == 1 else f"{v}^{e}" for v, e in zip(names, mono) if e]
    return "*".join(parts) or "1"


def poly_str(p: Poly, names: Sequence[str]) -> str:
    if not p:
        return "0"
    out = []
    for mono in _sorted_monomials(p):
        c = p[mono]
        m = monomial_str(mono, names)
        coef = str(c)
        out.append(coef if m == "1" else (m if c == 1 else f"{coef}*{m}"))
    return " + ".join(out).replace("+ -", "- ")


def _sorted_monomials(p: Poly) -> List[Monomial]:
    return sorted(p, key=lambda m: (-sum(m), tuple(-e for e in m)))


def monomials(total_degree: int, nvars: int) -> List[Monomial]:
    if nvars == 1:
        return [(k,) for k in range(total_degree + 1)]
    return [(a, d - a) for d in range(total_degree + 1) for a in range(d, -1, -1)]


@dataclass
class GuessedPoly:
    variables: Tuple[str, ...]
    degree_bound: int
    coefficients: Poly
    fit_points: List[Tuple[int, ...]]
    validation_points: List[Tuple[int, ...]]
    status: str
    mismatches: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def validated(self) -> bool:
        return self.status == VALIDATED

    def __call__(self, *point: int) -> Fraction:
        return poly_eval(self.coefficients, point)

    def degree(self) -> int:
        return poly_degree(self.coefficients)

    def __str__(self) -> str:
        return poly_str(self.coefficients, self.variables)

    def coefficients_json(self) -> Dict[str, str]:
        return {
            monomial_str(m, self.variables): fraction_str(self.coefficients[m])
            for m in _sorted_monomials(self.coefficients)
        }

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "degree_bound": self.degree_bound,
            "degree": self.degree(),
            "coefficients": self.coefficients_json(),
            "text": str(self),
            "fit_points": [list(p) for p in self.fit_points],
            "validation_points": [list(p) for p in self.validation_points],
            "status": self.status,
        }


def validation_count(fit_count: int) -> int:
    return max(3, math.ceil(0.2 * fit_count))


def newton_interpolate(xs: Sequence[int], ys: Sequence[Fraction]) -> List[Fraction]:
    """Monomial coefficients (constant first) of the interpolating polynomial."""
    m = len(xs)
    dd = [Fraction(y) for y in ys]
    for level in range(1, m):
        for k in range(m - 1, level - 1, -1):
            dd[k] = (dd[k] - dd[k - 1]) / (xs[k] - xs[k - level])
    # Horner on the Newton form
    coeffs = [Fraction(0)] * m
    coeffs[0] = dd[m - 1]
    deg = 0
    for k in range(m - 2, -1, -1):
        # coeffs <- coeffs * (x - xs[k]) + dd[k]
        new = [Fraction(0)] * m
        for j in range(deg + 1):
            new[j + 1] += coeffs[j]
            new[j] -= xs[k] * coeffs[j]
        new[0] += dd[k]
        coeffs = new
        deg += 1
    return coeffs


def degree_bound(r: int, s: int) -> int:
    """Generous total-degree bound for FM(r, s); validation carries the rigor."""
    if r < 0 or s < 0:
        raise ValueError("orders must be nonnegative")
    return (3 * (r + s)) // 2 + 2


def guess_univariate(
    oracle: Callable[[int], Fraction],
    degree: int,
    n_start: int = 1,
    degree_cap: Optional[int] = None,
) -> GuessedPoly:
    """Interpolate through degree+1 consecutive points and check the next few.

    On refutation the degree grows by 2 up to ``degree_cap`` (default: no
    escalation).
    """
    cap = degree if degree_cap is None else max(degree, degree_cap)
    d = degree
    while True:
        xs = list(range(n_start, n_start + d + 1))
        ys = [Fraction(oracle(x)) for x in xs]
        coeffs = newton_interpolate(xs, ys)
        poly = {(k,): c for k, c in enumerate(coeffs) if c}
        val = list(range(xs[-1] + 1, xs[-1] + 1 + validation_count(d + 1)))
        bad = [(x,) for x in val if poly_eval(poly, (x,)) != Fraction(oracle(x))]
        status = REFUTED if bad else VALIDATED
        if status == VALIDATED or d + 2 > cap:
            return GuessedPoly(("n",), d, poly, [(x,) for x in xs], [(x,) for x in val], status, bad)
        d += 2


def triangular_points(n0: int = 2) -> Iterable[Tuple[int, int]]:
    n = n0
    while True:
        for i in range(1, n + 1):
            yield (n, i)
        n += 1


def _select_unisolvent(monos: List[Monomial], candidates: Iterable[Tuple[int, int]], limit: int = 100000):
    """Greedily take candidate points (in order) whose monomial rows are
    linearly independent of those already taken, until the space is spanned."""
    D = len(monos)
    basis: List[Tuple[int, List[Fraction]]] = []  # (pivot column, reduced row)
    chosen: List[Tuple[int, int]] = []
    seen = 0
    it = iter(candidates)
    while len(chosen) < D:
        pt = next(it)
        seen += 1
        if seen > limit:
            raise SingularSystem("could not find a unisolvent point set")
        row = [Fraction(pt[0] ** a * pt[1] ** b) for a, b in monos]
        for piv, brow in basis:
            if row[piv]:
                f = row[piv] / brow[piv]
                row = [x - f * y for x, y in zip(row, brow)]
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is not None:
            basis.append((piv, row))
            chosen.append(pt)
    return chosen, seen


def guess_bivariate(
    oracle: Callable[[int, int], Fraction],
    total_degree: int,
    n0: int = 2,
    degree_cap: Optional[int] = None,
) -> GuessedPoly:
    """Fit all n^a i^b with a+b <= total_degree on the triangle 1 <= i <= n.

    Points are taken row-major from n = n0; a point whose monomial row adds no
    rank is skipped. Validation uses the next points in the same order.
    """
    cap = total_degree if degree_cap is None else max(total_degree, degree_cap)
    d = total_degree
    while True:
        monos = monomials(d, 2)
        fit, consumed = _select_unisolvent(monos, triangular_points(n0))
        A = [[Fraction(n**a * i**b) for a, b in monos] for n, i in fit]
        rhs = [Fraction(oracle(n, i)) for n, i in fit]
        sol = bareiss_solve(A, rhs)
        poly = {m: c for m, c in zip(monos, sol) if c}
        rest = triangular_points(n0)
        for _ in range(consumed):
            next(rest)
        val = [next(rest) for _ in range(validation_count(len(monos)))]
        bad = [p for p in val if poly_eval(poly, p) != Fraction(oracle(*p))]
        status = REFUTED if bad else VALIDATED
        if status == VALIDATED or d + 2 > cap:
            return GuessedPoly(("n", "i"), d, poly, fit, val, status, bad)
        d += 2


def spot_audit(
    guess: GuessedPoly,
    oracle: Callable[..., Fraction],
    candidates: Sequence[Tuple[int, ...]],
    count: int = 100,
    seed: int = 0,
) -> List[Tuple[int, ...]]:
    """Check ``count`` random candidate points not used by the guess; returns mismatches."""
    used = set(guess.fit_points) | set(guess.validation_points)
    pool = [p for p in candidates if p not in used]
    rng = random.Random(seed)
    sample = rng.sample(pool, min(count, len(pool)))
    return [p for p in sorted(sample) if guess(*p) != Fraction(oracle(*p))]


# oracles backed by the recurrence ----------------------------------------

class SnMoments:
    """Lazily extended S_n moment tables (one recurrence sweep, grown on demand)."""

    def __init__(self, order: int):
        self.order = order
        self._tables: Dict[int, MomentTable] = {}
        self._lock = threading.Lock()

    def table(self, n: int) -> MomentTable:
        with self._lock:
            if n not in self._tables:
                top = max(n, 2 * max(self._tables, default=0))
                for t in all_tables(top, self.order):
                    self._tables.setdefault(t.n, t)
            return self._tables[n]

    def oracle(self, flavour: str, r: int, s: int) -> Callable[[int], Fraction]:
        return lambda n: getattr(self.table(n), flavour)[r][s]


class LastEntryMoments:
    """Moment tables for permutations of length n ending in i, grown on demand."""

    def __init__(self, order: int):
        self.order = order
        self._rows: Dict[int, List[MomentTable]] = {}
        self._lock = threading.Lock()

    def table(self, n: int, i: int) -> MomentTable:
        with self._lock:
            if n not in self._rows:
                top = max(n, 2 * max(self._rows, default=0))
                for row in f_table(top, self.order):
                    if row.n in self._rows:
                        continue
                    pop = factorial(row.n - 1)
                    self._rows[row.n] = [
                        moment_table_from_series(row[k], row.n, pop, k, self.order)
                        for k in range(1, row.n + 1)
                    ]
            return self._rows[n][i - 1]

    def oracle(self, flavour: str, r: int, s: int) -> Callable[[int, int], Fraction]:
        return lambda n, i: getattr(self.table(n, i), flavour)[r][s]


# leading-term families ----------------------------------------------------

def double_factorial_ratio(r: int) -> Fraction:
    """(2r)! / (2^r r!), the 2r-th moment of a standard normal."""
    return Fraction(factorial(2 * r), 2**r * factorial(r))


@dataclass(frozen=True)
class LeadingTermSpec:
    """Expected leading form of FM(a, b): ``form`` holds the monomials of total
    degree ``degree`` (it may be empty, meaning the top degree must vanish)."""

    parity: str
    a: int
    b: int
    r: int
    s: int
    degree: int
    form: Tuple[Tuple[Monomial, Fraction], ...]
    variables: Tuple[str, ...] = ("n", "i")

    def as_poly(self) -> Poly:
        return dict(self.form)

    def to_json(self) -> dict:
        return {
            "parity": self.parity,
            "degree": self.degree,
            "form": {monomial_str(m, self.variables): fraction_str(c) for m, c in self.form},
            "text": poly_str(self.as_poly(), self.variables),
        }


def _expand_binomial_product(parts: Sequence[Tuple[Fraction, Poly]]) -> Poly:
    out: Poly = {(0, 0): Fraction(1)}
    for scale, p in parts:
        new: Poly = {}
        for m1, c1 in out.items():
            for m2, c2 in p.items():
                k = (m1[0] + m2[0], m1[1] + m2[1])
                new[k] = new.get(k, Fraction(0)) + c1 * c2 * scale
        out = {k: v for k, v in new.items() if v}
    return out


def leading_form(a: int, b: int) -> LeadingTermSpec:
    """Leading form in (n, i) of the central factorial moment FM(a, b)."""
    if a < 0 or b < 0:
        raise ValueError("orders must be nonnegative")
    ra, rb = (a + 1) // 2, (b + 1) // 2  # family parameters r, s
    c = double_factorial_ratio(ra) * double_factorial_ratio(rb)
    if a % 2 == 0 and b % 2 == 0:
        parity = "even-even"
        deg = 3 * (ra + rb)
        form = {(deg, 0): c * Fraction(1, 36) ** (ra + rb)}
    elif a % 2 == 0:
        parity = "even-odd"
        deg = 3 * (ra + rb) - 3
        base = c * Fraction(1, 36) ** (ra + rb - 1)
        cubic = {
            (3, 0): Fraction(-(rb - 1)),
            (2, 1): Fraction(-6 * ra),
            (1, 2): Fraction(18 * ra),
            (0, 3): Fraction(-12 * ra),
        }
        form = _expand_binomial_product([(base, {(deg - 3, 0): Fraction(1)}), (Fraction(1), cubic)])
    elif b % 2 == 0:
        parity = "odd-even"
        deg = 3 * (ra + rb) - 3
        form = {(deg, 0): -c * Fraction(1, 36) ** (ra + rb - 1) * (ra - 1)}
    else:
        parity = "odd-odd"
        deg = 3 * (ra + rb) - 4
        base = c * Fraction(1, 36) ** (ra + rb - 1) * Fraction(9, 2)
        square = {(2, 0): Fraction(1), (1, 1): Fraction(-4), (0, 2): Fraction(4)}
        form = _expand_binomial_product([(base, {(deg - 2, 0): Fraction(1)}), (Fraction(1), square)])
    form = {m: v for m, v in form.items() if v}
    return LeadingTermSpec(parity, a, b, ra, rb, deg, tuple(sorted(form.items(), reverse=True)))


def leading_form_all(a: int, b: int) -> LeadingTermSpec:
    """Leading form in n of FM(a, b) over all of S_n.

    S_n moments are FM(a, b)(n+1, n+1), so the bivariate form is evaluated on
    n -> n+1, i -> n+1 and only its degree-``degree`` part is kept.
    """
    spec = leading_form(a, b)
    coeff = Fraction(0)
    for (ea, eb), c in spec.form:
        # top coefficient of (n+1)^(ea+eb)
        coeff += c
    form = ((((spec.degree,), coeff),) if coeff else ())
    return LeadingTermSpec(spec.parity, a, b, spec.r, spec.s, spec.degree, form, ("n",))


@dataclass
class LeadingReport:
    a: int
    b: int
    scope: str
    spec: LeadingTermSpec
    guess: GuessedPoly
    offending: Poly
    residual_degree: int

    @property
    def passed(self) -> bool:
        return self.guess.validated and not self.offending

    def to_json(self) -> dict:
        return {
            "family": self.spec.parity,
            "r": self.a,
            "s": self.b,
            "scope": self.scope,
            "guessed_poly": self.guess.coefficients_json(),
            "status": self.guess.status,
            "residual_degree": self.residual_degree,
            "expected_leading": self.spec.to_json(),
            "offending": {monomial_str(m, self.guess.variables): fraction_str(v) for m, v in self.offending.items()},
            "passed": self.passed,
        }


def check_leading_terms(guess: GuessedPoly, spec: LeadingTermSpec, scope: str = "last") -> LeadingReport:
    """Subtract the expected form; anything left at or above its degree is a mismatch."""
    if not guess.validated:
        raise ValueError("leading-term check needs a validated guess")
    residual = poly_sub(guess.coefficients, spec.as_poly())
    offending = {m: v for m, v in residual.items() if sum(m) >= spec.degree}
    return LeadingReport(spec.a, spec.b, scope, spec, guess, offending, poly_degree(residual))


def guess_fm(source, a: int, b: int, degree_cap: Optional[int] = None) -> GuessedPoly:
    """Guess FM(a, b) from a ``LastEntryMoments`` (bivariate) or ``SnMoments``."""
    d = degree_bound(a, b)
    cap = d + 4 if degree_cap is None else degree_cap
    if isinstance(source, LastEntryMoments):
        return guess_bivariate(source.oracle("central_factorial", a, b), d, 2, cap)
    return guess_univariate(source.oracle("central_factorial", a, b), d, 1, cap)


def leading_check(source, a: int, b: int, degree_cap: Optional[int] = None) -> LeadingReport:
    guess = guess_fm(source, a, b, degree_cap)
    if isinstance(source, LastEntryMoments):
        spec, scope = leading_form(a, b), "last"
    else:
        spec, scope = leading_form_all(a, b), "all"
    if not guess.validated:
        return LeadingReport(a, b, scope, spec, guess, {}, guess.degree())
    return check_leading_terms(guess, spec, scope)


# asymptotics --------------------------------------------------------------

EVEN_EVEN = "even-even"
ODD_ODD = "odd-odd"


@dataclass(frozen=True)
class AsymptoticSpec:
    """Expected 1/n expansion of the normalized moment alpha(a, b) over S_n."""

    family: str
    r: int
    s: int
    coefficients: Tuple[Fraction, ...]

    @property
    def orders(self) -> Tuple[int, int]:
        if self.family == EVEN_EVEN:
            return 2 * self.r, 2 * self.s
        return 2 * self.r - 1, 2 * self.s - 1


def alpha_spec(family: str, r: int, s: int) -> AsymptoticSpec:
    c = double_factorial_ratio(r) * double_factorial_ratio(s)
    if family == EVEN_EVEN:
        return AsymptoticSpec(family, r, s, (c, -c * Fraction(9 * (r * r + s * s - r - s), 25)))
    if family == ODD_ODD:
        if r < 1 or s < 1:
            raise ValueError("odd-odd family needs r, s >= 1")
        c2 = Fraction(-81, 50) * (r * r + s * s) + Fraction(243, 50) * (r + s) - Fraction(1773, 100)
        return AsymptoticSpec(family, r, s, (Fraction(0), c * Fraction(9, 2), c * c2))
    raise ValueError(f"alpha families are {EVEN_EVEN!r} and {ODD_ODD!r}; mixed parities vanish identically")


def fit_inverse_powers(values: Dict[int, Fraction], terms: int = 3) -> List[Fraction]:
    """Exact c_0 .. c_{terms-1} with sum_k c_k / n^k through the given points."""
    ns = sorted(values)[-terms:]
    if len(ns) < terms:
        raise ValueError(f"need {terms} points, got {len(ns)}")
    A = [[Fraction(1, n**k) for k in range(terms)] for n in ns]
    return bareiss_solve(A, [values[n] for n in ns])


def expansion_at_infinity(num: Poly, den: Poly, power: int, terms: int) -> List[Fraction]:
    """Coefficients of x^0..x^(terms-1), x = 1/n, of num(n) / den(n)^power.

    Requires deg(num) <= power * deg(den).
    """
    dn = poly_degree(num)
    dd = poly_degree(den)
    shift = power * dd - dn
    if shift < 0:
        raise ValueError("numerator grows faster than denominator")
    # reversed coefficient lists: p(n) = n^deg * sum_k p_k x^k
    nrev = [num.get((dn - k,), Fraction(0)) for k in range(dn + 1)]
    drev = [den.get((dd - k,), Fraction(0)) for k in range(dd + 1)]
    width = terms + shift
    dpow = [Fraction(1)] + [Fraction(0)] * (width - 1)
    for _ in range(power):
        dpow = [sum(dpow[j] * drev[k - j] for j in range(k + 1) if k - j < len(drev)) for k in range(width)]
    nser = (nrev + [Fraction(0)] * width)[:width]
    # series division nser / dpow
    q = [Fraction(0)] * width
    for k in range(width):
        acc = nser[k] - sum(q[j] * dpow[k - j] for j in range(k))
        q[k] = acc / dpow[0]
    return ([Fraction(0)] * shift + q)[:terms]


@dataclass
class AlphaRow:
    spec: AsymptoticSpec
    n_values: Tuple[int, ...]
    fitted: List[Fraction]
    exact: Optional[List[Fraction]]
    c0_rel_err: float
    c1_rel_err: float
    c2_rel_err: Optional[float]
    tolerance: float
    c2_tolerance: Optional[float]
    c0_tolerance: Optional[float] = None

    @property
    def fit_passed(self) -> bool:
        tol0 = self.tolerance if self.c0_tolerance is None else self.c0_tolerance
        ok = self.c0_rel_err <= tol0 and self.c1_rel_err <= self.tolerance
        if self.c2_tolerance is not None and self.c2_rel_err is not None:
            ok = ok and self.c2_rel_err <= self.c2_tolerance
        return ok

    @property
    def exact_passed(self) -> Optional[bool]:
        if self.exact is None:
            return None
        want = list(self.spec.coefficients)
        return self.exact[: len(want)] == want

    def to_json(self) -> dict:
        a, b = self.spec.orders
        return {
            "family": self.spec.family,
            "r": self.spec.r,
            "s": self.spec.s,
            "moment": [a, b],
            "n_values": list(self.n_values),
            "expected_coeffs": [fraction_str(c) for c in self.spec.coefficients],
            "fitted_asymptotic_coeffs": [fraction_str(c) for c in self.fitted],
            "fitted_float": [float(c) for c in self.fitted],
            "exact_expansion": None if self.exact is None else [fraction_str(c) for c in self.exact],
            "rel_err": [self.c0_rel_err, self.c1_rel_err, self.c2_rel_err],
            "tolerances": [self.c0_tolerance or self.tolerance, self.tolerance, self.c2_tolerance],
            "fit_passed": self.fit_passed,
            "exact_passed": self.exact_passed,
        }


def _rel_err(got: Fraction, want: Fraction) -> float:
    if want == 0:
        return float(abs(got))
    return float(abs(got - want) / abs(want))


def check_alpha_asymptotics(
    family: str,
    pairs: Iterable[Tuple[int, int]],
    n_values: Sequence[int] = (40, 50, 60),
    tolerance: float = 1e-2,
    c2_tolerance: Optional[float] = None,
    c0_tolerance: Optional[float] = None,
    exact: bool = True,
    source: Optional[SnMoments] = None,
) -> List[AlphaRow]:
    """Fit c0 + c1/n + c2/n^2 to exact normalized moments at ``n_values``.

    With ``exact`` set, the moment and variance polynomials are also guessed
    and the 1/n expansion of their quotient is computed exactly.

    For a zero expected coefficient the error is absolute.
    """
    pairs = list(pairs)
    order = max(max(alpha_spec(family, r, s).orders) for r, s in pairs)
    src = source if source is not None and source.order >= order else SnMoments(max(order, 2))
    rows = []
    variance = None
    for r, s in pairs:
        spec = alpha_spec(family, r, s)
        a, b = spec.orders
        vals = {n: src.table(n).normalized[a][b] for n in n_values}
        fitted = fit_inverse_powers(vals, 3)
        exact_coeffs = None
        if exact:
            if variance is None:
                variance = guess_univariate(src.oracle("central_power", 2, 0), degree_bound(2, 0), 1)
            moment = guess_univariate(src.oracle("central_power", a, b), degree_bound(a, b), 1, degree_bound(a, b) + 4)
            if moment.validated and variance.validated:
                exact_coeffs = expansion_at_infinity(moment.coefficients, variance.coefficients, (a + b) // 2, 3)
        want = spec.coefficients
        e0 = _rel_err(fitted[0], want[0])
        e1 = _rel_err(fitted[1], want[1])
        e2 = _rel_err(fitted[2], want[2]) if len(want) > 2 else None
        rows.append(AlphaRow(spec, tuple(n_values), fitted, exact_coeffs, e0, e1, e2, tolerance,
                             c2_tolerance if len(want) > 2 else None, c0_tolerance))
    return rows


# finale ratios ------------------------------------------------------------

@dataclass(frozen=True)
class FinaleRatios:
    """Normalized central factorial moments of (inv, maj) on permutations
    ending in i, with V = FM(2,0) = FM(0,2):

    even_even = FM(2r,2s) / V^(r+s)
    odd_odd   = FM(2r-1,2s-1) / V^(r+s-1)
    even_odd_sq, odd_even_sq: the half-integer-power ratios, returned as
    sign(x) * x^2 so they stay rational.
    """

    r: int
    s: int
    n: int
    i: int
    even_even: Fraction
    even_odd_sq: Fraction
    odd_even_sq: Fraction
    odd_odd: Fraction

    def floats(self) -> Dict[str, float]:
        def signed_root(x: Fraction) -> float:
            return math.copysign(math.sqrt(abs(float(x))), float(x))

        return {
            "even_even": float(self.even_even),
            "even_odd": signed_root(self.even_odd_sq),
            "odd_even": signed_root(self.odd_even_sq),
            "odd_odd": float(self.odd_odd),
        }

    def to_json(self) -> dict:
        return {
            "r": self.r, "s": self.s, "n": self.n, "i": self.i,
            "even_even": fraction_str(self.even_even),
            "even_odd_sq": fraction_str(self.even_odd_sq),
            "odd_even_sq": fraction_str(self.odd_even_sq),
            "odd_odd": fraction_str(self.odd_odd),
            "float": self.floats(),
        }


def finale_ratios(r: int, s: int, n: int, i: int, table: Optional[MomentTable] = None) -> FinaleRatios:
    if r < 1 or s < 1:
        raise ValueError("finale ratios need r, s >= 1")
    if table is None:
        table = LastEntryMoments(2 * max(r, s)).table(n, i)
    if table.order < 2 * max(r, s):
        raise MomentError(f"table order {table.order} too small for r={r}, s={s}")
    fm = table.central_factorial
    v = fm[2][0]
    if v == 0:
        raise MomentError(f"FM(2,0)({n},{i}) = 0; ratios undefined (need n >= 3)")
    if fm[0][2] != v:
        raise MomentError("FM(2,0) and FM(0,2) differ")
    k = r + s

    def signed_sq(x: Fraction, power: int) -> Fraction:
        return (1 if x >= 0 else -1) * x * x / v**power

    return FinaleRatios(
        r, s, n, i,
        fm[2 * r][2 * s] / v**k,
        signed_sq(fm[2 * r][2 * s - 1], 2 * k - 1),
        signed_sq(fm[2 * r - 1][2 * s], 2 * k - 1),
        fm[2 * r - 1][2 * s - 1] / v ** (k - 1),
    )


def finale_series(r: int, s: int, n_values: Sequence[int], pick_i: Callable[[int], int]) -> List[FinaleRatios]:
    """Finale ratios along ``n_values`` at i = pick_i(n), from a single sweep."""
    order = 2 * max(r, s)
    want = set(n_values)
    out = {}
    for row in f_table(max(n_values), order):
        if row.n in want:
            i = pick_i(row.n)
            t = moment_table_from_series(row[i], row.n, factorial(row.n - 1), i, order)
            out[row.n] = finale_ratios(r, s, row.n, i, t)
    return [out[n] for n in n_values]


def successive_slope_errors(values: Sequence[Fraction], n_values: Sequence[int], power: int = 1) -> List[float]:
    """For consecutive n, |v(n2)/v(n1)| against (n1/n2)^power, as relative error."""
    errs = []
    for (n1, v1), (n2, v2) in zip(zip(n_values, values), zip(n_values[1:], values[1:])):
        ratio = abs(Fraction(v2) / Fraction(v1))
        expected = Fraction(n1, n2) ** power
        errs.append(float(abs(ratio - expected) / expected))
    return errs
