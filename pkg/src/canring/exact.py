"""Exact arithmetic: rationals, sparse multivariate polynomials, and
fraction-free linear algebra over the rationals.

Rationals are plain :class:`fractions.Fraction` values, which already keep
lowest terms with a positive denominator.  Polynomials store a map from
exponent tuples to nonzero Fraction coefficients.  Everything here is
immutable once built.
"""
from __future__ import annotations

import math
import random
import re
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

try:  # exact C backend for large fraction-free eliminations
    import flint as _flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    _flint = None

Rational = Fraction
Exponent = tuple[int, ...]


class DimensionError(ValueError):
    pass


class VariableMismatch(ValueError):
    pass


class PolynomialSyntaxError(ValueError):
    pass


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def floor_rational(r) -> int:
    return math.floor(as_rational(r))


def fractional_part(r) -> Fraction:
    r = as_rational(r)
    return r - math.floor(r)


def lcm(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------

def grlex_key(exp: Exponent) -> tuple:
    """Sort key for graded lexicographic order, first variable largest."""
    return (sum(exp), exp)


def monomials_of_degree(nvars: int, degree: int) -> list[Exponent]:
    """All exponent tuples of the given total degree, grlex-descending."""
    if degree < 0:
        return []
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    out.sort(key=grlex_key, reverse=True)
    return out


class Polynomial:
    """A polynomial with rational coefficients in an ordered list of variables."""

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, object] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise DimensionError(f"exponent {exp} does not match {n} variables")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            c = as_rational(coeff)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self.terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables)

    @classmethod
    def constant(cls, variables: Sequence[str], value=1) -> "Polynomial":
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def monomial(cls, variables: Sequence[str], exp: Exponent, coeff=1) -> "Polynomial":
        return cls(variables, {tuple(exp): coeff})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Polynomial":
        variables = tuple(variables)
        exp = [0] * len(variables)
        exp[variables.index(name)] = 1
        return cls(variables, {tuple(exp): 1})

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponent, Fraction]) -> "Polynomial":
        p = object.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def weighted_degrees(self, weights: Sequence[Sequence[int]]) -> set[tuple[int, ...]]:
        """Set of weight vectors of the terms; weights[k] is the weight of variable k."""
        out = set()
        for exp in self.terms:
            out.add(tuple(sum(e * w[j] for e, w in zip(exp, weights)) for j in range(len(weights[0]))))
        return out

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=grlex_key)
        return exp, self.terms[exp]

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    # arithmetic
    def _check(self, other: "Polynomial"):
        if self.variables != other.variables:
            raise VariableMismatch(f"{self.variables} vs {other.variables}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.variables, other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            v = out.get(exp, 0) + c
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return Polynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = as_rational(other)
            if not c:
                return Polynomial.zero(self.variables)
            return Polynomial._raw(self.variables, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, exp: Exponent, coeff=1) -> "Polynomial":
        """Multiply by the monomial coeff * x^exp."""
        c = as_rational(coeff)
        return Polynomial._raw(
            self.variables,
            {tuple(a + b for a, b in zip(e, exp)): v * c for e, v in self.terms.items()} if c else {},
        )

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Multivariate division by one polynomial under grlex.

        Returns (quotient, remainder) with self = quotient*divisor + remainder
        and no term of the remainder divisible by the leading monomial of divisor.
        """
        self._check(divisor)
        lead_exp, lead_c = divisor.leading_term()
        rest = dict(self.terms)
        quot: dict[Exponent, Fraction] = {}
        rem: dict[Exponent, Fraction] = {}
        while rest:
            exp = max(rest, key=grlex_key)
            c = rest[exp]
            diff = tuple(a - b for a, b in zip(exp, lead_exp))
            if all(x >= 0 for x in diff):
                q = c / lead_c
                quot[diff] = quot.get(diff, 0) + q
                for e2, c2 in divisor.terms.items():
                    e = tuple(a + b for a, b in zip(diff, e2))
                    v = rest.get(e, 0) - q * c2
                    if v:
                        rest[e] = v
                    else:
                        rest.pop(e, None)
            else:
                rem[exp] = c
                del rest[exp]
        return Polynomial(self.variables, quot), Polynomial._raw(self.variables, rem)

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Evaluate at polynomials: variable k is replaced by images[k]."""
        if len(images) != len(self.variables):
            raise DimensionError("need one image per variable")
        target = images[0].variables
        result = Polynomial.zero(target)
        cache: dict[tuple[int, int], Polynomial] = {}
        for exp, c in self.terms.items():
            term = Polynomial.constant(target, c)
            for k, e in enumerate(exp):
                if e:
                    key = (k, e)
                    if key not in cache:
                        cache[key] = images[k] ** e
                    term = term * cache[key]
            result = result + term
        return result

    def rename(self, variables: Sequence[str]) -> "Polynomial":
        if len(variables) != len(self.variables):
            raise DimensionError("variable count changed")
        return Polynomial._raw(tuple(variables), dict(self.terms))

    def scale_to_primitive(self) -> "Polynomial":
        """Scalar multiple with coprime integer coefficients and positive leading coefficient."""
        if not self.terms:
            return self
        den = lcm(c.denominator for c in self.terms.values())
        ints = [int(c * den) for c in self.terms.values()]
        g = reduce(math.gcd, ints)
        lead = self.leading_term()[1]
        s = Fraction(den, g) * (1 if lead > 0 else -1)
        return self * s

    # comparison
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self.terms == other.terms
        if not self.terms:
            return as_rational(other) == 0
        return self.terms == Polynomial.constant(self.variables, other).terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"

    def __str__(self) -> str:
        return format_polynomial(self)


def format_rational(r) -> str:
    r = as_rational(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def format_monomial(variables: Sequence[str], exp: Exponent) -> str:
    parts = []
    for name, e in zip(variables, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for exp, c in p.sorted_terms():
        mono = format_monomial(p.variables, exp)
        mag = abs(c)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        sign = "-" if c < 0 else "+"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[A-Za-z]\w*)(?:\^(?P<exp>\d+))?|(?P<op>[*+-]))")


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``3*x0^2*x1 - 1/2 x2`` style text over the given variables.

    Factors inside a term may be joined by ``*`` or whitespace.
    """
    variables = tuple(variables)
    index = {v: i for i, v in enumerate(variables)}
    pos = 0
    text = text.strip()
    if not text:
        raise PolynomialSyntaxError("empty polynomial")
    terms: dict[Exponent, Fraction] = {}
    sign = 1
    coeff = Fraction(1)
    exp = [0] * len(variables)
    have_factor = False
    expect_factor = True

    def flush():
        nonlocal coeff, exp, have_factor, sign
        if not have_factor:
            raise PolynomialSyntaxError(f"missing term near position {pos} in {text!r}")
        key = tuple(exp)
        terms[key] = terms.get(key, Fraction(0)) + sign * coeff
        coeff, exp, have_factor, sign = Fraction(1), [0] * len(variables), False, 1

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r} in {text!r}")
        pos = m.end()
        if m.group("num"):
            try:
                coeff *= Fraction(m.group("num"))
            except ZeroDivisionError:
                raise PolynomialSyntaxError(f"zero denominator in {text!r}") from None
            have_factor, expect_factor = True, False
        elif m.group("var"):
            name = m.group("var")
            if name not in index:
                raise PolynomialSyntaxError(f"unknown variable {name!r}; expected one of {', '.join(variables)}")
            exp[index[name]] += int(m.group("exp") or 1)
            have_factor, expect_factor = True, False
        else:
            op = m.group("op")
            if op == "*":
                if expect_factor:
                    raise PolynomialSyntaxError(f"dangling '*' in {text!r}")
                expect_factor = True
            else:
                if have_factor:
                    flush()
                sign = sign * (-1 if op == "-" else 1)
                expect_factor = True
    if expect_factor and not have_factor:
        raise PolynomialSyntaxError(f"polynomial ends with an operator: {text!r}")
    flush()
    return Polynomial(variables, terms)


# --------------------------------------------------------------------------
# Linear algebra
# --------------------------------------------------------------------------

class RationalMatrix:
    """Dense immutable matrix of Fractions."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Sequence[Sequence[object]], ncols: int | None = None):
        self.rows = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if ncols is None:
            if not self.rows:
                raise DimensionError("column count needed for an empty matrix")
            ncols = len(self.rows[0])
        self.ncols = ncols
        for row in self.rows:
            if len(row) != ncols:
                raise DimensionError(f"row of length {len(row)} in a matrix with {ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "RationalMatrix":
        return cls([[0] * c for _ in range(r)], c)

    def __matmul__(self, vec: Sequence[object]) -> list[Fraction]:
        if len(vec) != self.ncols:
            raise DimensionError("vector length does not match column count")
        v = [as_rational(x) for x in vec]
        return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.rows]

    def __repr__(self) -> str:
        return f"RationalMatrix({[[format_rational(x) for x in r] for r in self.rows]})"


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        den = lcm(as_rational(x).denominator for x in row) if row else 1
        out.append([int(as_rational(x) * den) for x in row])
    return out


def bareiss_echelon(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the nonzero echelon rows and their pivot columns.
    """
    a = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    prev = 1
    r = 0
    for col in range(ncols):
        if r >= len(a):
            break
        piv = next((i for i in range(r, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        pr = a[r]
        for i in range(r + 1, len(a)):
            ri = a[i]
            f = ri[col]
            if f:
                for j in range(col + 1, ncols):
                    ri[j] = (p * ri[j] - f * pr[j]) // prev
            else:
                for j in range(col + 1, ncols):
                    ri[j] = (p * ri[j]) // prev
            ri[col] = 0
        prev = p
        pivots.append(col)
        r += 1
    return a[:r], pivots


def bareiss_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    return len(bareiss_echelon(rows, ncols)[1])


def int_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    """Exact rank of an integer matrix (flint fraction-free LU when available)."""
    rows = [r for r in rows if any(r)]
    if not rows or not ncols:
        return 0
    if _flint is not None and len(rows) * ncols > 400:
        return _flint.fmpz_mat(rows).rank()
    return bareiss_rank(rows, ncols)


RANK_PRIME = 2_305_843_009_213_693_951  # 2^61 - 1


def int_rank_mod(rows: Sequence[Sequence[int]], ncols: int, p: int = RANK_PRIME) -> int:
    """Rank over Z/p.  Never larger than the rank over Q, so it is a certified lower bound."""
    rows = [[x % p for x in r] for r in rows if any(r)]
    if not rows or not ncols:
        return 0
    if _flint is not None and p < 2**63:
        return _flint.nmod_mat(rows, p).rank()
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], -1, p)
        for i in range(r + 1, len(rows)):
            f = rows[i][col] * inv % p
            if f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def int_pivot_columns(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Pivot columns of the row echelon form (leading columns of the row space)."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    if _flint is not None and len(rows) * ncols > 400:
        ech, _, rank = _flint.fmpz_mat(rows).rref()
        pivots = []
        for i in range(rank):
            j = pivots[-1] + 1 if pivots else 0
            while ech[i, j] == 0:
                j += 1
            pivots.append(j)
        return pivots
    return bareiss_echelon(rows, ncols)[1]


def rank(M: RationalMatrix) -> int:
    return int_rank(_integer_rows(M.rows), M.ncols)


def kernel_basis(M: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space {v : M v = 0}."""
    ech, pivots = bareiss_echelon(_integer_rows(M.rows), M.ncols)
    free = [j for j in range(M.ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.ncols
        v[f] = Fraction(1)
        for row, pc in reversed(list(zip(ech, pivots))):
            s = sum((row[j] * v[j] for j in range(pc + 1, M.ncols)), Fraction(0))
            v[pc] = -s / row[pc]
        basis.append(tuple(v))
    return basis


def span_contains(rows: Sequence[Sequence[object]], v: Sequence[object]) -> bool:
    rows = [list(r) for r in rows]
    if rows and any(len(r) != len(v) for r in rows):
        raise DimensionError("vector length does not match the spanning rows")
    n = len(v)
    ints = _integer_rows([[as_rational(x) for x in r] for r in rows])
    vi = _integer_rows([[as_rational(x) for x in v]])[0]
    return int_rank(ints, n) == int_rank(ints + [vi], n)


def int_nullspace(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Integer basis of the right null space of an integer matrix."""
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    if _flint is not None and len(rows) * ncols > 400:
        N, nullity = _flint.fmpz_mat(rows).nullspace()
        out = []
        for k in range(nullity):
            col = [int(N[i, k]) for i in range(ncols)]
            g = reduce(math.gcd, col)
            out.append([c // g for c in col] if g > 1 else col)
        return out
    basis = kernel_basis(RationalMatrix(rows, ncols))
    out = []
    for v in basis:
        den = lcm(x.denominator for x in v)
        col = [int(x * den) for x in v]
        g = reduce(math.gcd, col)
        out.append([c // g for c in col] if g > 1 else col)
    return out


def _dense(rows: Sequence[Mapping[int, int]], ncols: int) -> list[list[int]]:
    out = []
    for row in rows:
        if row:
            dense = [0] * ncols
            for j, v in row.items():
                dense[j] = v
            out.append(dense)
    return out


def sparse_rank(rows: Sequence[Mapping[int, int]], ncols: int) -> int:
    """Rank of an integer matrix given as column->value dicts."""
    return int_rank(_dense(rows, ncols), ncols)


def sparse_rank_bounded(rows: Sequence[Mapping[int, int]], ncols: int, upper: int) -> int:
    """Exact rank when it is known not to exceed ``upper``.

    A modular rank that already reaches ``upper`` is exact; otherwise the
    rank is recomputed over the integers.
    """
    rows = [r for r in rows if r]
    if upper <= 0 or not rows:
        return 0 if not rows else int_rank(_dense(rows, ncols), ncols)
    if len(rows) > upper + 16:
        # a random sparse combination of the rows has no larger rank, so reaching upper still certifies
        rng = random.Random(len(rows) * 1_000_003 + ncols)
        k = upper + 16
        mixed: list[dict[int, int]] = [{} for _ in range(k)]
        for row in rows:
            for target in (rng.randrange(k), rng.randrange(k)):
                c = rng.randrange(1, RANK_PRIME)
                acc = mixed[target]
                for j, v in row.items():
                    acc[j] = (acc.get(j, 0) + c * v) % RANK_PRIME
        if int_rank_mod(_dense(mixed, ncols), ncols) >= upper:
            return upper
    dense = _dense(rows, ncols)
    if int_rank_mod(dense, ncols) >= upper:
        return upper
    return int_rank(dense, ncols)


def sparse_pivot_columns(rows: Sequence[Mapping[int, int]], ncols: int) -> list[int]:
    return int_pivot_columns(_dense(rows, ncols), ncols)
