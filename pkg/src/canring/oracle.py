"""Brute-force computation of minimal generator and relation degrees.

The section ring is handled degree by degree.  A degree-d element is its
numerator N, a polynomial of degree deg(floor(dD)) in frame coordinates
(the first m+1, resp. 4, components become the coordinates y_k = f_k).  Two
elements multiply as

    N1 * N2 * prod_i f_i^(floor((d1+d2) a_i) - floor(d1 a_i) - floor(d2 a_i)).

Three engines share this model:

* ``toric``: when every component is a frame coordinate the ring is the
  semigroup ring of the lattice points of the cone, generators are the
  irreducible points and the relation count at a point sigma is one less
  than the number of connected components of the graph on the generators h
  with sigma - h in the cone (edge when sigma - h - h' is in the cone).
* ``koszul``: generators by ranks of product spans, relation counts by the
  first Koszul homology  sum_g dim R_{d-deg g} - dim R_d - rank(d2).
* ``words``: the literal route; enumerate generator words, take kernels of
  the evaluation map and subtract the span of lower relations times words.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import (
    Polynomial,
    int_nullspace,
    int_rank,
    lcm,
    sparse_pivot_columns,
    sparse_rank,
    sparse_rank_bounded,
)
from .geometry import (
    QDivisor,
    floor_degree,
    floor_divisor,
    frame_polynomials,
    ghost_complete,
    graded_dimension,
    monomials_of_weight,
)

ENGINES = ("auto", "toric", "koszul", "words")


@dataclass(frozen=True)
class Caps:
    words: int = 200_000
    dmax: int = 64

    @classmethod
    def parse(cls, text: str | None) -> "Caps":
        caps = cls()
        if not text:
            return caps
        values = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in ("words", "dmax"):
                raise ValueError(f"unknown cap {key!r} in {text!r}")
            try:
                values[key] = int(val)
            except ValueError:
                raise ValueError(f"cap {key!r} needs an integer, got {val!r}") from None
            if values[key] < 1:
                raise ValueError(f"cap {key!r} must be positive")
        return cls(**{**caps.__dict__, **values})

    @classmethod
    def from_env(cls) -> "Caps":
        return cls.parse(os.environ.get("CANRING_CAPS"))


class CapExceeded(RuntimeError):
    pass


@dataclass
class OracleReport:
    engine: str
    d_max: int
    generators: dict[int, int] = field(default_factory=dict)
    relations: dict[int, int] | None = None
    hilbert: list[int] = field(default_factory=list)
    generator_numerators: dict[int, list[Polynomial]] = field(default_factory=dict)
    capped: bool = False
    cap_reason: str | None = None
    complete_through: int = 0  # last degree fully processed

    def generator_degrees(self) -> list[int]:
        return sorted(d for d, n in self.generators.items() if n)

    def relation_degrees(self) -> list[int]:
        return sorted(d for d, n in (self.relations or {}).items() if n)

    def max_generator_degree(self) -> int:
        return max(self.generator_degrees(), default=0)

    def max_relation_degree(self) -> int:
        return max(self.relation_degrees(), default=0)

    def generator_multiset(self) -> dict[int, int]:
        return {d: n for d, n in sorted(self.generators.items()) if n}

    def relation_multiset(self) -> dict[int, int]:
        return {d: n for d, n in sorted((self.relations or {}).items()) if n}

    def to_json(self) -> dict:
        out = {
            "engine": self.engine,
            "d_max": self.d_max,
            "complete_through": self.complete_through,
            "capped": self.capped,
            "generators": {str(d): n for d, n in self.generator_multiset().items()},
            "generator_numerators": {
                str(d): [str(p) for p in polys] for d, polys in sorted(self.generator_numerators.items()) if polys
            },
            "hilbert_function": self.hilbert,
        }
        if self.relations is not None:
            out["relations"] = {str(d): n for d, n in self.relation_multiset().items()}
        if self.cap_reason:
            out["cap_reason"] = self.cap_reason
        return out


# --------------------------------------------------------------------------
# Graded pieces in frame coordinates
# --------------------------------------------------------------------------

def _integer_terms(poly: Polynomial) -> dict[tuple[int, ...], int]:
    if not poly.terms:
        return {}
    den = lcm(c.denominator for c in poly.terms.values())
    return {e: int(c * den) for e, c in poly.terms.items()}


class SectionRing:
    """Graded pieces of R_D as numerator spaces in frame coordinates."""

    def __init__(self, D: QDivisor, original: bool = False):
        self.D = ghost_complete(D)
        self.variety = self.D.variety
        self.size = self.variety.frame_size
        self.alphas = self.D.alphas
        # original=True keeps numerators in the input variables instead of frame coordinates
        self.original = original
        self.frame_polys = [c.poly for c in self.D.components] if original else frame_polynomials(self.D)
        self.variables = self.variety.variables
        self.toric = len(self.D.components) == self.size
        self._spaces: dict[int, tuple[list[tuple[int, ...]], dict[tuple[int, ...], int]]] = {}
        self._corr: dict[tuple[int, int], Polynomial] = {}
        self._floors: dict[int, list[int]] = {}

    def floors(self, d: int) -> list[int]:
        if d not in self._floors:
            self._floors[d] = floor_divisor(self.D, d)
        return self._floors[d]

    def space(self, d: int):
        if d not in self._spaces:
            mons = monomials_of_weight(self.variety, floor_degree(self.D, d)) if d >= 0 else []
            self._spaces[d] = (mons, {e: i for i, e in enumerate(mons)})
        return self._spaces[d]

    def dim(self, d: int) -> int:
        return len(self.space(d)[0])

    def correction_exponents(self, d1: int, d2: int) -> list[int]:
        f12, f1, f2 = self.floors(d1 + d2), self.floors(d1), self.floors(d2)
        corr = [a - b - c for a, b, c in zip(f12, f1, f2)]
        if any(c < 0 for c in corr):
            raise AssertionError(f"floor superadditivity violated at {d1}+{d2}")
        return corr

    def correction(self, d1: int, d2: int) -> Polynomial:
        key = (min(d1, d2), max(d1, d2))
        if key not in self._corr:
            out = Polynomial.constant(self.variables, 1)
            for f, e in zip(self.frame_polys, self.correction_exponents(d1, d2)):
                if e:
                    out = out * f ** e
            self._corr[key] = out
        return self._corr[key]

    def multiply(self, n1: Polynomial, d1: int, n2: Polynomial, d2: int) -> Polynomial:
        return n1 * n2 * self.correction(d1, d2)

    def product_denominator(self, poly: Polynomial, d_poly: int, d: int) -> int:
        prod = poly * self.correction(d_poly, d - d_poly)
        return lcm(c.denominator for c in prod.terms.values())

    def shifted_rows(self, poly: Polynomial, d_poly: int, d: int, offset: int = 0, sign: int = 1, scale: int | None = None):
        """Rows of poly * b * correction for every basis monomial b of degree d - d_poly.

        Rows are scaled to integers, by their own lcm of denominators unless
        a common ``scale`` is given.
        """
        prod = poly * self.correction(d_poly, d - d_poly)
        if scale is None:
            terms = _integer_terms(prod)
        else:
            terms = {e: int(c * scale) for e, c in prod.terms.items()}
        _, index = self.space(d)
        out = []
        for b in self.space(d - d_poly)[0]:
            row = {}
            for e, c in terms.items():
                key = tuple(x + y for x, y in zip(e, b))
                row[index[key] + offset] = sign * c
            out.append(row)
        return out

    def to_original(self, numerator: Polynomial) -> Polynomial:
        """Rewrite a frame-coordinate numerator in the original variables."""
        if self.original:
            return numerator
        return numerator.substitute([c.poly for c in self.D.components[: self.size]])

    def vector(self, poly: Polynomial, d: int) -> dict[int, int]:
        _, index = self.space(d)
        return {index[e]: c for e, c in _integer_terms(poly).items()}


# --------------------------------------------------------------------------
# Engines
# --------------------------------------------------------------------------

def _new_generators(ring: SectionRing, gens: list[tuple[int, Polynomial]], d: int) -> list[Polynomial]:
    """Complement monomials of the decomposable part of degree d."""
    mons, _ = ring.space(d)
    if not mons:
        return []
    rows = []
    for e, g in gens:
        if e < d:
            rows.extend(ring.shifted_rows(g, e, d))
    pivots = set(sparse_pivot_columns(rows, len(mons))) if rows else set()
    return [Polynomial.monomial(ring.variables, mons[j]) for j in range(len(mons)) if j not in pivots]


def _koszul_relations(ring: SectionRing, gens: list[tuple[int, Polynomial]], d: int, caps: Caps) -> int:
    live = [(e, g) for e, g in gens if e <= d]
    offsets = []
    total = 0
    for e, _ in live:
        offsets.append(total)
        total += ring.dim(d - e)
    n_rows = sum(
        ring.dim(d - live[i][0] - live[j][0])
        for i in range(len(live))
        for j in range(i + 1, len(live))
        if live[i][0] + live[j][0] <= d
    )
    if n_rows > caps.words:
        raise CapExceeded(f"Koszul matrix in degree {d} needs {n_rows} rows > cap {caps.words}")
    rows = []
    for i in range(len(live)):
        ei, gi = live[i]
        for j in range(i + 1, len(live)):
            ej, gj = live[j]
            t = d - ei - ej
            if t < 0 or not ring.dim(t):
                continue
            # b * (g_i e_j - g_j e_i) for b in R_t, both halves on one scale
            scale = lcm([ring.product_denominator(gi, ei, d - ej), ring.product_denominator(gj, ej, d - ei)])
            part_j = ring.shifted_rows(gi, ei, d - ej, offset=offsets[j], scale=scale)
            part_i = ring.shifted_rows(gj, ej, d - ei, offset=offsets[i], sign=-1, scale=scale)
            # both lists are indexed by the same monomials b of R_t
            for rj, ri in zip(part_j, part_i):
                row = dict(rj)
                row.update(ri)
                rows.append(row)
    # the image of the Koszul map lies in the kernel of (g_i) -> sum g_i, of dimension total - dim R_d
    upper = total - ring.dim(d)
    r2 = sparse_rank_bounded(rows, total, upper) if rows else 0
    return upper - r2


def _run_general(ring: SectionRing, d_max: int, relations: bool, caps: Caps, engine: str) -> OracleReport:
    report = OracleReport(engine=engine, d_max=d_max, relations={} if relations else None)
    report.hilbert = [ring.dim(d) for d in range(d_max + 1)]
    gens: list[tuple[int, Polynomial]] = []
    words_state = _WordsState(ring, caps) if engine == "words" else None
    try:
        for d in range(1, d_max + 1):
            new = _new_generators(ring, gens, d)
            gens.extend((d, g) for g in new)
            report.generators[d] = len(new)
            report.generator_numerators[d] = [ring.to_original(g) for g in new]
            if relations:
                if words_state is not None:
                    report.relations[d] = words_state.step(gens, d)
                else:
                    report.relations[d] = _koszul_relations(ring, gens, d, caps)
            report.complete_through = d
    except CapExceeded as exc:
        report.capped = True
        report.cap_reason = str(exc)
        _truncate(report)
    return report


def _truncate(report: OracleReport):
    last = report.complete_through
    for table in (report.generators, report.generator_numerators, report.relations or {}):
        for d in [d for d in table if d > last]:
            del table[d]


class _WordsState:
    """Literal relation search over monomial words in the generators."""

    def __init__(self, ring: SectionRing, caps: Caps):
        self.ring = ring
        self.caps = caps
        self.words: dict[int, list[tuple[int, ...]]] = {0: [()]}
        self.kernels: dict[int, list[list[int]]] = {}

    def _words(self, gens, d):
        degs = [e for e, _ in gens]
        out = []

        def rec(start, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                if len(out) > self.caps.words:
                    raise CapExceeded(f"more than {self.caps.words} words in degree {d}")
                return
            for k in range(start, len(gens)):
                if degs[k] <= remaining:
                    acc.append(k)
                    rec(k, remaining - degs[k], acc)
                    acc.pop()

        rec(0, d, [])
        return out

    def evaluate(self, gens, word: Sequence[int]) -> Polynomial:
        poly = Polynomial.constant(self.ring.variables, 1)
        deg = 0
        for k in word:
            e, g = gens[k]
            poly = self.ring.multiply(poly, deg, g, e)
            deg += e
        return poly

    def step(self, gens, d) -> int:
        words = self._words(gens, d)
        self.words[d] = words
        dim = self.ring.dim(d)
        # columns = words, rows = numerator monomials
        cols = [self.ring.vector(self.evaluate(gens, w), d) for w in words]
        mat = [[0] * len(words) for _ in range(dim)]
        for j, col in enumerate(cols):
            for i, v in col.items():
                mat[i][j] = v
        kernel = int_nullspace(mat, len(words)) if words else []
        self.kernels[d] = kernel
        if not kernel:
            return 0
        index = {w: j for j, w in enumerate(words)}
        lower = []
        for k, (e, _) in enumerate(gens):
            if e >= d or d - e not in self.kernels:
                continue
            for vec in self.kernels[d - e]:
                row = {}
                for j, c in enumerate(vec):
                    if c:
                        w = tuple(sorted(self.words[d - e][j] + (k,)))
                        row[index[w]] = row.get(index[w], 0) + c
                lower.append(row)
        return len(kernel) - (sparse_rank(lower, len(words)) if lower else 0)


def _run_toric(ring: SectionRing, d_max: int, relations: bool) -> OracleReport:
    report = OracleReport(engine="toric", d_max=d_max, relations={} if relations else None)
    report.hilbert = [ring.dim(d) for d in range(d_max + 1)]
    s = ring.size
    floors = np.array([ring.floors(t) for t in range(d_max + 1)], dtype=np.int64)
    gen_pts = np.zeros((0, s), dtype=np.int64)
    gen_deg = np.zeros(0, dtype=np.int64)
    for d in range(1, d_max + 1):
        mons = ring.space(d)[0]
        if not mons:
            report.generators[d] = 0
            if relations:
                report.relations[d] = 0
            report.complete_through = d
            continue
        pts = np.array(mons, dtype=np.int64) - floors[d]
        if len(gen_deg):
            member = _member_matrix(pts, d, gen_pts, gen_deg, floors)
            reducible = member.any(axis=1)
        else:
            reducible = np.zeros(len(pts), dtype=bool)
        new = pts[~reducible]
        report.generators[d] = len(new)
        report.generator_numerators[d] = [
            ring.to_original(Polynomial.monomial(ring.variables, tuple(int(x) for x in p + floors[d]))) for p in new
        ]
        gen_pts = np.vstack([gen_pts, new])
        gen_deg = np.concatenate([gen_deg, np.full(len(new), d, dtype=np.int64)])
        if relations:
            member = _member_matrix(pts, d, gen_pts, gen_deg, floors)
            total = 0
            for row, sigma in zip(member, pts):
                idx = np.nonzero(row)[0]
                if len(idx) > 1:
                    total += _components(sigma, d, gen_pts[idx], gen_deg[idx], floors) - 1
            report.relations[d] = total
        report.complete_through = d
    return report


def _member_matrix(pts, d, gen_pts, gen_deg, floors):
    """member[p, g] is True when pts[p] - gen_pts[g] lies in the cone."""
    ok_deg = gen_deg <= d
    rest = np.where(ok_deg, d - gen_deg, 0)
    lower = -floors[rest]  # (g, s)
    diff = pts[:, None, :] - gen_pts[None, :, :]
    return (diff >= lower[None, :, :]).all(axis=2) & ok_deg[None, :]


def _components(sigma, d, sub_pts, sub_deg, floors) -> int:
    k = len(sub_deg)
    rest = d - sub_deg[:, None] - sub_deg[None, :]
    ok = rest >= 0
    lower = -floors[np.where(ok, rest, 0)]  # (k, k, s)
    diff = sigma[None, None, :] - sub_pts[:, None, :] - sub_pts[None, :, :]
    adj = (diff >= lower).all(axis=2) & ok
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(*np.nonzero(np.triu(adj, 1))):
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[ra] = rb
    return len({find(x) for x in range(k)})


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------

def compute(D: QDivisor, d_max: int, relations: bool = True, engine: str = "auto", caps: Caps | None = None) -> OracleReport:
    """Minimal generator (and optionally relation) counts of R_D in degrees 1..d_max."""
    caps = caps or Caps.from_env()
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if d_max < 1:
        raise ValueError("d_max must be at least 1")
    ring = SectionRing(D)
    if engine == "auto":
        engine = "toric" if ring.toric else "koszul"
    if engine == "toric" and not ring.toric:
        raise ValueError("toric engine needs every component to be a frame coordinate")
    capped_reason = None
    if d_max > caps.dmax:
        capped_reason = f"d_max {d_max} exceeds cap {caps.dmax}"
        d_max = caps.dmax
    if engine == "toric":
        report = _run_toric(ring, d_max, relations)
    else:
        report = _run_general(ring, d_max, relations, caps, engine)
    if capped_reason:
        report.capped = True
        report.cap_reason = report.cap_reason or capped_reason
    return report


def minimal_generator_degrees(D: QDivisor, d_max: int, **kwargs) -> OracleReport:
    return compute(D, d_max, relations=False, **kwargs)


def minimal_relation_degrees(D: QDivisor, d_max: int, **kwargs) -> OracleReport:
    return compute(D, d_max, relations=True, **kwargs)


def check_dimensions(D: QDivisor, d_max: int) -> bool:
    """Frame-coordinate monomial counts agree with the closed-form dimension."""
    ring = SectionRing(D)
    return all(ring.dim(d) == graded_dimension(ring.D, d) for d in range(d_max + 1))


@dataclass
class Verdict:
    status: str  # PASS, FAIL or INCONCLUSIVE
    generator_bound: int
    relation_bound: Fraction | None
    report: OracleReport
    witness: dict | None = None
    reason: str | None = None

    @property
    def exit_code(self) -> int:
        return {"PASS": 0, "FAIL": 1, "INCONCLUSIVE": 3}[self.status]

    def to_json(self) -> dict:
        from .exact import format_rational

        out = {
            "status": self.status,
            "generator_bound": self.generator_bound,
            "relation_bound": None if self.relation_bound is None else format_rational(self.relation_bound),
        }
        if self.witness:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        out["oracle"] = self.report.to_json()
        return out


def verify_bounds(
    D: QDivisor,
    generator_bound: int,
    relation_bound=None,
    d_max: int | None = None,
    relations: bool = True,
    engine: str = "auto",
    caps: Caps | None = None,
) -> Verdict:
    """Compare oracle degrees with claimed bounds.

    FAIL as soon as a generator or relation lies above its bound.  When the
    oracle could not reach the degree the bounds require, the verdict is
    INCONCLUSIVE rather than PASS.
    """
    from math import floor

    relations = relations and relation_bound is not None
    need = floor(relation_bound) if relations else generator_bound
    if d_max is None:
        d_max = need
    report = compute(D, d_max, relations=relations, engine=engine, caps=caps)
    for d in report.generator_degrees():
        if d > generator_bound:
            return Verdict("FAIL", generator_bound, relation_bound, report,
                           {"kind": "generator", "degree": d, "count": report.generators[d]})
    if relations:
        for d in report.relation_degrees():
            if d > floor(relation_bound):
                return Verdict("FAIL", generator_bound, relation_bound, report,
                               {"kind": "relation", "degree": d, "count": report.relations[d]})
    if report.complete_through < need:
        reason = report.cap_reason if report.capped else f"checked only through degree {report.complete_through}, bounds need {need}"
        return Verdict("INCONCLUSIVE", generator_bound, relation_bound, report, reason=reason)
    return Verdict("PASS", generator_bound, relation_bound, report)
