"""Explicit presentations of section rings of effective divisors on P^m.

For D = alpha * V(x_k) with alpha = p/q and lower convergents
(c_0, d_0), ..., (c_r, d_r) the ring is generated by

    F_i^v = u^{d_i} x^v / x_k^{c_i},   |v| = c_i,  v_k = 0,

with binomial relations of two families:

* G: F_i^v F_j^w for j >= i + 2 equals a product of generators from two
  adjacent convergents h, h + 1 strictly between i and j;
* L: F_i^v F_j^w = F_i^y F_j^z for j in {i, i + 1}, where (y, z) is the
  sorted split of v + w.

A hypersurface f of degree p is handled through its Veronese picture: the
numerators become monomials of degree c_i p that are standard modulo f.
Several components are assembled greedily, and relations that are not
given in closed form are found by an exact kernel search over words.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .bounds import proj_bounds
from .convergents import ConvergentSequence, lower_convergents, two_convergent_decompose
from .exact import (
    Polynomial,
    as_rational,
    format_monomial,
    format_rational,
    int_nullspace,
    int_rank,
    monomials_of_degree,
)
from .geometry import QDivisor, Variety, divisor, ghost_complete, make_component
from .oracle import Caps, CapExceeded, SectionRing, compute

Vec = tuple[int, ...]
Word = tuple[int, ...]  # sorted generator ids


class PresentationError(ValueError):
    pass


# --------------------------------------------------------------------------
# Exponent vectors
# --------------------------------------------------------------------------

def class_S(c: int, m: int, k: int) -> list[Vec]:
    """Exponent vectors of total degree c in m+1 slots with slot k empty."""
    if c < 0:
        raise ValueError("c must be non-negative")
    out = []
    for exp in monomials_of_degree(m, c):
        out.append(exp[:k] + (0,) + exp[k:])
    return out


def precede(v: Sequence[int], w: Sequence[int]) -> bool:
    """v precedes w when the last nonzero slot of v is at most the first nonzero slot of w."""
    if len(v) != len(w):
        raise ValueError("vectors of different length")
    nv = [t for t, x in enumerate(v) if x]
    nw = [t for t, x in enumerate(w) if x]
    if not nv or not nw:
        return True
    return nv[-1] <= nw[0]


def _indices(v: Sequence[int]) -> list[int]:
    out = []
    for t, x in enumerate(v):
        out.extend([t] * x)
    return out


def _vector(indices: Iterable[int], n: int) -> Vec:
    vec = [0] * n
    for t in indices:
        vec[t] += 1
    return tuple(vec)


def chunk_split(total: Sequence[int], sizes: Sequence[int]) -> list[Vec]:
    """Cut the sorted multiset of slot indices of total into consecutive chunks."""
    idx = _indices(total)
    if sum(sizes) != len(idx):
        raise ValueError(f"chunk sizes {sizes} do not add up to {len(idx)}")
    out = []
    pos = 0
    for s in sizes:
        out.append(_vector(idx[pos:pos + s], len(total)))
        pos += s
    return out


def sorted_split(v: Sequence[int], w: Sequence[int], c_i: int, c_j: int) -> tuple[Vec, Vec]:
    if sum(v) != c_i or sum(w) != c_j:
        raise ValueError("vector degrees do not match the pole orders")
    total = tuple(a + b for a, b in zip(v, w))
    y, z = chunk_split(total, (c_i, c_j))
    return y, z


# --------------------------------------------------------------------------
# Data types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    component: int  # divisor component whose convergents this follows, -1 for cross generators
    convergent: int
    degree: int
    pole: int
    numerator: Polynomial  # x^v (hyperplane) or a standard monomial (hypersurface)
    canonical: Polynomial  # numerator over prod f_i^{floor(d alpha_i)}
    exponent: Vec | None = None

    @property
    def label(self) -> str:
        if self.component < 0:
            return f"C{self.degree}[{self.canonical}]"
        mono = format_monomial(self.numerator.variables, self.exponent) if self.exponent else "1"
        return f"F{self.component}.{self.convergent}[{mono or '1'}]"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "component": self.component,
            "convergent": self.convergent,
            "degree": self.degree,
            "pole_order": self.pole,
            "numerator": str(self.numerator),
            "canonical_numerator": str(self.canonical),
        }


@dataclass(frozen=True)
class Relation:
    kind: str  # "G", "L" or "cross"
    terms: tuple[tuple[Fraction, Word], ...]
    degree: int

    @property
    def is_binomial(self) -> bool:
        return len(self.terms) == 2 and {t[0] for t in self.terms} == {Fraction(1), Fraction(-1)}

    @property
    def left(self) -> Word:
        return next(w for c, w in self.terms if c > 0)

    @property
    def right(self) -> Word:
        return next(w for c, w in self.terms if c < 0)

    def words(self) -> list[Word]:
        return [w for _, w in self.terms]


def binomial(kind: str, left: Sequence[int], right: Sequence[int], degree: int) -> Relation:
    return Relation(kind, ((Fraction(1), tuple(sorted(left))), (Fraction(-1), tuple(sorted(right)))), degree)


@dataclass
class Presentation:
    D: QDivisor
    generators: list[Generator]
    relations: list[Relation] = field(default_factory=list)
    generator_bound: int | None = None
    relation_bound: int | None = None
    _ring: SectionRing | None = field(default=None, repr=False)

    @property
    def ring(self) -> SectionRing:
        if self._ring is None:
            self._ring = SectionRing(self.D, original=True)
        return self._ring

    def word_degree(self, word: Sequence[int]) -> int:
        return sum(self.generators[g].degree for g in word)

    def evaluate(self, word: Sequence[int]) -> Polynomial:
        """Canonical numerator of a word of generators."""
        ring = self.ring
        poly = Polynomial.constant(ring.variables, 1)
        deg = 0
        for g in word:
            gen = self.generators[g]
            poly = ring.multiply(poly, deg, gen.canonical, gen.degree)
            deg += gen.degree
        return poly

    def relation_holds(self, rel: Relation) -> bool:
        total = Polynomial.zero(self.ring.variables)
        for c, w in rel.terms:
            if self.word_degree(w) != rel.degree:
                return False
            total = total + self.evaluate(w) * c
        return total.is_zero()

    def generator_multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g in self.generators:
            out[g.degree] = out.get(g.degree, 0) + 1
        return dict(sorted(out.items()))

    def relation_multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for r in self.relations:
            out[r.degree] = out.get(r.degree, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        def word_labels(w):
            return [self.generators[g].label for g in w]

        rels = []
        for r in self.relations:
            entry = {"kind": r.kind, "degree": r.degree}
            if r.is_binomial:
                entry["left"] = word_labels(r.left)
                entry["right"] = word_labels(r.right)
            else:
                entry["terms"] = [{"coeff": format_rational(c), "word": word_labels(w)} for c, w in r.terms]
            rels.append(entry)
        out = {
            "generators": [g.to_json() for g in self.generators],
            "relations": rels,
            "generator_degrees": {str(d): n for d, n in self.generator_multiset().items()},
            "relation_degrees": {str(d): n for d, n in self.relation_multiset().items()},
        }
        if self.generator_bound is not None:
            out["generator_bound"] = self.generator_bound
        if self.relation_bound is not None:
            out["relation_bound"] = self.relation_bound
        return out


# --------------------------------------------------------------------------
# One component
# --------------------------------------------------------------------------

def _standard_monomials(f: Polynomial, degree: int) -> list[Vec]:
    """Monomials of the given degree not divisible by the leading monomial of f."""
    lead, _ = f.leading_term()
    out = []
    for exp in monomials_of_degree(len(f.variables), degree):
        if not all(e >= l for e, l in zip(exp, lead)):
            out.append(exp)
    return out


def _is_standard(exp: Sequence[int], lead: Sequence[int]) -> bool:
    return not all(e >= l for e, l in zip(exp, lead))


def _canonical(D: QDivisor, comp: int, d: int, c: int, mono: Polynomial) -> Polynomial:
    """Numerator over prod f_i^{floor(d alpha_i)} of u^d * mono / f_comp^c."""
    out = mono
    for t, component in enumerate(D.components):
        e = math.floor(d * component.coeff) - (c if t == comp else 0)
        if e < 0:
            raise PresentationError(f"generator of degree {d} is not a section of floor({d}D)")
        if e:
            out = out * component.poly ** e
    return out


def _component_generators(D: QDivisor, comp: int, seq: ConvergentSequence) -> list[Generator]:
    f = D.components[comp].poly
    p = D.components[comp].a
    names = D.variety.variables
    gens = []
    for i, (c, d) in enumerate(seq):
        for exp in _standard_monomials(f, c * p):
            mono = Polynomial.monomial(names, exp)
            gens.append(Generator(comp, i, d, c, mono, _canonical(D, comp, d, c, mono), exp))
    return gens


def _split_standard(total: Vec, sizes: Sequence[int], lead: Vec) -> list[Vec] | None:
    """Cut total into monomials of the given degrees, each standard; sorted split first, then backtracking."""
    first = chunk_split(total, sizes)
    if all(_is_standard(ch, lead) for ch in first):
        return first
    n = len(total)
    found: list[Vec] | None = None

    def rec(k, remaining, acc):
        nonlocal found
        if found is not None:
            return
        if k == len(sizes):
            if not any(remaining):
                found = list(acc)
            return
        for exp in monomials_of_degree(n, sizes[k]):
            if all(e <= r for e, r in zip(exp, remaining)) and _is_standard(exp, lead):
                if acc and k > 0 and sizes[k] == sizes[k - 1] and exp > acc[-1]:
                    continue
                acc.append(exp)
                rec(k + 1, tuple(r - e for r, e in zip(remaining, exp)), acc)
                acc.pop()

    rec(0, total, [])
    return found


def _component_relations(
    D: QDivisor, comp: int, seq: ConvergentSequence, gens: list[Generator], ids: dict[tuple[int, Vec], int]
) -> list[Relation]:
    """G and L families for one component, transported to its standard monomials."""
    f = D.components[comp].poly
    p = D.components[comp].a
    lead, _ = f.leading_term()
    by_conv: dict[int, list[Generator]] = {}
    for g in gens:
        by_conv.setdefault(g.convergent, []).append(g)
    rels: list[Relation] = []
    seen: set[Word] = set()
    r = len(seq) - 1

    def emit(kind, left, right_letters, degree):
        right = [ids[(h, ch)] for h, ch in right_letters]
        lw, rw = tuple(sorted(left)), tuple(sorted(right))
        if lw == rw or lw in seen:
            return
        seen.add(lw)
        rels.append(binomial(kind, lw, rw, degree))

    for i in range(r + 1):
        for j in range(i, r + 1):
            ci, di = seq[i]
            cj, dj = seq[j]
            for a_idx, gv in enumerate(by_conv.get(i, [])):
                for gw in by_conv.get(j, [])[a_idx if i == j else 0:]:
                    v, w = gv.exponent, gw.exponent
                    total = tuple(x + y for x, y in zip(v, w))
                    left = (ids[(i, v)], ids[(j, w)])
                    if j >= i + 2:
                        h, (k1, k2) = two_convergent_decompose((di + dj, ci + cj), seq)
                        sizes = [seq[h].c * p] * k1 + ([seq[h + 1].c * p] * k2 if k2 else [])
                        letters = [h] * k1 + [h + 1] * k2
                        chunks = _split_standard(total, sizes, lead)
                        if chunks is None:
                            continue
                        emit("G", left, list(zip(letters, chunks)), di + dj)
                    else:
                        chunks = _split_standard(total, (ci * p, cj * p), lead)
                        if chunks is None:
                            continue
                        y, z = chunks
                        if (i == j and {v, w} == {y, z}) or (i != j and (v, w) == (y, z)):
                            continue
                        emit("L", left, [(i, y), (j, z)], di + dj)
    return rels


def _single_component(D: QDivisor, comp: int, complete: bool, caps: Caps | None) -> Presentation:
    alpha = D.components[comp].coeff
    seq = lower_convergents(alpha)
    gens = _component_generators(D, comp, seq)
    ids = {(g.convergent, g.exponent): t for t, g in enumerate(gens)}
    rels = _component_relations(D, comp, seq, gens, ids)
    q = alpha.denominator
    pres = Presentation(D, gens, rels, generator_bound=q, relation_bound=2 * q)
    if complete:
        pres.relations = complete_relations(pres, 2 * q, rels, caps=caps)
    return pres


def one_hyperplane_presentation(alpha, k: int, m: int) -> Presentation:
    """Generators F_i^v and the G, L relations for alpha * V(x_k) on P^m."""
    alpha = as_rational(alpha)
    if alpha <= 0:
        raise PresentationError("alpha must be positive")
    V = Variety.projective(m)
    if not 0 <= k <= m:
        raise PresentationError(f"coordinate index {k} out of range")
    D = ghost_complete(divisor(V, [(alpha, f"x{k}")]))
    comp = next(t for t, c in enumerate(D.components) if c.coeff)
    return _single_component(D, comp, complete=False, caps=None)


def veronese_presentation(alpha, f: Polynomial, m: int | None = None, caps: Caps | None = None) -> Presentation:
    """alpha * V(f) for a form f of degree p, generators u^{d_i} g / f^{c_i} with g standard mod f."""
    alpha = as_rational(alpha)
    if alpha <= 0:
        raise PresentationError("alpha must be positive")
    if not f.is_homogeneous():
        raise PresentationError(f"{f} is not homogeneous")
    V = Variety.projective(len(f.variables) - 1 if m is None else m)
    D = ghost_complete(QDivisor(V, (make_component(V, alpha, f),)))
    comp = next(t for t, c in enumerate(D.components) if c.coeff)
    return _single_component(D, comp, complete=True, caps=caps)


# --------------------------------------------------------------------------
# Relation search over words
# --------------------------------------------------------------------------

def _words_of_degree(pres: Presentation, d: int, cap: int) -> list[Word]:
    degs = [g.degree for g in pres.generators]
    order = sorted(range(len(degs)))
    out: list[Word] = []

    def rec(start, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} words in degree {d}")
            return
        for t in range(start, len(order)):
            g = order[t]
            if degs[g] <= remaining:
                acc.append(g)
                rec(t, remaining - degs[g], acc)
                acc.pop()

    rec(0, d, [])
    return out


class _Span:
    """Row span kept in echelon form over the rationals, one row at a time."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, Fraction]] = {}  # pivot column -> row scaled to 1 there

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row) -> dict[int, Fraction]:
        items = row.items() if isinstance(row, dict) else enumerate(row)
        vec = {j: Fraction(v) for j, v in items if v}
        while vec:
            col = next((j for j in sorted(vec) if j in self.pivots), None)
            if col is None:
                break
            f = vec[col]
            for j, v in self.pivots[col].items():
                nv = vec.get(j, 0) - f * v
                if nv:
                    vec[j] = nv
                else:
                    vec.pop(j, None)
        return vec

    def add(self, row) -> bool:
        vec = self.reduce(row)
        if not vec:
            return False
        col = min(vec)
        lead = vec[col]
        self.pivots[col] = {j: v / lead for j, v in vec.items()}
        return True


def _relation_vector(rel: Relation, shift: Word, index: dict[Word, int], ncols: int) -> list[int]:
    den = math.lcm(*(c.denominator for c, _ in rel.terms))
    row = [0] * ncols
    for c, w in rel.terms:
        row[index[tuple(sorted(w + shift))]] += int(c * den)
    return row


def complete_relations(
    pres: Presentation,
    max_degree: int,
    candidates: Sequence[Relation] = (),
    caps: Caps | None = None,
    degrees: Iterable[int] | None = None,
) -> list[Relation]:
    """A minimal relation set through max_degree.

    Candidate relations are taken first when they are new modulo the ideal
    generated so far; kernel vectors of the evaluation map fill the rest.
    When ``degrees`` is given, only those degrees are searched.
    """
    caps = caps or Caps.from_env()
    by_degree: dict[int, list[Relation]] = {}
    for rel in candidates:
        by_degree.setdefault(rel.degree, []).append(rel)
    accepted: list[Relation] = []
    words_cache: dict[int, list[Word]] = {0: [()]}

    def words_of(e: int) -> list[Word]:
        if e not in words_cache:
            words_cache[e] = _words_of_degree(pres, e, caps.words)
        return words_cache[e]

    wanted = None if degrees is None else set(degrees)
    for d in range(1, max_degree + 1):
        if wanted is not None and d not in wanted:
            continue
        words = words_of(d)
        if not words:
            continue
        index = {w: t for t, w in enumerate(words)}
        span = _Span(len(words))
        for rel in accepted:
            for shift in words_of(d - rel.degree):
                span.add(_relation_vector(rel, shift, index, len(words)))
        # kernel of the evaluation map words -> numerators
        ring = pres.ring
        dim = ring.dim(d)
        mat = [[0] * len(words) for _ in range(dim)]
        for j, w in enumerate(words):
            for i, v in ring.vector(pres.evaluate(w), d).items():
                mat[i][j] = v
        kernel = int_nullspace(mat, len(words)) if dim else [
            [int(t == j) for t in range(len(words))] for j in range(len(words))
        ]
        target = len(kernel)
        for rel in by_degree.get(d, []):
            if not pres.relation_holds(rel):
                raise PresentationError(f"candidate relation {rel} does not hold")
            if span.rank < target and span.add(_relation_vector(rel, (), index, len(words))):
                accepted.append(rel)
        for vec in kernel:
            if span.rank >= target:
                break
            if span.add(list(vec)):
                terms = tuple((Fraction(c), words[t]) for t, c in enumerate(vec) if c)
                accepted.append(Relation("cross", terms, d))
    return accepted


# --------------------------------------------------------------------------
# Several components
# --------------------------------------------------------------------------

def presentation_bounds(D: QDivisor) -> tuple[int, int]:
    """Degrees through which an effective divisor's presentation is searched.

    With one positive coefficient the single-component bounds (k, 2k) hold.
    With several, max k_i can fail (1/2 V(x0) + 1/3 V(x1) on P^2 has a
    generator in degree 6), so the general bounds are used instead.
    """
    positive = [c for c in D.components if c.coeff > 0]
    if len(positive) <= 1:
        k = max((c.k for c in positive), default=1)
        return k, 2 * k
    report = proj_bounds(D)
    return report.generator_bound, report.relation_bound_floor


def effective_presentation(D: QDivisor, caps: Caps | None = None, relations: bool = True) -> Presentation:
    """Minimal generators and relations of an effective divisor, searched through presentation_bounds."""
    if not D.variety.is_projective:
        raise PresentationError("presentations are implemented on projective space only")
    if not D.is_effective():
        raise PresentationError("divisor has a negative coefficient")
    D = ghost_complete(D)
    names = D.variety.variables
    gen_bound, rel_bound = presentation_bounds(D)
    pres = Presentation(D, [], [], generator_bound=gen_bound, relation_bound=rel_bound)
    ring = pres.ring
    candidates: list[Relation] = []
    per_component: list[tuple[int, list[Generator], list[Relation]]] = []
    for comp, c in enumerate(D.components):
        if c.coeff > 0:
            seq = lower_convergents(c.coeff)
            gens = _component_generators(D, comp, seq)
            ids = {(g.convergent, g.exponent): t for t, g in enumerate(gens)}
            per_component.append((comp, gens, _component_relations(D, comp, seq, gens, ids)))
    if not per_component:
        pres.generators = [Generator(-1, 0, 1, 0, Polynomial.constant(names, 1), Polynomial.constant(names, 1))]
        return pres
    kept: list[Generator] = []
    where: dict[tuple[int, int], int] = {}  # (component, local id) -> global id
    for d in range(1, gen_bound + 1):
        mons, index = ring.space(d)
        span = _Span(len(mons))
        for g in kept:
            for row in ring.shifted_rows(g.canonical, g.degree, d):
                dense = [0] * len(mons)
                for j, v in row.items():
                    dense[j] = v
                span.add(dense)
        for comp, gens, _ in per_component:
            for local, g in enumerate(gens):
                if g.degree != d or span.rank == len(mons):
                    continue
                if span.add(_dense_vector(ring.vector(g.canonical, d), len(mons))):
                    where[(comp, local)] = len(kept)
                    kept.append(g)
        for j, exp in enumerate(mons):
            if span.rank == len(mons):
                break
            vec = [0] * len(mons)
            vec[j] = 1
            if span.add(vec):
                mono = Polynomial.monomial(names, exp)
                kept.append(Generator(-1, 0, d, 0, mono, mono, exp))
    pres.generators = kept
    for comp, gens, rels in per_component:
        for rel in rels:
            words = [[where.get((comp, g)) for g in w] for w in rel.words()]
            if any(None in w for w in words):
                continue
            candidates.append(Relation(rel.kind, tuple((c, tuple(sorted(w))) for (c, _), w in zip(rel.terms, words)), rel.degree))
    if relations:
        degrees = None
        if len(per_component) > 1:
            # the general bound is far above the actual relation degrees; let the oracle say where to look
            report = compute(D, rel_bound, caps=caps)
            if report.capped or report.complete_through < rel_bound:
                raise CapExceeded(report.cap_reason or f"oracle stopped at degree {report.complete_through}")
            degrees = report.relation_degrees()
        pres.relations = complete_relations(pres, rel_bound, candidates, caps=caps, degrees=degrees)
    return pres


def _dense_vector(sparse: dict[int, int], n: int) -> list[int]:
    out = [0] * n
    for j, v in sparse.items():
        out[j] = v
    return out


# --------------------------------------------------------------------------
# Normal forms
# --------------------------------------------------------------------------

class NormalFormError(RuntimeError):
    pass


def _rules(pres: Presentation) -> dict[Word, Word]:
    comps = {g.component for g in pres.generators}
    if len(comps) != 1 or -1 in comps:
        raise NormalFormError("normal forms need a single-component presentation")
    rules = {}
    for rel in pres.relations:
        if rel.kind in ("G", "L") and rel.is_binomial:
            rules[rel.left] = rel.right
    return rules


def rewrite_steps(word: Word, rules: dict[Word, Word]) -> list[Word]:
    """Every word reachable by one rule application."""
    out = []
    seen_pairs = set()
    for a in range(len(word)):
        for b in range(a + 1, len(word)):
            pair = (word[a], word[b])
            if pair in seen_pairs or pair not in rules:
                continue
            seen_pairs.add(pair)
            rest = word[:a] + word[a + 1:b] + word[b + 1:]
            out.append(tuple(sorted(rest + rules[pair])))
    return out


def normal_form(word: Sequence[int], pres: Presentation, rng: random.Random | None = None, max_steps: int = 100_000) -> Word:
    """Rewrite with the G and L rules until none applies.

    With ``rng`` the applicable rule is chosen at random, which is how
    confluence is tested.
    """
    rules = _rules(pres)
    current = tuple(sorted(word))
    seen = {current}
    for _ in range(max_steps):
        steps = rewrite_steps(current, rules)
        if not steps:
            return current
        current = rng.choice(steps) if rng else steps[0]
        if current in seen:
            raise NormalFormError(f"rewriting revisited {current}")
        seen.add(current)
    raise NormalFormError("rewriting did not terminate")


def is_normal(word: Sequence[int], pres: Presentation) -> bool:
    """At most two adjacent convergent indices, with numerators in sorted order.

    This describes normal words of a hyperplane presentation only; for a
    hypersurface the numerators live in ambient coordinates and the shape
    test does not apply.
    """
    _rules(pres)
    comp = pres.generators[0].component
    if pres.D.components[comp].poly.total_degree() != 1:
        raise NormalFormError("the normal-word shape is only known for a hyperplane")
    letters = [pres.generators[g] for g in word]
    idx = sorted({g.convergent for g in letters})
    if len(idx) > 2 or (len(idx) == 2 and idx[1] != idx[0] + 1):
        return False
    ordered = sorted(letters, key=lambda g: (g.convergent, _indices(g.exponent)))
    nonzero = [g.exponent for g in ordered if any(g.exponent)]
    return all(precede(a, b) for a, b in zip(nonzero, nonzero[1:]))
