"""Varieties, rational divisors and the graded pieces of their section rings.

Two families are supported: projective space P^m with coordinates x0..xm,
and the Hirzebruch surface F_m with Cox coordinates u, v, z, w where
u^a v^b z^c w^e has bidegree (a + b + m*c, c + e).

A degree-d element of the section ring is stored as an exponent tuple
(c_0, ..., c_n) standing for u^d * prod f_i^{c_i}.  Equivalently it is a
numerator N of degree deg(floor(dD)) over the fixed denominator
prod f_i^{floor(d alpha_i)}; the oracle works with numerators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import (
    Polynomial,
    as_rational,
    floor_rational,
    format_rational,
    int_rank,
    lcm,
    monomials_of_degree,
)


class DivisorError(ValueError):
    pass


@dataclass(frozen=True)
class Variety:
    kind: str  # "projective" or "hirzebruch"
    m: int

    def __post_init__(self):
        if self.kind == "projective":
            if self.m < 1:
                raise DivisorError("projective space needs dimension >= 1")
        elif self.kind == "hirzebruch":
            if self.m < 0:
                raise DivisorError("Hirzebruch type must be >= 0")
        else:
            raise DivisorError(f"unknown variety kind {self.kind!r}")

    @classmethod
    def projective(cls, m: int) -> "Variety":
        return cls("projective", m)

    @classmethod
    def hirzebruch(cls, m: int) -> "Variety":
        return cls("hirzebruch", m)

    @property
    def is_projective(self) -> bool:
        return self.kind == "projective"

    @property
    def variables(self) -> tuple[str, ...]:
        if self.is_projective:
            return tuple(f"x{i}" for i in range(self.m + 1))
        return ("u", "v", "z", "w")

    @property
    def weights(self) -> tuple[tuple[int, ...], ...]:
        """Per-variable degree vectors (length 1 on P^m, length 2 on F_m)."""
        if self.is_projective:
            return tuple((1,) for _ in range(self.m + 1))
        return ((1, 0), (1, 0), (self.m, 1), (0, 1))

    @property
    def frame_size(self) -> int:
        """Number of leading components that form a coordinate frame after ghost completion."""
        return self.m + 1 if self.is_projective else 4

    def degree_of_exponent(self, exp: Sequence[int]) -> tuple[int, ...]:
        w = self.weights
        return tuple(sum(e * w[k][j] for k, e in enumerate(exp)) for j in range(len(w[0])))

    def to_json(self) -> dict:
        if self.is_projective:
            return {"type": "projective", "dim": self.m}
        return {"type": "hirzebruch", "m": self.m}

    def __str__(self) -> str:
        return f"P^{self.m}" if self.is_projective else f"F_{self.m}"


@dataclass(frozen=True)
class Component:
    coeff: Fraction
    poly: Polynomial
    degree: tuple[int, ...]  # (a,) on P^m, (a, b) on F_m

    @property
    def k(self) -> int:
        return self.coeff.denominator

    @property
    def a(self) -> int:
        return self.degree[0]

    @property
    def b(self) -> int:
        return self.degree[1]


def make_component(variety: Variety, coeff, poly: Polynomial) -> Component:
    if poly.variables != variety.variables:
        raise DivisorError(f"polynomial variables {poly.variables} do not match {variety}")
    if poly.is_zero():
        raise DivisorError("component polynomial is zero")
    degs = poly.weighted_degrees(variety.weights)
    if len(degs) != 1:
        first = next(iter(poly.sorted_terms()))[0]
        d0 = variety.degree_of_exponent(first)
        bad = [e for e in poly.terms if variety.degree_of_exponent(e) != d0]
        from .exact import format_monomial

        raise DivisorError(
            f"polynomial {poly} is not {'homogeneous' if variety.is_projective else 'bi-homogeneous'}:"
            f" term {format_monomial(poly.variables, bad[0]) or '1'} has degree"
            f" {variety.degree_of_exponent(bad[0])}, expected {d0}"
        )
    return Component(as_rational(coeff), poly, degs.pop())


@dataclass(frozen=True)
class QDivisor:
    variety: Variety
    components: tuple[Component, ...] = field(default_factory=tuple)

    @property
    def alphas(self) -> list[Fraction]:
        return [c.coeff for c in self.components]

    @property
    def n(self) -> int:
        return len(self.components)

    def is_effective(self) -> bool:
        return all(c.coeff >= 0 for c in self.components)

    def polys(self) -> list[Polynomial]:
        return [c.poly for c in self.components]

    def ks(self) -> list[int]:
        return [c.k for c in self.components]

    def __str__(self) -> str:
        parts = [f"({format_rational(c.coeff)})*V({c.poly})" for c in self.components]
        return " + ".join(parts) + f" on {self.variety}" if parts else f"0 on {self.variety}"


def divisor(variety: Variety, items: Sequence[tuple[object, object]]) -> QDivisor:
    """Build a divisor from (coefficient, polynomial or text) pairs, checking proportionality."""
    from .exact import parse_polynomial

    comps = []
    for coeff, poly in items:
        if isinstance(poly, str):
            poly = parse_polynomial(poly, variety.variables)
        comps.append(make_component(variety, coeff, poly))
    for i in range(len(comps)):
        for j in range(i):
            if proportional(comps[i].poly, comps[j].poly):
                raise DivisorError(f"components {comps[j].poly} and {comps[i].poly} are proportional")
    return QDivisor(variety, tuple(comps))


def proportional(f: Polynomial, g: Polynomial) -> bool:
    if set(f.terms) != set(g.terms):
        return False
    ratios = {f.terms[e] / g.terms[e] for e in f.terms}
    return len(ratios) == 1


# --------------------------------------------------------------------------
# Degrees and dimensions
# --------------------------------------------------------------------------

def degree_of(D: QDivisor):
    """deg D on P^m, or the bidegree pair on F_m."""
    if D.variety.is_projective:
        return sum((c.coeff * c.a for c in D.components), Fraction(0))
    return (
        sum((c.coeff * c.a for c in D.components), Fraction(0)),
        sum((c.coeff * c.b for c in D.components), Fraction(0)),
    )


def floor_divisor(D: QDivisor, d: int) -> list[int]:
    return [floor_rational(d * c.coeff) for c in D.components]


def floor_degree(D: QDivisor, d: int) -> tuple[int, ...]:
    """Degree (or bidegree) of floor(dD)."""
    fl = floor_divisor(D, d)
    width = len(D.variety.weights[0])
    return tuple(sum(f * c.degree[j] for f, c in zip(fl, D.components)) for j in range(width))


def h0_proj(m: int, e: int) -> int:
    return math.comb(m + e, m) if e >= 0 else 0


def h0_hirz(m: int, A: int, B: int) -> int:
    if B < 0:
        return 0
    return sum(max(0, A - m * c + 1) for c in range(B + 1))


def monomials_of_weight(variety: Variety, target: Sequence[int]) -> list[tuple[int, ...]]:
    """Monomials in the variety's variables of the given (bi)degree, grlex-descending."""
    if variety.is_projective:
        return monomials_of_degree(variety.m + 1, target[0])
    A, B = target
    m = variety.m
    out = []
    if B < 0:
        return out
    for c in range(B + 1):
        rest = A - m * c
        if rest < 0:
            break
        for i in range(rest + 1):
            out.append((i, rest - i, c, B - c))
    from .exact import grlex_key

    out.sort(key=grlex_key, reverse=True)
    return out


def h0_hirz_enumerate(m: int, A: int, B: int) -> int:
    """Count monomials u^i v^j z^c w^e of bidegree (A, B) by brute force."""
    if A < 0 or B < 0:
        return 0
    count = 0
    for c in range(B + 1):
        for i in range(A + 1):
            for j in range(A + 1):
                if i + j + m * c == A:
                    count += 1
    return count


def graded_dimension(D: QDivisor, d: int) -> int:
    """dim H^0(X, floor(dD))."""
    deg = floor_degree(D, d)
    if D.variety.is_projective:
        return h0_proj(D.variety.m, deg[0])
    return h0_hirz(D.variety.m, deg[0], deg[1])


def short_circuit(D: QDivisor) -> dict | None:
    """Describe the ring when the positivity assumption fails, else None."""
    deg = degree_of(D)
    if D.variety.is_projective:
        if deg < 0:
            return {"reason": "deg D < 0", "ring": "k"}
        if deg == 0:
            period = lcm(D.ks())
            return {"reason": "deg D = 0", "ring": f"k[t] with t in degree {period}" if _zero_degree_periodic(D) else "k"}
        return None
    A, B = deg
    if A < 0 or B < 0:
        return {"reason": "a bidegree coordinate of D is negative", "ring": "k"}
    if A == 0 or B == 0:
        return {"reason": "a bidegree coordinate of D is zero", "ring": "degenerate"}
    return None


def _zero_degree_periodic(D: QDivisor) -> bool:
    period = lcm(D.ks())
    return floor_degree(D, period)[0] == 0


# --------------------------------------------------------------------------
# Ghost completion
# --------------------------------------------------------------------------

def _linear_vector(poly: Polynomial, idx: Sequence[int]) -> list[Fraction] | None:
    """Coefficient vector over the variables idx if poly is linear in exactly those, else None."""
    vec = [Fraction(0)] * len(idx)
    pos = {k: t for t, k in enumerate(idx)}
    for exp, c in poly.terms.items():
        if sum(exp) != 1:
            return None
        k = exp.index(1)
        if k not in pos:
            return None
        vec[pos[k]] = c
    return vec


def _independent(vectors: list[list[Fraction]]) -> bool:
    rows = []
    for v in vectors:
        den = lcm(x.denominator for x in v)
        rows.append([int(x * den) for x in v])
    return int_rank(rows, len(vectors[0])) == len(vectors)


def _coordinate(variety: Variety, k: int) -> Polynomial:
    return Polynomial.variable(variety.variables, variety.variables[k])


def ghost_completion(D: QDivisor) -> tuple[QDivisor, list[Polynomial]]:
    """Ghost-complete D and also return the appended zero-coefficient forms."""
    V = D.variety
    comps = list(D.components)
    added: list[Polynomial] = []
    zero = Fraction(0)
    if V.is_projective:
        nv = V.m + 1
        frame: list[Component] = []
        vecs: list[list[Fraction]] = []
        for comp in comps:
            if len(frame) == nv:
                break
            vec = _linear_vector(comp.poly, range(nv))
            if vec is not None and _independent(vecs + [vec]):
                frame.append(comp)
                vecs.append(vec)
        for k in range(nv):
            if len(frame) == nv:
                break
            vec = [Fraction(int(j == k)) for j in range(nv)]
            if _independent(vecs + [vec]):
                ghost = make_component(V, zero, _coordinate(V, k))
                frame.append(ghost)
                vecs.append(vec)
                added.append(ghost.poly)
        rest = [c for c in comps if not any(c is f for f in frame)]
        return QDivisor(V, tuple(frame + rest)), added

    frame_slots: list[Component | None] = [None] * 4
    used: list[Component] = []
    # base slots: two independent forms of bidegree (1, 0), linear in u, v
    base_vecs: list[list[Fraction]] = []
    for comp in comps:
        if len(base_vecs) == 2:
            break
        vec = _linear_vector(comp.poly, (0, 1))
        if vec is not None and _independent(base_vecs + [vec]):
            frame_slots[len(base_vecs)] = comp
            base_vecs.append(vec)
            used.append(comp)
    for k in (0, 1):
        if len(base_vecs) == 2:
            break
        vec = [Fraction(int(j == k)) for j in range(2)]
        if _independent(base_vecs + [vec]):
            ghost = make_component(V, zero, _coordinate(V, k))
            frame_slots[len(base_vecs)] = ghost
            base_vecs.append(vec)
            added.append(ghost.poly)
    if V.m == 0:
        fib_vecs: list[list[Fraction]] = []
        for comp in comps:
            if len(fib_vecs) == 2:
                break
            vec = _linear_vector(comp.poly, (2, 3))
            if vec is not None and _independent(fib_vecs + [vec]):
                frame_slots[2 + len(fib_vecs)] = comp
                fib_vecs.append(vec)
                used.append(comp)
        for k in (2, 3):
            if len(fib_vecs) == 2:
                break
            vec = [Fraction(int(j == k - 2)) for j in range(2)]
            if _independent(fib_vecs + [vec]):
                ghost = make_component(V, zero, _coordinate(V, k))
                frame_slots[2 + len(fib_vecs)] = ghost
                fib_vecs.append(vec)
                added.append(ghost.poly)
    else:
        # a section-like form c*z + g(u,v)*w with c != 0, and a multiple of w
        z_exp = (0, 0, 1, 0)
        for comp in comps:
            if comp.degree == (V.m, 1) and comp.poly.terms.get(z_exp):
                frame_slots[2] = comp
                used.append(comp)
                break
        else:
            ghost = make_component(V, zero, _coordinate(V, 2))
            frame_slots[2] = ghost
            added.append(ghost.poly)
        for comp in comps:
            if comp.poly.is_monomial() and next(iter(comp.poly.terms)) == (0, 0, 0, 1):
                frame_slots[3] = comp
                used.append(comp)
                break
        else:
            ghost = make_component(V, zero, _coordinate(V, 3))
            frame_slots[3] = ghost
            added.append(ghost.poly)
    rest = [c for c in comps if not any(c is u for u in used)]
    return QDivisor(V, tuple(frame_slots) + tuple(rest)), added


def ghost_complete(D: QDivisor) -> QDivisor:
    return ghost_completion(D)[0]


def is_ghost_complete(D: QDivisor) -> bool:
    return ghost_completion(D)[1] == [] and ghost_completion(D)[0] == D


# --------------------------------------------------------------------------
# Frame coordinates
# --------------------------------------------------------------------------

def _invert(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise DivisorError("frame forms are linearly dependent")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def frame_variable_images(D: QDivisor) -> list[Polynomial]:
    """Original coordinates written as polynomials in the frame forms.

    The frame forms are the first m+1 (P^m) or 4 (F_m) components of a
    ghost-completed divisor.  The returned images use the same variable
    names, now read as the frame coordinates y_k = f_k.
    """
    V = D.variety
    names = V.variables
    frame = [c.poly for c in D.components[: V.frame_size]]
    if V.is_projective:
        nv = V.m + 1
        mat = []
        for f in frame:
            vec = _linear_vector(f, range(nv))
            if vec is None:
                raise DivisorError("divisor is not ghost-complete")
            mat.append(vec)
        inv = _invert(mat)
        return [
            Polynomial(names, {tuple(int(t == k) for t in range(nv)): inv[j][k] for k in range(nv)})
            for j in range(nv)
        ]
    y = [Polynomial.variable(names, n) for n in names]
    base = [_linear_vector(f, (0, 1)) for f in frame[:2]]
    if any(v is None for v in base):
        raise DivisorError("divisor is not ghost-complete")
    binv = _invert(base)
    u_img = y[0] * binv[0][0] + y[1] * binv[0][1]
    v_img = y[0] * binv[1][0] + y[1] * binv[1][1]
    if V.m == 0:
        fib = [_linear_vector(f, (2, 3)) for f in frame[2:]]
        if any(v is None for v in fib):
            raise DivisorError("divisor is not ghost-complete")
        finv = _invert(fib)
        z_img = y[2] * finv[0][0] + y[3] * finv[0][1]
        w_img = y[2] * finv[1][0] + y[3] * finv[1][1]
        return [u_img, v_img, z_img, w_img]
    f2, f3 = frame[2], frame[3]
    cw = f3.terms.get((0, 0, 0, 1))
    cz = f2.terms.get((0, 0, 1, 0))
    if not cw or not f3.is_monomial() or not cz:
        raise DivisorError("divisor is not ghost-complete")
    w_img = y[3] * (1 / cw)
    # f2 = cz*z + g(u, v)*w
    g_terms = {}
    for exp, c in f2.terms.items():
        if exp == (0, 0, 1, 0):
            continue
        if exp[2] != 0 or exp[3] != 1:
            raise DivisorError(f"unexpected term in section form {f2}")
        g_terms[(exp[0], exp[1], 0, 0)] = c
    g = Polynomial(names, g_terms)
    g_img = g.substitute([u_img, v_img, y[2], y[3]])
    z_img = (y[2] - g_img * w_img) * (1 / cz)
    return [u_img, v_img, z_img, w_img]


def frame_polynomials(D: QDivisor) -> list[Polynomial]:
    """Every component polynomial rewritten in frame coordinates."""
    images = frame_variable_images(D)
    return [c.poly.substitute(images) for c in D.components]


# --------------------------------------------------------------------------
# Graded bases
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedBasis:
    degree: int
    elements: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.elements)


def _basis(D: QDivisor, d: int) -> GradedBasis:
    if d < 0:
        raise ValueError("degree must be non-negative")
    V = D.variety
    fl = floor_divisor(D, d)
    size = V.frame_size
    tail = tuple(-f for f in fl[size:])
    target = floor_degree(D, d)
    elements = []
    for exp in monomials_of_weight(V, target):
        head = tuple(e - f for e, f in zip(exp, fl[:size]))
        elements.append(head + tail)
    return GradedBasis(d, tuple(elements))


def basis_proj(D: QDivisor, d: int) -> GradedBasis:
    if not D.variety.is_projective:
        raise DivisorError("basis_proj needs a projective divisor")
    return _basis(D, d)


def basis_hirz(D: QDivisor, d: int) -> GradedBasis:
    if D.variety.is_projective:
        raise DivisorError("basis_hirz needs a Hirzebruch divisor")
    return _basis(D, d)


def basis_element_numerator(D: QDivisor, d: int, element: Sequence[int]) -> Polynomial:
    """Numerator of u^d prod f_i^{c_i} over prod f_i^{floor(d alpha_i)}, in the original variables."""
    fl = floor_divisor(D, d)
    out = Polynomial.constant(D.variety.variables, 1)
    for comp, c, f in zip(D.components, element, fl):
        e = c + f
        if e < 0:
            raise DivisorError(f"exponent tuple {tuple(element)} is not in degree {d}")
        if e:
            out = out * comp.poly ** e
    return out
