"""The cone of admissible exponent tuples and its extremal rays.

A point sigma = (d, c_0, ..., c_n) of the lattice Sigma stands for the
element u^d prod f_i^{c_i}; it is admissible when d >= 0, c_i >= -d*alpha_i
and the degree-balance rows vanish (sum a_i c_i = 0, and on F_m also
sum b_i c_i = 0).  Component indices are 0-based throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .exact import RationalMatrix, as_rational, floor_rational, kernel_basis, lcm, rank
from .geometry import DivisorError, QDivisor, degree_of


class ConeError(ValueError):
    pass


@dataclass(frozen=True)
class ConeSpec:
    alphas: tuple[Fraction, ...]
    rows: tuple[tuple[int, ...], ...]  # degree-balance rows

    @property
    def arity(self) -> int:
        return len(self.alphas) + 1

    def contains(self, point: Sequence[int]) -> bool:
        if len(point) != self.arity:
            return False
        if any(Fraction(x).denominator != 1 for x in point):
            return False
        d, cs = point[0], point[1:]
        if d < 0:
            return False
        if any(c < -d * a for c, a in zip(cs, self.alphas)):
            return False
        return all(sum(r * c for r, c in zip(row, cs)) == 0 for row in self.rows)

    def balance(self, point: Sequence) -> tuple:
        return tuple(sum(r * c for r, c in zip(row, point[1:])) for row in self.rows)

    def slice(self, d: int, cap: int | None = None) -> list[tuple[int, ...]]:
        """All lattice points of degree d, in lexicographic order of the shifted exponents."""
        floors = [floor_rational(d * a) for a in self.alphas]
        target = [sum(r * f for r, f in zip(row, floors)) for row in self.rows]
        n = len(self.alphas)
        out: list[tuple[int, ...]] = []
        rows = self.rows
        # remaining weight available after slot k, used for pruning
        def rec(k, acc, remaining):
            if k == n:
                if all(x == 0 for x in remaining):
                    out.append((d,) + tuple(e - f for e, f in zip(acc, floors)))
                    if cap is not None and len(out) > cap:
                        raise ConeError(f"more than {cap} lattice points in degree {d}")
                return
            weights = [row[k] for row in rows]
            if all(w == 0 for w in weights):
                raise ConeError("component with zero degree")
            e = 0
            while all(r - e * w >= 0 for r, w in zip(remaining, weights)):
                acc.append(e)
                rec(k + 1, acc, [r - e * w for r, w in zip(remaining, weights)])
                acc.pop()
                e += 1

        rec(0, [], target)
        return out


@dataclass(frozen=True)
class Ray:
    point: tuple[int, ...]
    label: str

    @property
    def degree(self) -> int:
        return self.point[0]


@dataclass(frozen=True)
class Decomposition:
    lam: tuple[int, ...]
    zeta: tuple[int, ...]
    simplex: tuple[int, ...]  # ray indices of the simplicial subcone used


@dataclass(frozen=True)
class TPartition:
    t_eq: tuple[int, ...]
    t_plus: tuple[int, ...]
    t_minus: tuple[int, ...]


def build_sigma(D: QDivisor) -> ConeSpec:
    deg = degree_of(D)
    if D.variety.is_projective:
        if deg <= 0:
            raise ConeError(f"deg D = {deg} is not positive")
        rows = (tuple(c.a for c in D.components),)
    else:
        if deg[0] <= 0 or deg[1] <= 0:
            raise ConeError(f"bidegree {deg} of D is not positive")
        rows = (tuple(c.a for c in D.components), tuple(c.b for c in D.components))
    return ConeSpec(tuple(D.alphas), rows)


def _ell(ks: Sequence[int], skip: Sequence[int]) -> int:
    return lcm(k for t, k in enumerate(ks) if t not in skip)


def _integral(vec: Sequence[Fraction], what: str) -> tuple[int, ...]:
    if any(Fraction(x).denominator != 1 for x in vec):
        raise ConeError(f"{what} is not integral: {vec}")
    return tuple(int(x) for x in vec)


def extremal_rays_proj(D: QDivisor) -> list[Ray]:
    """e_i of degree l_i a_i with slot j = -alpha_j l_i a_i and slot i fixed by balance."""
    if not D.variety.is_projective:
        raise ConeError("projective divisor expected")
    build_sigma(D)
    ks = D.ks()
    alphas = D.alphas
    a = [c.a for c in D.components]
    rays = []
    for i in range(D.n):
        ell = _ell(ks, (i,))
        deg = ell * a[i]
        vec = [Fraction(deg)]
        for j in range(D.n):
            if j == i:
                vec.append(ell * sum((alphas[t] * a[t] for t in range(D.n) if t != i), Fraction(0)))
            else:
                vec.append(-alphas[j] * deg)
        rays.append(Ray(_integral(vec, f"e_{i}"), f"e_{i}"))
    return rays


def t_partition(D: QDivisor) -> TPartition:
    if D.variety.is_projective:
        raise ConeError("Hirzebruch divisor expected")
    A, B = degree_of(D)
    eq, plus, minus = [], [], []
    for i, c in enumerate(D.components):
        lhs, rhs = c.a * B, c.b * A
        (eq if lhs == rhs else plus if lhs > rhs else minus).append(i)
    return TPartition(tuple(eq), tuple(plus), tuple(minus))


def epsilon(D: QDivisor, i: int) -> list[Fraction]:
    """The generator eps_i of the cone before imposing both balance rows."""
    comps = D.components
    vec = [Fraction(1)]
    for j, c in enumerate(comps):
        if j == i:
            s = sum((comps[t].coeff * (comps[t].a + comps[t].b) for t in range(len(comps)) if t != i), Fraction(0))
            vec.append(s / (c.a + c.b))
        else:
            vec.append(-c.coeff)
    return vec


def epsilon_in_h(D: QDivisor, i: int) -> bool:
    spec = build_sigma(D)
    return all(x == 0 for x in spec.balance(epsilon(D, i)))


def pair_ray_closed_form(D: QDivisor, i: int, j: int) -> tuple[int, ...]:
    """e_{i,j} for i in T_+, j in T_-, of degree l_{i,j} (a_i b_j - a_j b_i)."""
    comps = D.components
    ci, cj = comps[i], comps[j]
    delta = ci.a * cj.b - cj.a * ci.b
    ell = _ell(D.ks(), (i, j))
    d = ell * delta
    s_a = sum((comps[t].coeff * comps[t].a for t in range(len(comps)) if t not in (i, j)), Fraction(0))
    s_b = sum((comps[t].coeff * comps[t].b for t in range(len(comps)) if t not in (i, j)), Fraction(0))
    vec = [Fraction(d)]
    for t, c in enumerate(comps):
        if t == i:
            vec.append(d * (cj.b * s_a - cj.a * s_b) / delta)
        elif t == j:
            vec.append(d * (ci.a * s_b - ci.b * s_a) / delta)
        else:
            vec.append(-d * c.coeff)
    return _integral(vec, f"e_{i},{j}")


def pair_ray_direct(D: QDivisor, i: int, j: int) -> list[Fraction]:
    """Degree-1 point of the segment from eps_i to eps_j lying on both balance hyperplanes."""
    spec = build_sigma(D)
    ei, ej = epsilon(D, i), epsilon(D, j)
    bi, bj = spec.balance(ei)[0], spec.balance(ej)[0]
    if bi == bj:
        raise ConeError(f"segment eps_{i} eps_{j} does not cross the balance hyperplane")
    s = bj / (bj - bi)  # weight on eps_i
    if not 0 <= s <= 1:
        raise ConeError(f"segment eps_{i} eps_{j} misses the balance hyperplane")
    point = [s * x + (1 - s) * y for x, y in zip(ei, ej)]
    if any(x != 0 for x in spec.balance(point)):
        raise ConeError(f"direct intersection for ({i},{j}) violates a balance row")
    return point


def primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    den = lcm(Fraction(x).denominator for x in vec)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


@dataclass(frozen=True)
class RayCheck:
    label: str
    closed_form: tuple[int, ...]
    direct: tuple[int, ...]
    primitive: tuple[int, ...]

    @property
    def agree(self) -> bool:
        return self.closed_form == self.direct


def extremal_rays_hirz(D: QDivisor, checks: list | None = None) -> list[Ray]:
    """Rays d_i eps_i for i in T_= and e_{i,j} for i in T_+, j in T_-.

    Each pair ray is computed from the closed form and again as the
    intersection of the balance plane with the segment eps_i eps_j; any
    disagreement raises.  Pass a list as ``checks`` to collect both values.
    """
    if D.variety.is_projective:
        raise ConeError("Hirzebruch divisor expected")
    spec = build_sigma(D)
    part = t_partition(D)
    ks = D.ks()
    rays = []
    for i in part.t_eq:
        c = D.components[i]
        d_i = _ell(ks, (i,)) * math.gcd(c.a, c.b)
        vec = [d_i * x for x in epsilon(D, i)]
        point = _integral(vec, f"e_{i}")
        if not spec.contains(point):
            raise ConeError(f"e_{i} = {point} is not in the cone")
        rays.append(Ray(point, f"e_{i}"))
    for i in part.t_plus:
        for j in part.t_minus:
            closed = pair_ray_closed_form(D, i, j)
            direct_unit = pair_ray_direct(D, i, j)
            direct = _integral([closed[0] * x for x in direct_unit], f"direct e_{i},{j}")
            check = RayCheck(f"e_{i},{j}", closed, direct, primitive(direct_unit))
            if checks is not None:
                checks.append(check)
            if not check.agree:
                raise ConeError(f"closed form {closed} and direct intersection {direct} disagree for e_{i},{j}")
            if not spec.contains(closed):
                raise ConeError(f"e_{i},{j} = {closed} is not in the cone")
            rays.append(Ray(closed, f"e_{i},{j}"))
    return rays


def extremal_rays(D: QDivisor) -> list[Ray]:
    return extremal_rays_proj(D) if D.variety.is_projective else extremal_rays_hirz(D)


def minimal_integral_multiple(vec: Sequence[Fraction], limit: int) -> int | None:
    """Smallest t in 1..limit with t*vec integral."""
    for t in range(1, limit + 1):
        if all((t * Fraction(x)).denominator == 1 for x in vec):
            return t
    return None


# --------------------------------------------------------------------------
# Exact cone membership and decompositions
# --------------------------------------------------------------------------

def _solve(columns: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Unique s with sum s_k columns[k] = target for independent columns, else None."""
    n = len(target)
    mat = RationalMatrix([[col[r] for col in columns] + [target[r]] for r in range(n)], len(columns) + 1)
    for vec in kernel_basis(mat):
        if vec[-1] != 0:
            return [-x / vec[-1] for x in vec[:-1]]
    return None


def _independent_subsets(points: Sequence[Sequence[int]], size: int):
    for idx in combinations(range(len(points)), size):
        sub = [points[k] for k in idx]
        if rank(RationalMatrix(sub)) == size:
            yield idx


def in_cone(target: Sequence, generators: Sequence[Sequence]) -> bool:
    """Exact test that target is a non-negative combination of generators."""
    if all(x == 0 for x in target):
        return True
    if not generators:
        return False
    r = rank(RationalMatrix(list(generators)))
    for size in range(1, r + 1):
        for idx in _independent_subsets(generators, size):
            s = _solve([generators[k] for k in idx], target)
            if s is not None and all(x >= 0 for x in s):
                return True
    return False


def is_extremal(rays: Sequence[Ray], index: int) -> bool:
    others = [r.point for k, r in enumerate(rays) if k != index]
    return not in_cone(rays[index].point, others)


def canonical_decompose(sigma: Sequence[int], rays: Sequence[Ray]) -> Decomposition:
    """sigma = lam + sum zeta_k e_k over the first simplicial subcone containing sigma."""
    pts = [r.point for r in rays]
    r = rank(RationalMatrix(pts))
    for idx in _independent_subsets(pts, r):
        s = _solve([pts[k] for k in idx], sigma)
        if s is None or any(x < 0 for x in s):
            continue
        zeta = [0] * len(rays)
        for k, x in zip(idx, s):
            zeta[k] = math.floor(x)
        lam = tuple(
            int(sigma[t] - sum(zeta[k] * pts[k][t] for k in range(len(rays)))) for t in range(len(sigma))
        )
        return Decomposition(lam, tuple(zeta), idx)
    raise ConeError(f"{tuple(sigma)} is not in the cone spanned by the rays")


def _box_feasible(pts: Sequence[Sequence[int]], target: Sequence[int], r: int) -> bool:
    """Is target = sum s_k pts[k] for some s in [0,1)^k?

    Every vertex of {s in [0,1]^k : sum s_k pts[k] = target} fixes the
    non-basic coordinates at 0 or 1.  A point with all s_k < 1 exists iff for
    each k some vertex has s_k < 1.
    """
    k = len(pts)
    seen_below = [False] * k
    found = False
    for basis in _independent_subsets(pts, r):
        rest = [t for t in range(k) if t not in basis]
        for fixed in product((0, 1), repeat=len(rest)):
            residual = [
                Fraction(target[c]) - sum(f * pts[t][c] for f, t in zip(fixed, rest)) for c in range(len(target))
            ]
            s = _solve([pts[t] for t in basis], residual)
            if s is None or any(x < 0 or x > 1 for x in s):
                continue
            found = True
            full = [Fraction(0)] * k
            for t, x in zip(basis, s):
                full[t] = x
            for t, f in zip(rest, fixed):
                full[t] = Fraction(f)
            for t in range(k):
                if full[t] < 1:
                    seen_below[t] = True
    return found and all(seen_below)


def box_points(rays: Sequence[Ray], spec: ConeSpec, cap: int = 200_000) -> list[tuple[int, ...]]:
    """Lattice points sum s_k e_k with 0 <= s_k < 1, found by scanning degrees below sum deg e_k."""
    pts = [r.point for r in rays]
    total = sum(r.degree for r in rays)
    r = rank(RationalMatrix(pts))
    out = []
    scanned = 0
    for d in range(total):
        for point in spec.slice(d, cap=cap):
            scanned += 1
            if scanned > cap:
                raise ConeError(f"box search exceeded cap of {cap} lattice points")
            if _box_feasible(pts, point, r):
                out.append(point)
    return out
