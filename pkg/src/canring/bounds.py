"""Degree bounds for generators and relations of section rings.

* effective divisors on P^m: generators in degree <= max k_i, relations <= 2 max k_i
* any divisor of positive degree on P^m: generators <= sum l_i a_i and
  relations <= max(2 sum l_i a_i, max a_i / deg D + sum l_i a_i),
  where l_i = lcm of the k_j with j != i
* Hirzebruch surfaces: generators <= rho, relations <= 2 rho, with rho the
  sum of the extremal ray degrees and the sharper tau = rho + (largest ray
  degree) reported alongside
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cones import extremal_rays_hirz, extremal_rays_proj, t_partition
from .exact import Polynomial, format_rational, lcm
from .geometry import DivisorError, QDivisor, degree_of, ghost_complete, _invert, _linear_vector


class BoundsError(ValueError):
    pass


@dataclass
class BoundReport:
    generator_bound: int
    relation_bound: Fraction
    source: str
    ells: list[int] = field(default_factory=list)
    degree: object = None
    extra: dict = field(default_factory=dict)

    @property
    def relation_bound_floor(self) -> int:
        return math.floor(self.relation_bound)

    def to_json(self) -> dict:
        out = {
            "source": self.source,
            "generator_bound": self.generator_bound,
            "relation_bound": format_rational(self.relation_bound),
            "relation_bound_floor": self.relation_bound_floor,
            "ells": self.ells,
        }
        if self.degree is not None:
            if isinstance(self.degree, tuple):
                out["degree"] = [format_rational(x) for x in self.degree]
            else:
                out["degree"] = format_rational(self.degree)
        for key, value in self.extra.items():
            out[key] = _jsonable(value)
        return out


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def ells(ks: Sequence[int]) -> list[int]:
    """l_i = lcm of every k_j except k_i."""
    return [lcm(k for j, k in enumerate(ks) if j != i) for i in range(len(ks))]


def effective_bounds(D: QDivisor) -> tuple[int, int]:
    if not D.variety.is_projective:
        raise BoundsError("effective bounds apply to projective space")
    if not D.is_effective():
        raise BoundsError("divisor has a negative coefficient")
    if not any(a > 0 for a in D.alphas):
        raise BoundsError("divisor has no positive coefficient")
    kmax = max(D.ks())
    return kmax, 2 * kmax


def psi_bound_proj(D: QDivisor) -> Fraction:
    deg = degree_of(D)
    if deg <= 0:
        raise BoundsError(f"deg D = {deg} is not positive")
    ell = ells(D.ks())
    a = [c.a for c in D.components]
    return Fraction(max(a)) / deg + sum(l * x for l, x in zip(ell, a))


def chi_bound(rays) -> int:
    if not rays:
        raise BoundsError("no rays")
    return 2 * (sum(r.degree for r in rays) - 1)


def combine_bounds(chi, psi) -> Fraction:
    return max(Fraction(chi), Fraction(psi))


def proj_bounds(D: QDivisor) -> BoundReport:
    if not D.variety.is_projective:
        raise BoundsError("projective divisor expected")
    deg = degree_of(D)
    if deg <= 0:
        raise BoundsError(f"deg D = {deg} is not positive")
    D = ghost_complete(D)
    ell = ells(D.ks())
    a = [c.a for c in D.components]
    gen = sum(l * x for l, x in zip(ell, a))
    psi = psi_bound_proj(D)
    rel = combine_bounds(2 * gen, psi)
    rays = extremal_rays_proj(D)
    return BoundReport(
        generator_bound=gen,
        relation_bound=rel,
        source="general",
        ells=ell,
        degree=deg,
        extra={
            "psi_bound": psi,
            "chi_bound": chi_bound(rays),
            "ray_degrees": [r.degree for r in rays],
        },
    )


def rewrite_in_basis(f: Polynomial, basis: Sequence[Polynomial], names: Sequence[str] | None = None) -> Polynomial:
    """The unique beta with beta(basis) = f, for m+1 independent linear forms."""
    nv = len(f.variables)
    if len(basis) != nv:
        raise BoundsError(f"need {nv} basis forms, got {len(basis)}")
    mat = []
    for g in basis:
        vec = _linear_vector(g, range(nv))
        if vec is None:
            raise BoundsError(f"basis form {g} is not linear")
        mat.append(vec)
    try:
        inv = _invert(mat)
    except DivisorError:
        raise BoundsError("basis forms are linearly dependent") from None
    names = tuple(names or (f"z{k}" for k in range(nv)))
    images = [
        Polynomial(names, {tuple(int(t == k) for t in range(nv)): inv[j][k] for k in range(nv)}) for j in range(nv)
    ]
    return f.substitute(images)


# --------------------------------------------------------------------------
# Hirzebruch surfaces
# --------------------------------------------------------------------------

def _hirz_terms(D: QDivisor) -> tuple[list[int], dict[tuple[int, int], int]]:
    deg = degree_of(D)
    if D.variety.is_projective:
        raise BoundsError("Hirzebruch divisor expected")
    if deg[0] <= 0 or deg[1] <= 0:
        raise BoundsError(f"bidegree {deg} of D is not positive")
    D = ghost_complete(D)
    part = t_partition(D)
    ks = D.ks()
    ell = ells(ks)
    eq_terms = [ell[i] * math.gcd(D.components[i].a, D.components[i].b) for i in part.t_eq]
    pair_terms = {}
    for i in part.t_plus:
        for j in part.t_minus:
            ci, cj = D.components[i], D.components[j]
            ell_ij = lcm(k for t, k in enumerate(ks) if t not in (i, j))
            pair_terms[(i, j)] = ell_ij * (ci.a * cj.b - cj.a * ci.b)
    return eq_terms, pair_terms


def hirz_rho(D: QDivisor) -> int:
    eq_terms, pair_terms = _hirz_terms(D)
    return sum(eq_terms) + sum(pair_terms.values())


def hirz_tau(D: QDivisor) -> int:
    eq_terms, pair_terms = _hirz_terms(D)
    rho = sum(eq_terms) + sum(pair_terms.values())
    return rho + max(eq_terms + list(pair_terms.values()))


def hirz_bounds(D: QDivisor) -> BoundReport:
    D = ghost_complete(D)
    eq_terms, pair_terms = _hirz_terms(D)
    rho = sum(eq_terms) + sum(pair_terms.values())
    tau = rho + max(eq_terms + list(pair_terms.values()))
    rays = extremal_rays_hirz(D)
    part = t_partition(D)
    ks = D.ks()
    return BoundReport(
        generator_bound=rho,
        relation_bound=Fraction(2 * rho),
        source="hirzebruch",
        ells=ells(ks),
        degree=degree_of(D),
        extra={
            "rho": rho,
            "tau": tau,
            "chi_bound": chi_bound(rays),
            "t_eq": list(part.t_eq),
            "t_plus": list(part.t_plus),
            "t_minus": list(part.t_minus),
            "pair_ells": {
                f"{i},{j}": lcm(k for t, k in enumerate(ks) if t not in (i, j)) for (i, j) in pair_terms
            },
            "ray_degrees": [r.degree for r in rays],
        },
    )


def applicable_bounds(D: QDivisor) -> list[BoundReport]:
    """Every theorem bound that applies to D (empty when the degree is not positive)."""
    out = []
    if D.variety.is_projective:
        deg = degree_of(D)
        if deg <= 0:
            return out
        if D.is_effective():
            g, r = effective_bounds(D)
            out.append(BoundReport(g, Fraction(r), "effective", ells=[], degree=deg, extra={"k": D.ks()}))
        out.append(proj_bounds(D))
        return out
    A, B = degree_of(D)
    if A > 0 and B > 0:
        out.append(hirz_bounds(D))
    return out


def sharpest(reports: Sequence[BoundReport]) -> tuple[int, Fraction]:
    """Smallest generator and relation bounds across the applicable theorems."""
    return min(r.generator_bound for r in reports), min(r.relation_bound for r in reports)
