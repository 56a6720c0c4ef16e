from __future__ import annotations

from fractions import Fraction

import pytest

from canring.bounds import (
    BoundsError,
    applicable_bounds,
    chi_bound,
    combine_bounds,
    effective_bounds,
    ells,
    hirz_bounds,
    hirz_rho,
    hirz_tau,
    proj_bounds,
    psi_bound_proj,
    rewrite_in_basis,
    sharpest,
)
from canring.cones import Ray, extremal_rays_hirz
from canring.exact import parse_polynomial
from canring.geometry import Variety, divisor, ghost_complete

P2 = Variety.projective(2)
F0, F1 = Variety.hirzebruch(0), Variety.hirzebruch(1)
X = P2.variables


def hyperplane():
    return ghost_complete(divisor(P2, [("1/2", "x0"), ("-1/3", "x1")]))


def rays_of_degrees(*degs):
    return [Ray((d,), f"e_{t}") for t, d in enumerate(degs)]


@pytest.mark.parametrize(
    "items, expected",
    [
        ([("2/5", "x0^2 + x1*x2")], (5, 10)),
        ([("1/2", "x0"), ("1/3", "x1")], (3, 6)),
        ([(1, "x0"), (2, "x1^2 + x0*x2")], (1, 2)),
    ],
)
def test_effective_bounds(items, expected):
    assert effective_bounds(divisor(P2, items)) == expected


def test_effective_bounds_rejects_negative():
    with pytest.raises(BoundsError):
        effective_bounds(divisor(P2, [("1/2", "x0"), ("-1/3", "x1")]))


def test_proj_bounds_hyperplane():
    rep = proj_bounds(hyperplane())
    assert rep.ells == [3, 2, 6]
    assert rep.generator_bound == 11
    assert rep.relation_bound == 22 and rep.relation_bound_floor == 22
    assert rep.extra["psi_bound"] == 17
    assert rep.extra["chi_bound"] == 20


def test_proj_bounds_integral():
    D = ghost_complete(divisor(P2, [(1, "x0"), (-1, "x1"), (1, "x1^2 + x2^2")]))
    assert proj_bounds(D).generator_bound == sum(c.a for c in D.components)


@pytest.mark.parametrize("k", [2, 3])
def test_proj_bounds_ghost_family(k):
    D = ghost_complete(divisor(P2, [(Fraction(1, k), "x0"), (Fraction(-1, k + 1), "x1")]))
    rep = proj_bounds(D)
    assert rep.ells[2] == k * (k + 1)
    assert rep.generator_bound >= k * (k + 1)


def test_proj_bounds_nonpositive():
    with pytest.raises(BoundsError):
        proj_bounds(ghost_complete(divisor(P2, [("-1/2", "x0")])))


@pytest.mark.parametrize("degs, expected", [((2, 3, 6), 20), ((1,), 0), ((1, 1), 2)])
def test_chi_bound(degs, expected):
    assert chi_bound(rays_of_degrees(*degs)) == expected


def test_psi_bound():
    assert psi_bound_proj(hyperplane()) == 17
    D = ghost_complete(divisor(P2, [("1/2", "x0"), ("1/2", "x1")]))
    assert psi_bound_proj(D) == 1 + sum(ells(D.ks()))


@pytest.mark.parametrize("chi, psi, expected", [(22, 17, 22), (0, 5, 5), (4, 4, 4)])
def test_combine(chi, psi, expected):
    assert combine_bounds(chi, psi) == expected


@pytest.mark.parametrize(
    "f, basis, expected",
    [
        ("x0 + x1", ["x0", "x1", "x2"], "z0 + z1"),
        ("x0", ["x0 + x1", "x1", "x2"], "z0 - z1"),
        ("x0^2 + 3*x1*x2", ["x0", "x1", "x2"], "z0^2 + 3*z1*z2"),
    ],
)
def test_rewrite_in_basis(f, basis, expected):
    Z = ("z0", "z1", "z2")
    beta = rewrite_in_basis(parse_polynomial(f, X), [parse_polynomial(b, X) for b in basis])
    assert beta == parse_polynomial(expected, Z)
    images = [parse_polynomial(b, X) for b in basis]
    assert beta.substitute(images) == parse_polynomial(f, X)


def test_rewrite_dependent_basis():
    with pytest.raises(BoundsError):
        rewrite_in_basis(parse_polynomial("x0", X), [parse_polynomial(b, X) for b in ["x0", "x0", "x2"]])


def test_hirz_worked_example():
    D = ghost_complete(divisor(F0, [("1/2", "u"), ("1/3", "z")]))
    assert hirz_rho(D) == 12
    assert hirz_tau(D) == 18
    rep = hirz_bounds(D)
    assert (rep.generator_bound, rep.relation_bound) == (12, 24)
    assert rep.extra["chi_bound"] == 22


@pytest.mark.parametrize(
    "V, items",
    [
        (F0, [("1/2", "u"), ("1/3", "z")]),
        (F1, [("1/2", "u"), ("2/3", "z")]),
        (F1, [("2/3", "u*w + z"), ("1/2", "v")]),
        (F0, [("1/2", "u*z + v*w"), ("1/3", "u*w")]),
        (F0, [(1, "u*z + v*w")]),
    ],
)
def test_hirz_identities(V, items):
    D = ghost_complete(divisor(V, items))
    rho = hirz_rho(D)
    assert rho == sum(r.degree for r in extremal_rays_hirz(D))
    assert hirz_tau(D) <= 2 * rho


def test_hirz_integral_single_teq_ray():
    D = ghost_complete(divisor(F0, [(1, "u*z + v*w")]))
    rep = hirz_bounds(D)
    assert rep.extra["t_eq"] == [4]


def test_effective_vs_general_sanity():
    D = ghost_complete(divisor(P2, [("2/5", "x0")]))
    assert proj_bounds(D).generator_bound >= effective_bounds(D)[0]


def test_applicable_and_sharpest():
    D = ghost_complete(divisor(P2, [("1/2", "x0"), ("1/3", "x1")]))
    reports = applicable_bounds(D)
    assert [r.source for r in reports] == ["effective", "general"]
    assert sharpest(reports) == (3, 6)
    assert [r.source for r in applicable_bounds(hyperplane())] == ["general"]
    assert applicable_bounds(ghost_complete(divisor(P2, [("-1/2", "x0")]))) == []
