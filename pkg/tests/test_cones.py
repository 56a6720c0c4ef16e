from __future__ import annotations

import random
from fractions import Fraction

import pytest

from canring.cones import (
    ConeError,
    box_points,
    build_sigma,
    canonical_decompose,
    epsilon,
    epsilon_in_h,
    extremal_rays_hirz,
    extremal_rays_proj,
    in_cone,
    is_extremal,
    minimal_integral_multiple,
    pair_ray_closed_form,
    pair_ray_direct,
    t_partition,
)
from canring.geometry import Variety, divisor, ghost_complete

P1, P2 = Variety.projective(1), Variety.projective(2)
F0, F1, F2 = (Variety.hirzebruch(m) for m in range(3))


def hyperplane():
    return ghost_complete(divisor(P2, [("1/2", "x0"), ("-1/3", "x1")]))


def f0_worked():
    return ghost_complete(divisor(F0, [("1/2", "u"), ("1/3", "z")]))


def test_sigma_membership():
    spec = build_sigma(hyperplane())
    assert spec.contains((2, -1, 1, 0))
    assert spec.contains((0, 0, 0, 0))
    assert not spec.contains((1, -1, 0, 0))
    assert not spec.contains((2, -1, 0, 0))


def test_sigma_rejects_nonpositive_degree():
    with pytest.raises(ConeError):
        build_sigma(ghost_complete(divisor(P2, [("-1/2", "x0")])))


def test_rays_hyperplane():
    rays = extremal_rays_proj(hyperplane())
    assert [r.point for r in rays] == [(3, -1, 1, 0), (2, -1, 1, 0), (6, -3, 2, 1)]
    assert [r.degree for r in rays] == [3, 2, 6]
    assert all(is_extremal(rays, t) for t in range(3))


def test_rays_single_component():
    D = ghost_complete(divisor(P1, [("2/5", "x0")]))
    rays = extremal_rays_proj(D)
    spec = build_sigma(D)
    assert all(spec.contains(r.point) for r in rays)
    assert [r.degree for r in rays] == [1, 5]


def test_rays_integral_divisor():
    D = ghost_complete(divisor(P2, [(1, "x0"), (2, "x1^2 + x2^2")]))
    rays = extremal_rays_proj(D)
    assert [r.degree for r in rays] == [c.a for c in D.components]


@pytest.mark.parametrize(
    "items, eq, plus, minus",
    [
        ([("1/2", "u"), ("1/3", "z")], (), (0, 1), (2, 3)),
        ([("1/2", "u*z + v*w"), ("1/3", "u*w")], (4, 5), (0, 1), (2, 3)),
    ],
)
def test_t_partition(items, eq, plus, minus):
    D = ghost_complete(divisor(F0, items))
    part = t_partition(D)
    assert (part.t_eq, part.t_plus, part.t_minus) == (eq, plus, minus)


def test_t_partition_mixed():
    D = ghost_complete(divisor(F0, [("1/2", "u"), ("1/2", "z"), ("1/3", "u*z + v*w")]))
    part = t_partition(D)
    assert 4 in part.t_eq
    assert 0 in part.t_plus and 2 in part.t_minus


def test_f0_rays():
    D = f0_worked()
    checks = []
    rays = extremal_rays_hirz(D, checks)
    assert [r.point for r in rays] == [(1, 0, 0, 0, 0), (3, 0, 0, -1, 1), (2, -1, 1, 0, 0), (6, -3, 3, -2, 2)]
    assert [r.degree for r in rays] == [1, 3, 2, 6]
    assert all(c.agree for c in checks) and len(checks) == 4
    assert all(is_extremal(rays, t) for t in range(4))
    spec = build_sigma(D)
    assert all(all(x == 0 for x in spec.balance(r.point)) for r in rays)


HIRZ_CASES = [
    (F0, [("1/2", "u"), ("1/3", "z")]),
    (F1, [("1/2", "u"), ("2/3", "z")]),
    (F1, [("1/3", "v"), ("1/2", "w"), ("1/2", "z")]),
    (F2, [("1/2", "z"), ("-1/3", "u"), ("1/2", "w")]),
    (F0, [("1/2", "u*z + v*w"), ("1/3", "u*w")]),
    (F1, [("2/3", "u*w + z"), ("1/2", "v")]),
]


@pytest.mark.parametrize("V, items", HIRZ_CASES)
def test_hirz_ray_properties(V, items):
    D = ghost_complete(divisor(V, items))
    part = t_partition(D)
    for i in range(len(D.components)):
        assert epsilon_in_h(D, i) == (i in part.t_eq)
    checks = []
    rays = extremal_rays_hirz(D, checks)
    spec = build_sigma(D)
    for r in rays:
        assert spec.contains(r.point)
    for c in checks:
        assert c.agree
    for t in range(len(rays)):
        assert is_extremal(rays, t)
    for i in part.t_plus:
        for j in part.t_minus:
            closed = pair_ray_closed_form(D, i, j)
            assert [closed[0] * x for x in pair_ray_direct(D, i, j)] == list(closed)
    for r in rays:
        if "," not in r.label:
            i = int(r.label[2:])
            assert minimal_integral_multiple(epsilon(D, i), r.degree) == r.degree


def test_decompose_examples():
    D = hyperplane()
    rays = extremal_rays_proj(D)
    dec = canonical_decompose(rays[0].point, rays)
    assert dec.lam == (0, 0, 0, 0) and dec.zeta == (1, 0, 0)
    total = tuple(sum(r.point[t] for r in rays) for t in range(4))
    dec = canonical_decompose(total, rays)
    assert dec.lam == (0, 0, 0, 0)
    dec = canonical_decompose((5, -2, 2, 0), rays)
    assert tuple(dec.lam[t] + sum(z * r.point[t] for z, r in zip(dec.zeta, rays)) for t in range(4)) == (5, -2, 2, 0)
    assert dec.lam[0] < sum(r.degree for r in rays)


def test_decompose_outside_cone():
    rays = extremal_rays_proj(hyperplane())
    with pytest.raises(ConeError):
        canonical_decompose((1, 5, -5, 0), rays)


@pytest.mark.parametrize("V, items", [(P2, [("1/2", "x0"), ("-1/3", "x1")])] + HIRZ_CASES[:3])
def test_decompose_random_points(V, items):
    D = ghost_complete(divisor(V, items))
    rays = extremal_rays_proj(D) if V.is_projective else extremal_rays_hirz(D)
    spec = build_sigma(D)
    total = sum(r.degree for r in rays)
    rng = random.Random(7)
    for _ in range(25):
        pts = spec.slice(rng.randint(0, 2 * total))
        if not pts:
            continue
        sigma = rng.choice(pts)
        dec = canonical_decompose(sigma, rays)
        assert spec.contains(dec.lam)
        assert all(z >= 0 for z in dec.zeta)
        rebuilt = tuple(dec.lam[t] + sum(z * r.point[t] for z, r in zip(dec.zeta, rays)) for t in range(len(sigma)))
        assert rebuilt == tuple(sigma)
        assert dec.lam[0] < total


def test_box_points_unimodular():
    D = hyperplane()
    assert box_points(extremal_rays_proj(D), build_sigma(D)) == [(0, 0, 0, 0)]


def test_box_points_f0():
    D = f0_worked()
    rays = extremal_rays_hirz(D)
    pts = box_points(rays, build_sigma(D))
    spec = build_sigma(D)
    assert len(pts) == 10 and (0, 0, 0, 0, 0) in pts
    assert all(spec.contains(p) and p[0] < 12 for p in pts)


def test_box_points_cap():
    D = f0_worked()
    with pytest.raises(ConeError, match="cap"):
        box_points(extremal_rays_hirz(D), build_sigma(D), cap=3)


def test_in_cone():
    assert in_cone((2, 3), [(1, 0), (0, 1)])
    assert not in_cone((-1, 0), [(1, 0), (0, 1)])
    assert in_cone((Fraction(1, 2), 0), [(1, 0)])
