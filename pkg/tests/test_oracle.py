from __future__ import annotations

import pytest

from canring.exact import format_polynomial
from canring.geometry import Variety, divisor, ghost_complete, graded_dimension
from canring.oracle import Caps, SectionRing, check_dimensions, compute, verify_bounds

P1, P2 = Variety.projective(1), Variety.projective(2)
F0 = Variety.hirzebruch(0)


def hyperplane():
    return ghost_complete(divisor(P2, [("1/2", "x0"), ("-1/3", "x1")]))


def test_hyperplane_generators():
    rep = compute(hyperplane(), 11, relations=False)
    assert rep.generator_multiset() == {2: 1, 3: 1, 6: 1}
    (num,) = rep.generator_numerators[6]
    assert "x2" in format_polynomial(num)


def test_single_hyperplane_p1():
    D = ghost_complete(divisor(P1, [("2/5", "x0")]))
    rep = compute(D, 10)
    assert rep.generator_multiset() == {1: 1, 3: 1, 5: 1}
    assert rep.relation_multiset() == {6: 1}
    assert rep.hilbert[:7] == [1, 1, 1, 2, 2, 3, 3]


def test_polynomial_ring_has_no_relations():
    D = ghost_complete(divisor(P2, [(1, "x0")]))
    rep = compute(D, 8)
    assert rep.generator_multiset() == {1: 3}
    assert rep.relation_multiset() == {}


def test_single_hyperplane_p2():
    D = ghost_complete(divisor(P2, [("2/5", "x0")]))
    rep = compute(D, 14)
    assert rep.generator_multiset() == {1: 1, 3: 2, 5: 3}
    assert rep.relation_multiset() == {6: 3, 8: 2, 10: 1}


@pytest.mark.parametrize("k", [2, 3])
def test_ghost_family(k):
    D = ghost_complete(divisor(P2, [(f"1/{k}", "x0"), (f"-1/{k + 1}", "x1")]))
    rep = compute(D, k * (k + 1), relations=False)
    assert k * (k + 1) in rep.generator_degrees()


@pytest.mark.parametrize(
    "V, items, d_max",
    [
        (P2, [("1/2", "x0"), ("-1/3", "x1")], 9),
        (P1, [("2/5", "x0")], 10),
        (P2, [("1/2", "x0"), ("1/3", "x1 + x2")], 8),
        (P2, [("1/2", "x0^2 + x1*x2")], 6),
        (F0, [("1/2", "u"), ("1/3", "z")], 8),
    ],
)
def test_engines_agree(V, items, d_max):
    D = ghost_complete(divisor(V, items))
    reports = [compute(D, d_max, engine=e) for e in ("koszul", "words")]
    if SectionRing(D).toric:
        reports.append(compute(D, d_max, engine="toric"))
    first = reports[0]
    for rep in reports[1:]:
        assert rep.generator_multiset() == first.generator_multiset()
        assert rep.relation_multiset() == first.relation_multiset()
        assert rep.hilbert == first.hilbert


def test_two_lines_need_lcm_degree():
    # y2^5 / (y0^3 y1^2) in degree 6 needs both floors at their maximum, so it is indecomposable
    D = ghost_complete(divisor(P2, [("1/2", "x0"), ("1/3", "x1 + x2")]))
    rep = compute(D, 8, relations=False, engine="words")
    assert rep.generator_multiset() == {1: 1, 2: 2, 3: 3, 4: 1, 6: 1}


@pytest.mark.parametrize(
    "V, items",
    [
        (P2, [("1/2", "x0"), ("-1/3", "x1")]),
        (P2, [("2/5", "x0^2 + x1*x2"), ("1/3", "x0 + x2")]),
        (F0, [("1/2", "u"), ("1/3", "z")]),
    ],
)
def test_dimensions(V, items):
    D = ghost_complete(divisor(V, items))
    assert check_dimensions(D, 12)
    rep = compute(D, 8, relations=False)
    assert rep.hilbert == [graded_dimension(D, d) for d in range(9)]


def test_graded_dimension_examples():
    D = hyperplane()
    assert (graded_dimension(D, 6), graded_dimension(D, 0), graded_dimension(D, 1)) == (3, 1, 0)


def test_monotone_completeness():
    D = ghost_complete(divisor(P2, [("2/5", "x0")]))
    small, large = compute(D, 8), compute(D, 12)
    for d, n in small.generator_multiset().items():
        assert large.generators[d] == n
    for d, n in small.relation_multiset().items():
        assert large.relations[d] == n


def test_correction_exponents_nonnegative():
    ring = SectionRing(hyperplane())
    for d1 in range(1, 10):
        for d2 in range(1, 10):
            assert min(ring.correction_exponents(d1, d2)) >= 0


def test_verify_pass_and_fail():
    v = verify_bounds(hyperplane(), 11, 22, d_max=22)
    assert v.status == "PASS" and v.exit_code == 0
    D = ghost_complete(divisor(F0, [("1/2", "u"), ("1/3", "z")]))
    assert verify_bounds(D, 12, 24, d_max=24).status == "PASS"
    fake = verify_bounds(hyperplane(), 5, 10, d_max=10)
    assert fake.status == "FAIL" and fake.exit_code == 1
    assert fake.witness == {"kind": "generator", "degree": 6, "count": 1}


def test_verify_inconclusive():
    v = verify_bounds(hyperplane(), 11, 22, d_max=8)
    assert v.status == "INCONCLUSIVE" and v.exit_code == 3
    capped = verify_bounds(hyperplane(), 11, 22, caps=Caps(dmax=10))
    assert capped.status == "INCONCLUSIVE" and capped.report.capped


def test_caps_parse(monkeypatch):
    assert Caps.parse("words=10,dmax=5") == Caps(words=10, dmax=5)
    assert Caps.parse(None) == Caps()
    with pytest.raises(ValueError):
        Caps.parse("depth=3")
    monkeypatch.setenv("CANRING_CAPS", "dmax=7")
    assert Caps.from_env().dmax == 7


def test_words_cap_reported():
    D = ghost_complete(divisor(P2, [("2/5", "x0")]))
    rep = compute(D, 12, engine="words", caps=Caps(words=5))
    assert rep.capped and rep.complete_through < 12
