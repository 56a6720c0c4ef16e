"""Lower convergents of a non-negative rational.

The sequence 0 = c0/d0 < c1/d1 < ... < cr/dr = p/q is the Hilbert basis of
the plane cone {(c, d) : 0 <= c <= alpha*d}, listed by increasing slope.
Consecutive entries are unimodular: c_{i+1} d_i - c_i d_{i+1} = 1.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

from .exact import as_rational


class Convergent(NamedTuple):
    c: int
    d: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.c, self.d)


class ConvergentSequence(tuple):
    """Immutable tuple of :class:`Convergent` entries."""

    def __new__(cls, entries: Sequence[tuple[int, int]]):
        return super().__new__(cls, (Convergent(int(c), int(d)) for c, d in entries))

    @property
    def alpha(self) -> Fraction:
        return self[-1].value

    def degrees(self) -> list[int]:
        return [e.d for e in self]

    def pole_orders(self) -> list[int]:
        return [e.c for e in self]

    def __str__(self) -> str:
        return " ".join(f"{e.c}/{e.d}" for e in self)


def _check_alpha(alpha) -> Fraction:
    alpha = as_rational(alpha)
    if alpha < 0:
        raise ValueError(f"negative alpha {alpha} has no lower convergents")
    return alpha


def lower_convergents(alpha) -> ConvergentSequence:
    """Best lower approximations of alpha, from 0/1 up to alpha itself.

    Each step solves c'd - cd' = 1 with extended gcd and takes the solution
    with the largest slope not exceeding alpha.
    """
    alpha = _check_alpha(alpha)
    p, q = alpha.numerator, alpha.denominator
    out = [(0, 1)]
    c, d = 0, 1
    while c * q != p * d:
        # particular solution of x*d - c*y = 1
        _, s, t = _ext_gcd(d, c)  # s*d + t*c = 1
        x, y = s, -t
        # general solution (x + k c, y + k d); need y' > 0 and x' q <= p y'
        kmin = (-y) // d + 1
        # x'q - p y' = (xq - py) + k(cq - pd); cq - pd < 0 so this decreases in k
        slope_gap = p * d - c * q
        need = x * q - p * y
        k_fit = -((-need) // slope_gap)
        k = max(kmin, k_fit)
        c, d = x + k * c, y + k * d
        out.append((c, d))
    return ConvergentSequence(out)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, s, t = _ext_gcd(b, a % b)
    return g, t, s - (a // b) * t


def record_scan(alpha) -> ConvergentSequence:
    """Reference construction by scanning denominators.

    For d = 1..q record each new strict maximum of floor(d*alpha)/d.  When
    alpha >= 1 the integer steps 1/1, 2/1, ... below floor(alpha) are not
    records of any scan yet lie on the hull, so they are listed explicitly.
    """
    alpha = _check_alpha(alpha)
    q = alpha.denominator
    out = [(0, 1)]
    out.extend((j, 1) for j in range(1, math.floor(alpha)))
    best = Fraction(out[-1][0], 1)
    for d in range(1, q + 1):
        c = math.floor(d * alpha)
        if Fraction(c, d) > best:
            best = Fraction(c, d)
            out.append((c, d))
    return ConvergentSequence(out)


def hilbert_basis_2d(alpha) -> ConvergentSequence:
    """Brute-force Hilbert basis of {0 <= c <= alpha*d}, sorted by slope."""
    alpha = _check_alpha(alpha)
    p, q = alpha.numerator, alpha.denominator
    pts = [(c, d) for d in range(1, q + 1) for c in range(0, p + 1) if c * q <= p * d]
    pts.append((0, 1))
    pts = sorted(set(pts))
    inside = set(pts)

    def reducible(c, d):
        for c1, d1 in pts:
            if (c1, d1) == (c, d) or d1 > d or c1 > c:
                continue
            if (c - c1, d - d1) in inside:
                return True
        return False

    basis = [pt for pt in pts if not reducible(*pt)]
    basis.sort(key=lambda e: Fraction(e[0], e[1]))
    return ConvergentSequence(basis)


def two_convergent_decompose(target: tuple[int, int], seq: ConvergentSequence) -> tuple[int, tuple[int, int]]:
    """Write target = (d, c) as k1*(d_h, c_h) + k2*(d_{h+1}, c_{h+1}) with k1, k2 >= 0.

    h is the index whose slope interval [c_h/d_h, c_{h+1}/d_{h+1}) contains
    c/d; a target on the outer ray uses h = r and k2 = 0.
    """
    d, c = target
    if d < 0 or c < 0 or c * seq.alpha.denominator > seq.alpha.numerator * d:
        raise ValueError(f"target {target} lies outside the cone 0 <= c <= {seq.alpha}*d")
    if d == 0:
        return 0, (0, 0)
    r = len(seq) - 1
    for h in range(r):
        ch, dh = seq[h]
        cn, dn = seq[h + 1]
        if ch * d <= c * dh and c * dn < cn * d:
            return h, (cn * d - c * dn, c * dh - ch * d)
    cr, dr = seq[r]
    if c * dr == cr * d and d % dr == 0:
        return r, (d // dr, 0)
    raise ValueError(f"target {target} is not an integral multiple of the last convergent")
