"""Skew forms on Z^d and the integral split-signature group acting on them.

The ambient space is V = L_R + L_R^* with the even pairing
Q((x1,l1),(x2,l2)) = l1(x2) + l2(x1), whose Gram matrix in the basis
(e_1..e_d, e^1..e^d) is J = [[0,I],[I,0]]. A skew form Phi on L_R is encoded
by its matrix E (phi(m,n) = m^T E n); its graph {(x, Ex)} is a Lagrangian
subspace of (V, Q), and block matrices g = [[A,B],[C,D]] preserving J act on
graphs by the fractional-linear rule E -> (C + D E)(A + B E)^{-1} wherever the
chart matrix A + B E is invertible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import (
    Matrix,
    identity,
    mat_add,
    mat_det,
    mat_inv,
    mat_mul,
    mat_vec,
    to_matrix,
    transpose,
    zero,
)


class SingularGraphImage(Exception):
    """The image of the graph is not a graph in this chart (A + B*Phi singular)."""


@dataclass(frozen=True)
class SkewForm:
    """Skew-symmetric bilinear form on Z^d with exact rational entries."""

    entries: Matrix

    def __post_init__(self):
        e = to_matrix(self.entries)
        object.__setattr__(self, "entries", e)
        d = len(e)
        if any(len(row) != d for row in e):
            raise ValueError("entries must be square")
        for i in range(d):
            for j in range(d):
                if e[i][j] != -e[j][i]:
                    raise ValueError("entries must be skew-symmetric")

    @property
    def d(self) -> int:
        return len(self.entries)

    def pairing(self, m, n) -> Fraction:
        """phi(m, n) = m^T E n."""
        return sum(
            Fraction(mi) * self.entries[i][j] * Fraction(nj)
            for i, mi in enumerate(m)
            for j, nj in enumerate(n)
        )

    @classmethod
    def zero(cls, d: int) -> "SkewForm":
        return cls(zero(d))

    @classmethod
    def from_upper(cls, d: int, upper: dict) -> "SkewForm":
        """Build from {(i, j): value} with i < j."""
        rows = [[Fraction(0)] * d for _ in range(d)]
        for (i, j), v in upper.items():
            if not i < j:
                raise ValueError("upper triangle indices required")
            rows[i][j] = Fraction(v)
            rows[j][i] = -Fraction(v)
        return cls(tuple(tuple(r) for r in rows))


def pairing_matrix(d: int) -> Matrix:
    """Gram matrix J = [[0,I],[I,0]] of the even pairing on L + L^*."""
    j = [[Fraction(0)] * (2 * d) for _ in range(2 * d)]
    for i in range(d):
        j[i][d + i] = Fraction(1)
        j[d + i][i] = Fraction(1)
    return tuple(tuple(row) for row in j)


@dataclass(frozen=True)
class OddSymplecticMatrix:
    """Integer block matrix [[A,B],[C,D]] with g^T J g = J."""

    a: Matrix
    b: Matrix
    c: Matrix
    d_block: Matrix

    def __post_init__(self):
        for name in ("a", "b", "c", "d_block"):
            object.__setattr__(self, name, to_matrix(getattr(self, name)))
        d = len(self.a)
        blocks = (self.a, self.b, self.c, self.d_block)
        if any(len(m) != d or any(len(r) != d for r in m) for m in blocks):
            raise ValueError("blocks must be square of equal size")
        for m in blocks:
            for row in m:
                for x in row:
                    if x.denominator != 1:
                        raise ValueError("integer entries required")
        g = self.full_matrix()
        j = pairing_matrix(d)
        if mat_mul(mat_mul(transpose(g), j), g) != j:
            raise ValueError("matrix does not preserve the split pairing")

    @property
    def d(self) -> int:
        return len(self.a)

    def full_matrix(self) -> Matrix:
        top = tuple(ra + rb for ra, rb in zip(self.a, self.b))
        bot = tuple(rc + rd for rc, rd in zip(self.c, self.d_block))
        return top + bot

    @property
    def special(self) -> bool:
        """True when det g = +1 (SO(d,d,Z) rather than the full O(d,d,Z))."""
        return mat_det(self.full_matrix()) == 1

    def compose(self, other: "OddSymplecticMatrix") -> "OddSymplecticMatrix":
        m = mat_mul(self.full_matrix(), other.full_matrix())
        return OddSymplecticMatrix.from_matrix(m)

    @classmethod
    def from_matrix(cls, m) -> "OddSymplecticMatrix":
        m = to_matrix(m)
        d2 = len(m)
        if d2 % 2:
            raise ValueError("even size required")
        d = d2 // 2
        a = tuple(row[:d] for row in m[:d])
        b = tuple(row[d:] for row in m[:d])
        c = tuple(row[:d] for row in m[d:])
        dd = tuple(row[d:] for row in m[d:])
        return cls(a, b, c, dd)

    @classmethod
    def identity(cls, d: int) -> "OddSymplecticMatrix":
        return cls(identity(d), zero(d), zero(d), identity(d))


@dataclass(frozen=True)
class LagrangianGraph:
    """Column basis of the graph {(x, Phi x)} inside L_R + L_R^*."""

    source: SkewForm
    basis: tuple[tuple[Fraction, ...], ...]


def graph_of(phi: SkewForm) -> LagrangianGraph:
    """Graph basis vectors (e_i, E e_i); each is Q-isotropic against the others."""
    d = phi.d
    cols = []
    for i in range(d):
        e_i = tuple(Fraction(1) if k == i else Fraction(0) for k in range(d))
        cols.append(e_i + mat_vec(phi.entries, e_i))
    return LagrangianGraph(source=phi, basis=tuple(cols))


def act(g: OddSymplecticMatrix, phi: SkewForm) -> SkewForm:
    """Partial action Phi -> (C + D Phi)(A + B Phi)^{-1}.

    Raises SingularGraphImage when the transformed graph has no chart over L
    (A + B Phi singular); callers exploring orbits should skip such edges.
    """
    if g.d != phi.d:
        raise ValueError("dimension mismatch")
    chart = mat_add(g.a, mat_mul(g.b, phi.entries))
    num = mat_add(g.c, mat_mul(g.d_block, phi.entries))
    try:
        inv = mat_inv(chart)
    except ZeroDivisionError:
        raise SingularGraphImage(
            "A + B*Phi is singular; image is not a graph over L"
        ) from None
    return SkewForm(mat_mul(num, inv))


def _gl_embedding(a: Matrix) -> OddSymplecticMatrix:
    inv_t = transpose(mat_inv(a))
    d = len(a)
    return OddSymplecticMatrix(a, zero(d), zero(d), inv_t)


def _skew_shear(d: int, i: int, j: int) -> OddSymplecticMatrix:
    n = [[Fraction(0)] * d for _ in range(d)]
    n[i][j] = Fraction(1)
    n[j][i] = Fraction(-1)
    return OddSymplecticMatrix(identity(d), tuple(tuple(r) for r in n), zero(d), identity(d))


def factor_swap(d: int) -> OddSymplecticMatrix:
    return OddSymplecticMatrix(zero(d), identity(d), identity(d), zero(d))


def standard_generators(d: int) -> list[OddSymplecticMatrix]:
    """Generating set: GL(d,Z) block embeddings, skew shears, and the factor swap.

    For d = 1 this is just {identity, swap}; the swap has det = (-1)^d and is
    flagged non-special in odd rank.
    """
    if d < 1:
        raise ValueError("d must be positive")
    gens = [OddSymplecticMatrix.identity(d), factor_swap(d)]
    if d == 1:
        return gens
    for i in range(d - 1):
        rows = [[Fraction(1) if r == c else Fraction(0) for c in range(d)] for r in range(d)]
        rows[i][i] = rows[i + 1][i + 1] = Fraction(0)
        rows[i][i + 1] = rows[i + 1][i] = Fraction(1)
        gens.append(_gl_embedding(tuple(tuple(r) for r in rows)))
    flip = [[Fraction(1) if r == c else Fraction(0) for c in range(d)] for r in range(d)]
    flip[0][0] = Fraction(-1)
    gens.append(_gl_embedding(tuple(tuple(r) for r in flip)))
    shear = [[Fraction(1) if r == c else Fraction(0) for c in range(d)] for r in range(d)]
    shear[0][1] = Fraction(1)
    gens.append(_gl_embedding(tuple(tuple(r) for r in shear)))
    for i in range(d):
        for j in range(i + 1, d):
            gens.append(_skew_shear(d, i, j))
    return gens
