"""Covering counts of an elliptic curve and their quasi-modular structure.

The degree-d covers with 2g-2 simple branch points are counted through the
symmetric group: a cover corresponds to (a, b, tau_1, ..., tau_{2g-2}) with
[a, b] tau_1 ... tau_{2g-2} = 1 and the tau_i transpositions, weighted by
1/d!. Frobenius reduces the disconnected labeled count to

    D_{b,d} = sum over partitions lambda of d of f(lambda)^b,

where f(lambda) = sum_i lambda_i (lambda_i - 2i + 1) / 2 is the central
character of the transposition class. Connected counts come from the formal
logarithm of the bivariate series Z(q, y) = sum_lambda q^{|lambda|}
exp(y f(lambda)), restricted to y^{2g-2} (branch points labeled, hence the
exponential in y). A direct tuple enumeration over S_d provides the second,
independent oracle. The counts assemble into F_g(q), which decomposes exactly
in the weight-(6g-6) monomials of E2, E4, E6; everything here is exact
rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial

from .linalg import solve_sequential


class UnsupportedWeight(Exception):
    """Eisenstein generator covers k in {2, 4, 6} only."""


class TooLarge(Exception):
    """Brute-force enumeration bound exceeded."""


class NoSolution(Exception):
    """Decomposition failed; carries the first mismatching q-power."""

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


# Calibration outcome: the tuple count divided by d!, with transitivity for
# connectedness, already matches the log-extracted series with no shift or
# degenerate-cover subtraction. Kept as a named constant so the convention is
# explicit and tested.
DEGENERATE_COVER_CORRECTION = Fraction(0)


# ---------------------------------------------------------------------------
# Exact q-series


class QSeries:
    """Exact rational power series in q, truncated at a tracked order."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int | None = None):
        coeffs = [Fraction(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be >= 0")
        coeffs = coeffs[: order + 1] + [Fraction(0)] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def zero(cls, order: int) -> "QSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls([Fraction(1)], order)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __add__(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        return QSeries([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], n)

    def __sub__(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        return QSeries([self.coeffs[i] - other.coeffs[i] for i in range(n + 1)], n)

    def __mul__(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return QSeries(out, n)

    def scale(self, c) -> "QSeries":
        c = Fraction(c)
        return QSeries([c * v for v in self.coeffs], self.order)

    def pow(self, k: int) -> "QSeries":
        out = QSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def q_derivative(self) -> "QSeries":
        """q d/dq, same truncation order."""
        return QSeries([i * c for i, c in enumerate(self.coeffs)], self.order)

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[: min(6, self.order + 1)])
        return f"QSeries([{head}...], order={self.order})"


# ---------------------------------------------------------------------------
# Eisenstein series


def _divisor_power_sum(n: int, k: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


_EISENSTEIN_FACTOR = {2: -24, 4: 240, 6: -504}


def eisenstein(k: int, order: int) -> QSeries:
    """Normalized E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n for k in {2, 4, 6}."""
    if k not in _EISENSTEIN_FACTOR:
        raise UnsupportedWeight(f"k = {k}; supported weights are 2, 4, 6")
    if order < 1:
        raise ValueError("order must be >= 1")
    fac = _EISENSTEIN_FACTOR[k]
    coeffs = [Fraction(1)] + [Fraction(fac * _divisor_power_sum(n, k - 1)) for n in range(1, order + 1)]
    return QSeries(coeffs, order)


def ramanujan_defect(order: int = 50) -> QSeries:
    """q dE2/dq - (E2^2 - E4)/12; identically zero if the generator is right."""
    e2 = eisenstein(2, order)
    e4 = eisenstein(4, order)
    return e2.q_derivative() - (e2 * e2 - e4).scale(Fraction(1, 12))


# ---------------------------------------------------------------------------
# Partitions and the transposition character


def partitions(d: int, max_part: int | None = None):
    """Weakly decreasing positive tuples summing to d (d = 0 gives ())."""
    if d == 0:
        yield ()
        return
    cap = d if max_part is None else min(max_part, d)
    for first in range(cap, 0, -1):
        for rest in partitions(d - first, first):
            yield (first,) + rest


def transposition_character(parts) -> Fraction:
    """f(lambda) = sum_i lambda_i (lambda_i - 2i + 1) / 2 (i starting at 1)."""
    parts = tuple(int(p) for p in parts)
    if any(p <= 0 for p in parts) or list(parts) != sorted(parts, reverse=True):
        raise ValueError("partition parts must be positive and weakly decreasing")
    return sum(
        Fraction(p * (p - 2 * i + 1), 2) for i, p in enumerate(parts, start=1)
    )


# ---------------------------------------------------------------------------
# Bivariate branch-point series and connected extraction


class BivariateSeries:
    """Polynomial in y with QSeries coefficients; y truncated at a fixed top power."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = tuple(parts)

    @property
    def y_top(self) -> int:
        return len(self.parts) - 1

    @property
    def order(self) -> int:
        return self.parts[0].order

    @classmethod
    def zero(cls, order: int, y_top: int) -> "BivariateSeries":
        return cls([QSeries.zero(order) for _ in range(y_top + 1)])

    @classmethod
    def one(cls, order: int, y_top: int) -> "BivariateSeries":
        return cls([QSeries.one(order)] + [QSeries.zero(order) for _ in range(y_top)])

    def __add__(self, other: "BivariateSeries") -> "BivariateSeries":
        return BivariateSeries(a + b for a, b in zip(self.parts, other.parts))

    def __sub__(self, other: "BivariateSeries") -> "BivariateSeries":
        return BivariateSeries(a - b for a, b in zip(self.parts, other.parts))

    def __mul__(self, other: "BivariateSeries") -> "BivariateSeries":
        n = min(self.order, other.order)
        top = min(self.y_top, other.y_top)
        out = [QSeries.zero(n) for _ in range(top + 1)]
        for i, a in enumerate(self.parts[: top + 1]):
            for j in range(top + 1 - i):
                out[i + j] = out[i + j] + a * other.parts[j]
        return BivariateSeries(out)

    def scale(self, c) -> "BivariateSeries":
        return BivariateSeries(p.scale(c) for p in self.parts)

    def q_order_at_least(self, k: int) -> bool:
        return all(all(c == 0 for c in p.coeffs[: min(k, p.order + 1)]) for p in self.parts)


def _log_one_plus(w: BivariateSeries) -> BivariateSeries:
    """log(1 + w) for w with no q^0 part; the series terminates at the order."""
    if not w.q_order_at_least(1):
        raise ValueError("log argument must be 1 + (positive q-order)")
    out = BivariateSeries.zero(w.order, w.y_top)
    power = w
    for k in range(1, w.order + 1):
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
        if k < w.order:
            power = power * w
    return out


def _exp(l: BivariateSeries) -> BivariateSeries:
    """exp for a series with no q^0 part; terminates at the order."""
    if not l.q_order_at_least(1):
        raise ValueError("exp argument must have positive q-order")
    out = BivariateSeries.one(l.order, l.y_top)
    power = BivariateSeries.one(l.order, l.y_top)
    for k in range(1, l.order + 1):
        power = power * l
        out = out + power.scale(Fraction(1, factorial(k)))
    return out


def branch_point_series(order: int, y_top: int) -> BivariateSeries:
    """Z(q, y) = sum over partitions q^{|lambda|} exp(y f(lambda)), truncated.

    The y^b coefficient of q^d is sum_{lambda of d} f(lambda)^b / b!: branch
    points are labeled, so the per-degree count with b of them is b! times
    this coefficient.
    """
    parts = [[Fraction(0)] * (order + 1) for _ in range(y_top + 1)]
    for d in range(order + 1):
        for lam in partitions(d):
            f = transposition_character(lam)
            fb = Fraction(1)
            for b in range(y_top + 1):
                parts[b][d] += Fraction(fb, factorial(b))
                fb *= f
    return BivariateSeries(QSeries(row, order) for row in parts)


def exp_log_roundtrip_defect(order: int = 12, y_top: int = 4) -> bool:
    """exp(log Z) = Z exactly, coefficient by coefficient."""
    z = branch_point_series(order, y_top)
    one = BivariateSeries.one(order, y_top)
    again = _exp(_log_one_plus(z - one)) - z + one
    return all(p == QSeries.one(order) if i == 0 else p == QSeries.zero(order)
               for i, p in enumerate(again.parts))


def covers_series(
    genus: int, order: int, connected: bool = True, track_branch_points: bool = False
):
    """F_g(q) = sum_{d >= 1} N_{g,d} q^d for 2g-2 simple branch points.

    Disconnected: N = sum over partitions of f(lambda)^{2g-2}. Connected:
    the same extraction from log Z. With track_branch_points the full
    bivariate series (log Z or Z) is returned instead of one y-slice.
    """
    if genus < 2:
        raise ValueError("genus must be >= 2")
    if order < 1:
        raise ValueError("order must be >= 1")
    b = 2 * genus - 2
    z = branch_point_series(order, b)
    if connected:
        series = _log_one_plus(z - BivariateSeries.one(order, b))
    else:
        series = z
    if track_branch_points:
        return series
    out = series.parts[b].scale(factorial(b))
    out.coeffs[0] = Fraction(0)  # the empty cover is excluded from F_g
    return out


# ---------------------------------------------------------------------------
# Brute-force tuple enumeration in S_d


def _compose(a, b):
    # (a b)(x) = a(b(x))
    return tuple(a[b[i]] for i in range(len(a)))


def _inverse(a):
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


def _transpositions(d: int):
    out = []
    for i in range(d):
        for j in range(i + 1, d):
            t = list(range(d))
            t[i], t[j] = t[j], t[i]
            out.append(tuple(t))
    return out


def _is_transitive(gens, d: int) -> bool:
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i in range(d):
            ri, rj = find(i), find(g[i])
            if ri != rj:
                parent[ri] = rj
    root = find(0)
    return all(find(i) == root for i in range(d))


def brute_force_covers(genus: int, degree: int, connected: bool = True) -> Fraction:
    """Count (a, b, tau_1..tau_{2g-2}) with [a,b] tau_1...tau_{2g-2} = 1, over d!.

    The tau_i are transpositions; connectedness means the tuple generates a
    transitive subgroup. The last transposition is determined by the rest,
    so it is checked rather than enumerated.
    """
    if degree > 5 or genus > 3:
        raise TooLarge("bounded to degree <= 5 and genus <= 3")
    if genus < 2 or degree < 1:
        raise ValueError("need genus >= 2, degree >= 1")
    d = degree
    b = 2 * genus - 2
    transpositions = _transpositions(d)
    tset = set(transpositions)
    if not transpositions:
        return Fraction(0)
    perms = list(permutations(range(d)))
    count = 0

    def prefixes(k: int):
        # all products tau_1 ... tau_k as (product, factors)
        if k == 0:
            yield tuple(range(d)), ()
            return
        for prod, taus in prefixes(k - 1):
            for t in transpositions:
                yield _compose(prod, t), taus + (t,)

    for a in perms:
        a_inv = _inverse(a)
        for bb in perms:
            comm = _compose(_compose(a, bb), _compose(a_inv, _inverse(bb)))
            for prod, taus in prefixes(b - 1):
                # need comm prod tau_b = identity
                last = _inverse(_compose(comm, prod))
                if last not in tset:
                    continue
                if connected and not _is_transitive((a, bb) + taus + (last,), d):
                    continue
                count += 1
    return Fraction(count, factorial(d)) + DEGENERATE_COVER_CORRECTION


# ---------------------------------------------------------------------------
# Quasi-modular decomposition


def quasimodular_basis(weight: int):
    """All (a, b, c) with 2a + 4b + 6c = weight, for E2^a E4^b E6^c."""
    if weight < 2 or weight % 2:
        raise UnsupportedWeight(f"weight {weight} has no even-weight monomial basis")
    out = []
    for c in range(weight // 6 + 1):
        for b in range((weight - 6 * c) // 4 + 1):
            rem = weight - 6 * c - 4 * b
            if rem >= 0 and rem % 2 == 0:
                out.append((rem // 2, b, c))
    return sorted(out)


def quasimodular_decompose(f: QSeries, weight: int) -> dict:
    """Exact coefficients of F in the weight-w monomials of E2, E4, E6.

    Solves the linear system matching every q-coefficient; the system is
    overdetermined and ALL available coefficients must match, otherwise
    NoSolution reports the first mismatching q-power.
    """
    basis = quasimodular_basis(weight)
    n = f.order
    if n < len(basis) + 8:
        raise ValueError(
            f"series order {n} too small; need at least dim(basis) + 8 = {len(basis) + 8}"
        )
    e2 = eisenstein(2, n)
    e4 = eisenstein(4, n)
    e6 = eisenstein(6, n)
    cols = [e2.pow(a) * e4.pow(b) * e6.pow(c) for (a, b, c) in basis]
    rows = [[col[i] for col in cols] for i in range(n + 1)]
    rhs = [f[i] for i in range(n + 1)]
    solution, mismatch = solve_sequential(rows, rhs)
    if solution is None:
        raise NoSolution(mismatch, f"no exact solution; first mismatch at q^{mismatch}")
    return {trip: coef for trip, coef in zip(basis, solution) if coef != 0}
