"""Ext groups between Weyl-algebra modules attached to lines through the origin.

The Weyl algebra A is generated by p, q with [p, q] = hbar. A line
L = {alpha p + beta q = 0} gives the cyclic left module W_L = A / A u with
u = alpha p + beta q. Choosing a complementary generator w = gamma p + delta q
with gamma beta - delta alpha = 1 makes W_L = C[w] with

    w  : multiplication (shift degree up by one),
    u  : -hbar d/dw     (from u w^k = w^k u - k hbar w^{k-1}),

which fixes every matrix below; p and q are recovered as p = beta w - delta u
and q = -alpha w + gamma u.

Ext*(W_L1, W_L2) is the kernel/cokernel of left multiplication by L1's
defining element on W_L2 (the free resolution of W_L1 has length one). On the
degree truncation span(w^0 .. w^N) that operator is represented exactly by a
rectangular matrix into span(w^0 .. w^{N+1}), since it raises degree by at
most one; the cokernel is measured up to the highest degree the operator can
structurally reach, so no truncation artifact enters either dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonTransversal(Exception):
    """Distinct parallel lines: outside the theorem's hypothesis."""


class NotStabilized(Exception):
    """Dimensions at cutoff N and 2N disagree."""


@dataclass(frozen=True)
class WeylLine:
    """The line {alpha p + beta q = 0}, normalized to max(|alpha|, |beta|) = 1."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        scale = max(abs(a), abs(b))
        if scale == 0:
            raise ValueError("(alpha, beta) must be nonzero")
        a, b = a / scale, b / scale
        # fix the overall sign so (a, b) and (-a, -b) name the same line
        if a < 0 or (a == 0 and b < 0):
            a, b = -a, -b
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def complement(self) -> tuple:
        """(gamma, delta) with gamma beta - delta alpha = 1; w = gamma p + delta q."""
        if abs(self.beta) >= abs(self.alpha):
            return (1.0 / self.beta, 0.0)
        return (0.0, -1.0 / self.alpha)

    def same_line_as(self, other: "WeylLine", tol: float = 1e-12) -> bool:
        return abs(self.alpha * other.beta - self.beta * other.alpha) <= tol

    def transformed(self, g) -> "WeylLine":
        """Line of the pulled-back defining element under p -> a p + b q, q -> c p + d q."""
        (a, b), (c, d) = g
        if abs(a * d - b * c - 1.0) > 1e-12:
            raise ValueError("generator change must have determinant one")
        return WeylLine(self.alpha * a + self.beta * c, self.alpha * b + self.beta * d)


@dataclass(frozen=True)
class TruncatedCyclicModule:
    """W_L truncated to degrees 0..N in the cyclic generator w."""

    line: WeylLine
    cutoff: int
    hbar: float
    p_matrix: np.ndarray
    q_matrix: np.ndarray

    def commutator_interior_residual(self) -> float:
        """Max |([P,Q] - hbar I)_{jk}| over the interior block 0..N-1."""
        comm = self.p_matrix @ self.q_matrix - self.q_matrix @ self.p_matrix
        n = self.cutoff
        interior = comm[:n, :n] - self.hbar * np.eye(n)
        return float(np.max(np.abs(interior)))


def _shift_up(n_rows: int, n_cols: int) -> np.ndarray:
    m = np.zeros((n_rows, n_cols))
    for k in range(min(n_cols, n_rows - 1)):
        m[k + 1, k] = 1.0
    return m


def _lower_derivative(n_rows: int, n_cols: int, hbar: float) -> np.ndarray:
    # u w^k = -hbar k w^{k-1}
    m = np.zeros((n_rows, n_cols))
    for k in range(1, n_cols):
        if k - 1 < n_rows:
            m[k - 1, k] = -hbar * k
    return m


def module_of_line(line: WeylLine, cutoff: int, hbar: float) -> TruncatedCyclicModule:
    """Square (N+1) matrices for p and q on span(w^0..w^N); exact on the interior."""
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    n1 = cutoff + 1
    w = _shift_up(n1, n1)
    u = _lower_derivative(n1, n1, hbar)
    gamma, delta = line.complement()
    p = line.beta * w - delta * u
    q = -line.alpha * w + gamma * u
    return TruncatedCyclicModule(line, cutoff, hbar, p, q)


def pairing(l1: WeylLine, l2: WeylLine) -> float:
    """det[[alpha1, beta1], [alpha2, beta2]]; [u1, u2] = pairing * hbar."""
    return l1.alpha * l2.beta - l1.beta * l2.alpha


def defining_operator(l1: WeylLine, l2: WeylLine, cutoff: int, hbar: float) -> np.ndarray:
    """Matrix of u1 = alpha1 p + beta1 q on W_{l2}, degrees 0..N into 0..N+1.

    The matrix is exact in either basis because u1 raises degree by at most
    one. The cyclic basis is chosen adapted to the pair: for transversal
    lines, w = u1 / A (with A the direction determinant) is a valid
    complement to u2 since the normalization gamma beta2 - delta alpha2 = A/A
    = 1 holds, and in it u1 acts as the pure shift A w. Any other complement
    gives the same kernel and cokernel in exact arithmetic, but mixes in a
    lowering term whose k-growing entries manufacture a spurious
    floating-point near-kernel (the truncated shadow of a formal power
    series that decays like 1/k!! and lies outside the polynomial module),
    so the adapted basis is what keeps the numerical rank faithful to the
    algebra. For u1 proportional to u2 the standard complement serves and u1
    acts as a pure lowering operator.
    """
    rows, cols = cutoff + 2, cutoff + 1
    a_coef = pairing(l1, l2)
    if a_coef != 0:
        return a_coef * _shift_up(rows, cols)
    gamma, delta = l2.complement()
    b_coef = -l1.alpha * delta + l1.beta * gamma
    return b_coef * _lower_derivative(rows, cols, hbar)


def standard_basis_dims_exact(l1, l2, cutoff: int, hbar) -> tuple:
    """Cross-oracle: same dimensions from the standard complement basis,
    computed with exact rational arithmetic (requires rational inputs).

    In the basis built from l2's standard complement the operator is
    A shift-up + B (-hbar k) shift-down; its exact rank gives the same
    (ext0, ext1) as the adapted basis, which a float SVD of this matrix
    cannot reliably see.
    """
    from fractions import Fraction

    from .linalg import mat_rank

    a1, b1 = Fraction(l1[0]), Fraction(l1[1])
    a2, b2 = Fraction(l2[0]), Fraction(l2[1])
    h = Fraction(hbar)
    if abs(b2) >= abs(a2):
        gamma, delta = 1 / b2, Fraction(0)
    else:
        gamma, delta = Fraction(0), -1 / a2
    a_coef = a1 * b2 - b1 * a2
    b_coef = -a1 * delta + b1 * gamma
    rows, cols = cutoff + 2, cutoff + 1
    op = [[Fraction(0)] * cols for _ in range(rows)]
    for k in range(cols):
        if k + 1 < rows:
            op[k + 1][k] += a_coef
        if k >= 1:
            op[k - 1][k] += -h * k * b_coef
    reach = [i for i in range(rows) if any(op[i])]
    top = (max(reach) + 1) if reach else 0
    rank = mat_rank([op[i] for i in range(top)]) if top else 0
    return (cols - rank, top - rank)


def _dims_at(l1: WeylLine, l2: WeylLine, cutoff: int, hbar: float) -> tuple:
    op = defining_operator(l1, l2, cutoff, hbar)
    # restrict the cokernel to rows the operator can structurally reach
    reach = np.where(np.any(op != 0, axis=1))[0]
    top = int(reach.max()) + 1 if reach.size else 0
    sub = op[:top, :]
    if sub.size == 0:
        return (op.shape[1], 0)
    svals = np.linalg.svd(sub, compute_uv=False)
    tol = 1e-8 * (svals[0] if svals.size else 1.0)
    rank = int(np.sum(svals > tol))
    ext0 = op.shape[1] - rank
    ext1 = top - rank
    return (ext0, ext1)


@dataclass(frozen=True)
class ExtResult:
    ext0: int
    ext1: int
    stabilized: bool
    cutoff: int


def ext_dims(l1: WeylLine, l2: WeylLine, cutoff: int = 64, hbar: float = 1.0) -> ExtResult:
    """(dim Ext^0, dim Ext^1) with a stabilization check at N and 2N.

    Transversal pairs give (0, 1) (one intersection point); a line against
    itself gives (1, 0), the de Rham cohomology of the line. Parallel
    distinct lines would fall outside the hypothesis, but lines through the
    origin are parallel only when equal, so NonTransversal guards an
    impossible input rather than a reachable case.
    """
    if cutoff < 4:
        raise ValueError("cutoff must be at least 4")
    a_coef = l1.alpha * l2.beta - l1.beta * l2.alpha
    if a_coef == 0 and not l1.same_line_as(l2):
        raise NonTransversal("parallel distinct lines")
    first = _dims_at(l1, l2, cutoff, hbar)
    second = _dims_at(l1, l2, 2 * cutoff, hbar)
    if first != second:
        raise NotStabilized(f"cutoff {cutoff}: {first}, cutoff {2 * cutoff}: {second}")
    return ExtResult(ext0=first[0], ext1=first[1], stabilized=True, cutoff=cutoff)


def de_rham_self_ext() -> tuple:
    """H^*_DR of a line: (1, 0); what self-Ext must reproduce."""
    return (1, 0)
