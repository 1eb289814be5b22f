"""Rank-r modules over the 2-d quantum torus as local systems on a foliation.

A small module is a free rank-r module over the circle algebra C(x) with
e2 acting as multiplication by exp(2 pi i x) and e1 acting by

    (e1 f)(x) = E(x) f(x - phi),

where E is an everywhere-invertible r x r matrix of trigonometric
polynomials. Composing the two actions in both orders gives
e1 e2 = exp(-2 pi i phi) e2 e1, which ties the foliation slope phi to the
algebra's cocycle parameter (phi_cocycle((1,0),(0,1)) = -phi/2 in the
skew-symmetric convention).

The matching geometric object is a local system on the torus foliated by
lines of direction (phi, 1): a section f(x, t) that is 1-periodic in x,
constant along leaves, and twisted by E across the t-period,

    f(x, t+1) = E(x) f(x - phi, t).

to_local_system builds the section evaluator from transversal Fourier data;
holonomy recovers E by sampling the frame after one t-period and taking an
FFT (exact once the grid resolves the trig degree); round_trip solves for a
gauge G(x) E(x) G(x - phi)^{-1} between the original and recovered modules
mode-by-mode in Fourier space.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import SkewForm


class SingularMonodromy(Exception):
    """The invertibility certificate for det E(x) failed."""


class NotFlat(Exception):
    """The section evaluator is not constant along leaves."""


class NoGaugeFound(Exception):
    """The Fourier-mode gauge solve did not produce an invertible intertwiner."""


# ---------------------------------------------------------------------------
# Trigonometric polynomials and matrices of them

TrigPoly = dict  # {mode k: complex coefficient}, value sum c_k exp(2 pi i k x)


def trig_eval(p: TrigPoly, x: float) -> complex:
    return sum(c * cmath.exp(2j * math.pi * k * x) for k, c in p.items())


def trig_mul(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    out: TrigPoly = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            out[k1 + k2] = out.get(k1 + k2, 0j) + c1 * c2
    return {k: c for k, c in out.items() if abs(c) > 0}


def trig_shift(p: TrigPoly, phi: float) -> TrigPoly:
    """Precompose with x -> x - phi."""
    return {k: c * cmath.exp(-2j * math.pi * k * phi) for k, c in p.items()}


@dataclass(frozen=True)
class MatrixTrigPoly:
    """r x r matrix whose entries are trigonometric polynomials in x."""

    entries: tuple  # r x r nested tuples of TrigPoly dicts

    def __post_init__(self):
        rows = tuple(
            tuple({int(k): complex(c) for k, c in e.items() if c != 0} for e in row)
            for row in self.entries
        )
        r = len(rows)
        if any(len(row) != r for row in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def identity(cls, r: int) -> "MatrixTrigPoly":
        return cls(tuple(tuple({0: 1.0 + 0j} if i == j else {} for j in range(r)) for i in range(r)))

    @classmethod
    def scalar(cls, r: int, p: TrigPoly) -> "MatrixTrigPoly":
        return cls(tuple(tuple(dict(p) if i == j else {} for j in range(r)) for i in range(r)))

    @property
    def rank(self) -> int:
        return len(self.entries)

    def degree(self) -> int:
        return max((abs(k) for row in self.entries for e in row for k in e), default=0)

    def eval(self, x: float) -> np.ndarray:
        r = self.rank
        out = np.zeros((r, r), dtype=complex)
        for i in range(r):
            for j in range(r):
                out[i, j] = trig_eval(self.entries[i][j], x)
        return out

    def shift(self, phi: float) -> "MatrixTrigPoly":
        return MatrixTrigPoly(
            tuple(tuple(trig_shift(e, phi) for e in row) for row in self.entries)
        )

    def matmul(self, other: "MatrixTrigPoly") -> "MatrixTrigPoly":
        r = self.rank
        rows = []
        for i in range(r):
            row = []
            for j in range(r):
                acc: TrigPoly = {}
                for l in range(r):
                    for k, c in trig_mul(self.entries[i][l], other.entries[l][j]).items():
                        acc[k] = acc.get(k, 0j) + c
                row.append({k: c for k, c in acc.items() if abs(c) > 0})
            rows.append(tuple(row))
        return MatrixTrigPoly(tuple(rows))

    def scale(self, c: complex) -> "MatrixTrigPoly":
        return MatrixTrigPoly(
            tuple(tuple({k: c * v for k, v in e.items()} for e in row) for row in self.entries)
        )

    def det_poly(self) -> TrigPoly:
        """Exact Leibniz expansion of det over permutations (r <= 4 scale)."""
        from itertools import permutations

        r = self.rank
        out: TrigPoly = {}
        for perm in permutations(range(r)):
            sign = 1
            seen = list(perm)
            for i in range(r):  # count inversions for the permutation sign
                for j in range(i + 1, r):
                    if seen[i] > seen[j]:
                        sign = -sign
            term: TrigPoly = {0: complex(sign)}
            for i in range(r):
                term = trig_mul(term, self.entries[i][perm[i]])
            for k, c in term.items():
                out[k] = out.get(k, 0j) + c
        return {k: c for k, c in out.items() if abs(c) > 0}

    def max_coeff_diff(self, other: "MatrixTrigPoly") -> float:
        r = self.rank
        worst = 0.0
        for i in range(r):
            for j in range(r):
                keys = set(self.entries[i][j]) | set(other.entries[i][j])
                for k in keys:
                    worst = max(
                        worst,
                        abs(self.entries[i][j].get(k, 0j) - other.entries[i][j].get(k, 0j)),
                    )
        return worst


def invertibility_margin(e: MatrixTrigPoly, grid: int = 512) -> float:
    """Certified lower bound for min_x |det E(x)|.

    Samples |det| on a uniform grid and subtracts half a step times the
    Lipschitz constant 2 pi sum |k| |d_k| of the determinant trig polynomial.
    """
    d = e.det_poly()
    lip = 2 * math.pi * sum(abs(k) * abs(c) for k, c in d.items())
    vals = [abs(trig_eval(d, i / grid)) for i in range(grid)]
    return min(vals) - lip / (2 * grid)


@dataclass(frozen=True)
class SmallModule:
    """Free rank-r module with e1 = (translate by phi) then E, e2 = exp(2 pi i x)."""

    rank: int
    phi: float
    monodromy: MatrixTrigPoly

    def __post_init__(self):
        if self.rank != self.monodromy.rank:
            raise ValueError("rank must match the monodromy size")

    def certify_invertible(self, grid: int = 512) -> float:
        margin = invertibility_margin(self.monodromy, grid)
        if margin <= 0:
            # one refinement in case the grid was too coarse for the slope
            margin = invertibility_margin(self.monodromy, 8 * grid)
        if margin <= 0:
            raise SingularMonodromy(
                f"could not certify min |det E| > 0 (margin {margin:.3e})"
            )
        return margin


# ---------------------------------------------------------------------------
# Operator-level commutation and the cocycle bridge


@dataclass(frozen=True)
class WeightedTranslation:
    """Operator f(x) -> A(x) f(x - shift); these compose and stay in the class."""

    matrix: MatrixTrigPoly
    shift: float

    def compose(self, other: "WeightedTranslation") -> "WeightedTranslation":
        # self after other: x -> A(x) B(x - a) f(x - a - b)
        return WeightedTranslation(
            self.matrix.matmul(other.matrix.shift(self.shift)), self.shift + other.shift
        )


def e1_operator(m: SmallModule) -> WeightedTranslation:
    return WeightedTranslation(m.monodromy, m.phi)


def e2_operator(m: SmallModule) -> WeightedTranslation:
    return WeightedTranslation(MatrixTrigPoly.scalar(m.rank, {1: 1.0 + 0j}), 0.0)


def commutation_defect(m: SmallModule) -> float:
    """Coefficient defect of e1 e2 = exp(-2 pi i phi) e2 e1 (exact identity)."""
    lhs = e1_operator(m).compose(e2_operator(m))
    rhs = e2_operator(m).compose(e1_operator(m))
    scaled = rhs.matrix.scale(cmath.exp(-2j * math.pi * m.phi))
    return lhs.matrix.max_coeff_diff(scaled)


def cocycle_parameter_for_slope(phi_slope):
    """The algebra-side pairing value phi((1,0),(0,1)) matching slope phi.

    e(1,0) e(0,1) = exp(2 pi i 2 phi_c) e(0,1) e(1,0) in the skew convention,
    so matching exp(-2 pi i phi_slope) forces phi_c = -phi_slope / 2.
    """
    return -phi_slope / 2


def bridge_form(phi_slope: Fraction) -> SkewForm:
    """SkewForm on Z^2 whose commutation phase equals the slope's (rational case)."""
    return SkewForm.from_upper(2, {(0, 1): cocycle_parameter_for_slope(Fraction(phi_slope))})


# ---------------------------------------------------------------------------
# The local system and the two functors

Section = tuple  # r-tuple of TrigPoly dicts: Fourier data on the transversal


def frame_section(r: int, j: int) -> Section:
    return tuple({0: 1.0 + 0j} if i == j else {} for i in range(r))


def _eval_section(s: Section, x: float) -> np.ndarray:
    return np.array([trig_eval(p, x) for p in s], dtype=complex)


class FLocalSystem:
    """Evaluator for sections flat along leaves of dt = phi dx, twisted by E."""

    def __init__(self, rank: int, phi: float, monodromy: MatrixTrigPoly):
        self.rank = rank
        self.phi = phi
        self.monodromy = monodromy

    def evaluate(self, section: Section, x: float, t: float) -> np.ndarray:
        """f(x, t) from transversal data: transport along the leaf, twist per period.

        For t = k + tau (k integer, 0 <= tau < 1):
            f(x, t) = E(x) E(x - phi) ... E(x - (k-1) phi) s(x - k phi - tau phi)
        with inverse factors for k < 0.
        """
        k = math.floor(t)
        tau = t - k
        base = _eval_section(section, x - t * self.phi)
        if k >= 0:
            for j in range(k - 1, -1, -1):
                base = self.monodromy.eval(x - j * self.phi) @ base
        else:
            for j in range(1, -k + 1):
                base = np.linalg.solve(self.monodromy.eval(x + j * self.phi), base)
        return base

    def evaluate_grid(self, section: Section, n: int) -> np.ndarray:
        """Samples f on the fundamental-domain grid (x_i, t_j) = (i/n, j/n)."""
        out = np.zeros((n, n, self.rank), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[i, j] = self.evaluate(section, i / n, j / n)
        return out


def to_local_system(m: SmallModule) -> FLocalSystem:
    m.certify_invertible()
    return FLocalSystem(m.rank, m.phi, m.monodromy)


def spectral_residuals(v: FLocalSystem, section: Section, n: int = 24) -> dict:
    """Exact-evaluator residuals for the two quasi-periodicity laws and flatness."""
    qp_x = 0.0
    qp_t = 0.0
    flat = 0.0
    eps = 1e-3
    for i in range(n):
        x = (i + 0.21) / n
        for j in range(3):
            t = (j + 0.37) / 3
            fx = v.evaluate(section, x, t)
            qp_x = max(qp_x, float(np.max(np.abs(v.evaluate(section, x + 1.0, t) - fx))))
            lhs = v.evaluate(section, x, t + 1.0)
            rhs = v.monodromy.eval(x) @ v.evaluate(section, x - v.phi, t)
            qp_t = max(qp_t, float(np.max(np.abs(lhs - rhs))))
            fd = (
                v.evaluate(section, x + eps * v.phi, t + eps)
                - v.evaluate(section, x - eps * v.phi, t - eps)
            ) / (2 * eps)
            flat = max(flat, float(np.max(np.abs(fd))))
    return {"x_period": qp_x, "t_period": qp_t, "flatness": flat}


def grid_quasi_periodicity_residual(v: FLocalSystem, section: Section, n: int) -> float:
    """Grid probe: f(x, t+1) vs E(x) (linear interpolation of row data at x - phi).

    The interpolation is the only error source, so the residual shrinks at
    second order as the grid is refined.
    """
    xs = np.arange(n) / n
    worst = 0.0
    for j in range(0, n, max(1, n // 8)):
        t = j / n
        row = np.array([v.evaluate(section, x, t) for x in xs])  # (n, r)
        for i in range(0, n, max(1, n // 16)):
            x = xs[i]
            pos = ((x - v.phi) % 1.0) * n
            i0 = int(math.floor(pos)) % n
            w = pos - math.floor(pos)
            interp = (1 - w) * row[i0] + w * row[(i0 + 1) % n]
            lhs = v.evaluate(section, x, t + 1.0)
            rhs = v.monodromy.eval(x) @ interp
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def refinement_order(v: FLocalSystem, section: Section, n0: int = 32, levels: int = 3) -> float:
    """Empirical order of the grid residual under successive grid doubling."""
    res = [grid_quasi_periodicity_residual(v, section, n0 * 2**k) for k in range(levels)]
    rates = [math.log2(res[k] / res[k + 1]) for k in range(levels - 1) if res[k + 1] > 0]
    if not rates:
        raise ValueError("residuals vanished; no order to estimate")
    return sum(rates) / len(rates)


def holonomy(v: FLocalSystem, n_grid: int = 64, flat_tol: float = 1e-6) -> SmallModule:
    """Recover the module whose e1 action the local system's t-period encodes.

    Precondition: leafwise flatness (checked by finite differences; NotFlat).
    The frame columns after one period are f_j(y, 1) = E(y) e_j, so sampling
    them on n_grid points and taking an FFT recovers the monodromy's Fourier
    coefficients exactly once n_grid exceeds twice the trig degree.
    """
    r = v.rank
    eps = 1e-3
    for j in range(r):
        sec = frame_section(r, j)
        for (x, t) in ((0.13, 0.41), (0.67, 0.29), (0.35, 0.73)):
            fd = (
                v.evaluate(sec, x + eps * v.phi, t + eps)
                - v.evaluate(sec, x - eps * v.phi, t - eps)
            ) / (2 * eps)
            if float(np.max(np.abs(fd))) > flat_tol:
                raise NotFlat(
                    f"leafwise derivative {float(np.max(np.abs(fd))):.3e} > {flat_tol}"
                )

    samples = np.zeros((n_grid, r, r), dtype=complex)
    for j in range(r):
        sec = frame_section(r, j)
        for i in range(n_grid):
            samples[i, :, j] = v.evaluate(sec, i / n_grid, 1.0)
    coeffs = np.fft.fft(samples, axis=0) / n_grid
    freqs = np.fft.fftfreq(n_grid, d=1.0 / n_grid).astype(int)
    rows = []
    for a in range(r):
        row = []
        for b in range(r):
            poly = {
                int(freqs[idx]): complex(coeffs[idx, a, b])
                for idx in range(n_grid)
                if abs(coeffs[idx, a, b]) > 1e-12
            }
            row.append(poly)
        rows.append(tuple(row))
    return SmallModule(r, v.phi, MatrixTrigPoly(tuple(rows)))


# ---------------------------------------------------------------------------
# Gauge solving between two modules with the same slope


def solve_gauge(
    e1: MatrixTrigPoly,
    e2: MatrixTrigPoly,
    phi: float,
    mode_cutoff: int | None = None,
    grid: int = 128,
    tol: float = 1e-8,
) -> tuple:
    """Find trig-polynomial G with G(x) E1(x) = E2(x) G(x - phi).

    Unknown Fourier modes G_a, |a| <= cutoff, satisfy for every output mode m

        sum_a G_a (E1)_{m-a} - sum_a (E2)_{m-a} G_a exp(-2 pi i a phi) = 0,

    a homogeneous linear system solved by SVD; the smallest right singular
    vector is the candidate gauge. Returns (G, residual) or raises
    NoGaugeFound when the candidate fails invertibility or the residual test.
    """
    r = e1.rank
    if e2.rank != r:
        raise ValueError("gauge requires equal ranks")
    kmax = max(e1.degree(), e2.degree())
    cutoff = mode_cutoff if mode_cutoff is not None else kmax + 2
    amodes = list(range(-cutoff, cutoff + 1))
    mmodes = list(range(-(cutoff + kmax), cutoff + kmax + 1))
    nuk = len(amodes) * r * r

    def entry(mt: MatrixTrigPoly, k: int, i: int, j: int) -> complex:
        return mt.entries[i][j].get(k, 0j)

    rows = np.zeros((len(mmodes) * r * r, nuk), dtype=complex)
    for mi, m in enumerate(mmodes):
        for i in range(r):
            for j in range(r):
                ri = (mi * r + i) * r + j
                for ai, a in enumerate(amodes):
                    tw = cmath.exp(-2j * math.pi * a * phi)
                    for l in range(r):
                        rows[ri, (ai * r + i) * r + l] += entry(e1, m - a, l, j)
                        rows[ri, (ai * r + l) * r + j] -= entry(e2, m - a, i, l) * tw
    _, svals, vh = np.linalg.svd(rows)
    vec = vh[-1].conj()
    gm = {}
    for ai, a in enumerate(amodes):
        block = vec[ai * r * r : (ai + 1) * r * r].reshape(r, r)
        if np.max(np.abs(block)) > 1e-13:
            gm[a] = block
    rowsg = []
    for i in range(r):
        rowg = []
        for j in range(r):
            rowg.append({a: complex(b[i, j]) for a, b in gm.items() if b[i, j] != 0})
        rowsg.append(tuple(rowg))
    g = MatrixTrigPoly(tuple(rowsg))

    xs = np.arange(grid) / grid
    scale = max(
        float(np.max(np.abs(e1.eval(x)))) for x in xs[:: max(1, grid // 16)]
    )
    residual = 0.0
    mindet = float("inf")
    for x in xs:
        gx = g.eval(x)
        mindet = min(mindet, abs(np.linalg.det(gx)))
        lhs = gx @ e1.eval(x)
        rhs = e2.eval(x) @ g.eval(x - phi)
        residual = max(residual, float(np.max(np.abs(lhs - rhs))) / scale)
    if residual > tol:
        raise NoGaugeFound(f"best candidate residual {residual:.3e} > {tol}")
    if mindet < 1e-8:
        raise NoGaugeFound(f"candidate gauge is not invertible (min |det| {mindet:.3e})")
    return g, residual


@dataclass(frozen=True)
class RoundTripReport:
    gauge: MatrixTrigPoly
    residual: float
    recovered: SmallModule


def round_trip(m: SmallModule, tol: float = 1e-8) -> RoundTripReport:
    """to_local_system then holonomy, with the gauge certificate between the two."""
    v = to_local_system(m)
    degree = m.monodromy.degree()
    recovered = holonomy(v, n_grid=max(64, 2 * degree + 2))
    g, residual = solve_gauge(m.monodromy, recovered.monodromy, m.phi, tol=tol)
    return RoundTripReport(gauge=g, residual=residual, recovered=recovered)


def _format_real(v: float, precision: int) -> str:
    return repr(float(v)) if precision >= 17 else format(float(v), f".{precision}g")


def module_to_json_dict(m: SmallModule, precision: int = 17) -> dict:
    """Schema: {"rank", "phi" (decimal string), "coefficients": [{"k", "matrix"}]}.

    Matrix entries are [re, im] pairs of decimal strings; only nonzero Fourier
    modes are listed.
    """
    modes = sorted({k for row in m.monodromy.entries for e in row for k in e})
    coeffs = []
    for k in modes:
        mat = [
            [
                [
                    _format_real(e.get(k, 0j).real, precision),
                    _format_real(e.get(k, 0j).imag, precision),
                ]
                for e in row
            ]
            for row in m.monodromy.entries
        ]
        coeffs.append({"k": k, "matrix": mat})
    return {"rank": m.rank, "phi": _format_real(m.phi, precision), "coefficients": coeffs}


def module_from_json_dict(data: dict) -> SmallModule:
    rank = int(data["rank"])
    entries = [[dict() for _ in range(rank)] for _ in range(rank)]
    for coef in data["coefficients"]:
        k = int(coef["k"])
        mat = coef["matrix"]
        for i in range(rank):
            for j in range(rank):
                re, im = mat[i][j]
                val = complex(float(re), float(im))
                if val != 0:
                    entries[i][j][k] = val
    mono = MatrixTrigPoly(tuple(tuple(e for e in row) for row in entries))
    raw_phi = str(data["phi"])
    phi = float(Fraction(raw_phi)) if "/" in raw_phi else float(raw_phi)
    return SmallModule(rank=rank, phi=phi, monodromy=mono)
