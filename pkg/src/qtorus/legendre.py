"""Discrete Legendre duality and Monge-Ampere residuals on regular grids.

The transform is the exhaustive discrete conjugate H*(y) = max_x (<x, y> - H(x))
over a grid restriction of a convex function. Restricting the max to grid
points costs at most (n/8) Lmax h^2 per point, with Lmax the largest Hessian
eigenvalue: the true maximizer is at most h/2 away per coordinate and the
function bends at most Lmax/2 per unit square distance. The double transform
therefore returns the input up to twice that bound, and the gradient maps of
H and H* invert each other; both facts are checked numerically, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonConvexInput(Exception):
    """Finite-difference Hessian fails positive-semidefiniteness."""


def regular_axis(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 3:
        raise ValueError("need at least 3 points per axis")
    return np.linspace(lo, hi, count)


@dataclass(frozen=True)
class ConvexGridFunction:
    """Values of a scalar function on an axis-aligned regular grid."""

    axes: tuple
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != tuple(len(a) for a in axes):
            raise ValueError("values shape does not match axes")
        for a in axes:
            steps = np.diff(a)
            if len(steps) < 2 or steps.min() <= 0:
                raise ValueError("axes must be strictly increasing with >= 3 points")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise ValueError("axes must be uniformly spaced")

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def spacings(self) -> tuple:
        return tuple(float(a[1] - a[0]) for a in self.axes)

    def points(self) -> np.ndarray:
        """All grid points, shape (#points, n)."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def hessians(self) -> np.ndarray:
        """Central-difference Hessians at interior points, shape (..., n, n)."""
        n = self.dimension
        h = self.spacings
        inner = tuple(slice(1, -1) for _ in range(n))
        shape = self.values[inner].shape
        out = np.empty(shape + (n, n))
        for i in range(n):
            for j in range(n):
                if i == j:
                    plus = tuple(
                        slice(2, None) if k == i else slice(1, -1) for k in range(n)
                    )
                    minus = tuple(
                        slice(0, -2) if k == i else slice(1, -1) for k in range(n)
                    )
                    out[..., i, i] = (
                        self.values[plus] - 2 * self.values[inner] + self.values[minus]
                    ) / h[i] ** 2
                elif i < j:

                    def shifted(si, sj):
                        idx = tuple(
                            slice(1 + si, len(self.axes[k]) - 1 + si)
                            if k == i
                            else slice(1 + sj, len(self.axes[k]) - 1 + sj)
                            if k == j
                            else slice(1, -1)
                            for k in range(n)
                        )
                        return self.values[idx]

                    mixed = (
                        shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)
                    ) / (4 * h[i] * h[j])
                    out[..., i, j] = mixed
                    out[..., j, i] = mixed
        return out

    def convexity_defect(self) -> float:
        """Most negative Hessian eigenvalue over the interior (0 when none)."""
        hess = self.hessians().reshape(-1, self.dimension, self.dimension)
        eigs = np.linalg.eigvalsh(hess)
        return max(0.0, float(-eigs.min()))

    def max_curvature(self) -> float:
        hess = self.hessians().reshape(-1, self.dimension, self.dimension)
        return float(np.linalg.eigvalsh(hess).max())

    def interior_slice(self, depth: int = 1) -> tuple:
        return tuple(slice(depth, -depth) for _ in range(self.dimension))


def from_callable(fn, axes) -> ConvexGridFunction:
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    vals = np.array([fn(p) for p in pts]).reshape(mesh[0].shape)
    return ConvexGridFunction(tuple(axes), vals)


CONVEXITY_TOLERANCE = 1e-8
# Conjugates of grid functions are piecewise linear: their mixed finite
# differences wobble by O(curvature) times the squared grid-ratio, so the
# PSD check needs an allowance proportional to the curvature scale.
CONVEXITY_RELATIVE = 5e-3


def convexity_allowance(fun: ConvexGridFunction) -> float:
    return CONVEXITY_TOLERANCE + CONVEXITY_RELATIVE * max(1.0, fun.max_curvature())


def discretization_bound(h_max: float, curvature: float, dimension: int) -> float:
    """(n/8) Lmax h^2: worst-case loss from snapping the maximizer to the grid."""
    return dimension / 8.0 * curvature * h_max * h_max


def legendre_transform(
    fun: ConvexGridFunction, dual_axes, assume_convex: bool = False
) -> ConvexGridFunction:
    """H*(y) = max over grid x of (<x, y> - H(x)), evaluated on the dual grid.

    assume_convex skips the finite-difference PSD gate. It exists for the
    second leg of a double transform: a discrete conjugate is a max of affine
    functions, convex by construction, but its piecewise-linear kinks make
    the sampled Hessian test fail spuriously at any fixed tolerance.
    """
    if not assume_convex:
        defect = fun.convexity_defect()
        allowance = convexity_allowance(fun)
        if defect > allowance:
            raise NonConvexInput(
                f"Hessian eigenvalue defect {defect:.3e} exceeds allowance {allowance:.3e}"
            )
    pts = fun.points()
    vals = fun.values.ravel()
    dual_axes = tuple(np.asarray(a, dtype=float) for a in dual_axes)
    mesh = np.meshgrid(*dual_axes, indexing="ij")
    duals = np.stack([m.ravel() for m in mesh], axis=-1)
    out = np.empty(duals.shape[0])
    chunk = 2048
    for start in range(0, duals.shape[0], chunk):
        block = duals[start : start + chunk]
        out[start : start + chunk] = (block @ pts.T - vals).max(axis=1)
    return ConvexGridFunction(dual_axes, out.reshape(mesh[0].shape))


def gradient_box(fun: ConvexGridFunction, margin: float = 0.05):
    """Per-axis bounds of the central-difference gradient, padded by margin."""
    n = fun.dimension
    h = fun.spacings
    out = []
    for i in range(n):
        plus = tuple(slice(2, None) if k == i else slice(1, -1) for k in range(n))
        minus = tuple(slice(0, -2) if k == i else slice(1, -1) for k in range(n))
        g = (fun.values[plus] - fun.values[minus]) / (2 * h[i])
        lo, hi = float(g.min()), float(g.max())
        pad = margin * max(hi - lo, 1.0)
        out.append((lo - pad, hi + pad))
    return out


def affine_normalize(fun: ConvexGridFunction) -> ConvexGridFunction:
    """Subtract value and gradient at the grid point nearest the origin."""
    idx = tuple(int(np.argmin(np.abs(a))) for a in fun.axes)
    n = fun.dimension
    grad = []
    for i in range(n):
        if not 0 < idx[i] < len(fun.axes[i]) - 1:
            raise ValueError("origin-adjacent point must be interior for normalization")
        up = tuple(idx[k] + (1 if k == i else 0) for k in range(n))
        dn = tuple(idx[k] - (1 if k == i else 0) for k in range(n))
        grad.append((fun.values[up] - fun.values[dn]) / (2 * fun.spacings[i]))
    base = fun.values[idx]
    x0 = np.array([fun.axes[k][idx[k]] for k in range(n)])
    mesh = np.meshgrid(*fun.axes, indexing="ij")
    plane = base + sum(grad[k] * (mesh[k] - x0[k]) for k in range(n))
    return ConvexGridFunction(fun.axes, fun.values - plane)


@dataclass(frozen=True)
class RoundTripReport:
    max_error: float
    bound: float
    within: bool


def double_transform_error(
    fun: ConvexGridFunction, dual_counts=None, margin: float = 0.05
) -> RoundTripReport:
    """Max |H** - H| on the interior, against 2x the snapping bound.

    The dual grid covers the gradient range of H; the comparison normalizes
    both sides by their affine part at the origin, since the transform pair
    only sees H through its gradient.
    """
    n = fun.dimension
    counts = dual_counts or tuple(len(a) for a in fun.axes)
    box = gradient_box(fun, margin)
    dual_axes = [regular_axis(lo, hi, c) for (lo, hi), c in zip(box, counts)]
    star = legendre_transform(fun, dual_axes)
    back = legendre_transform(star, fun.axes, assume_convex=True)
    inner = fun.interior_slice()
    diff = affine_normalize(back).values[inner] - affine_normalize(fun).values[inner]
    err = float(np.abs(diff).max())
    curv = max(fun.max_curvature(), star.max_curvature())
    h_max = max(max(fun.spacings), max(star.spacings))
    bound = 2.0 * discretization_bound(h_max, curv, n)
    return RoundTripReport(err, bound, err <= bound)


def monge_ampere_residual(fun: ConvexGridFunction, constant: float) -> float:
    """max over interior points of |det(finite-difference Hessian) - constant|."""
    hess = fun.hessians().reshape(-1, fun.dimension, fun.dimension)
    dets = np.linalg.det(hess)
    return float(np.abs(dets - constant).max())


@dataclass(frozen=True)
class DualityReport:
    det_residual: float
    inverse_mismatch: float
    points_compared: int


def duality_volume_check(
    fun: ConvexGridFunction, constant: float, dual_counts=None
) -> DualityReport:
    """Pushforward density constancy plus Hess(H*) ~ (Hess H)^{-1} pairing.

    Each interior primal point x is sent through the gradient map to
    y = grad H(x); the Hessian of H* at the dual grid point nearest y is
    compared against the inverse primal Hessian at x.
    """
    n = fun.dimension
    det_res = monge_ampere_residual(fun, constant)
    counts = dual_counts or tuple(len(a) for a in fun.axes)
    box = gradient_box(fun)
    dual_axes = [regular_axis(lo, hi, c) for (lo, hi), c in zip(box, counts)]
    star = legendre_transform(fun, dual_axes)
    star_hess = star.hessians()

    h = fun.spacings
    grads = []
    for i in range(n):
        plus = tuple(slice(2, None) if k == i else slice(1, -1) for k in range(n))
        minus = tuple(slice(0, -2) if k == i else slice(1, -1) for k in range(n))
        grads.append((fun.values[plus] - fun.values[minus]) / (2 * h[i]))
    grad_pts = np.stack([g.ravel() for g in grads], axis=-1)
    primal_hess = fun.hessians().reshape(-1, n, n)

    mismatch = 0.0
    compared = 0
    for g, hp in zip(grad_pts, primal_hess):
        idx = []
        interior = True
        for i in range(n):
            j = int(np.argmin(np.abs(dual_axes[i] - g[i])))
            if not 0 < j < len(dual_axes[i]) - 1:
                interior = False
                break
            idx.append(j - 1)  # hessians() indexes the interior only
        if not interior:
            continue
        hs = star_hess[tuple(idx)]
        mismatch = max(mismatch, float(np.abs(hs - np.linalg.inv(hp)).max()))
        compared += 1
    return DualityReport(det_res, mismatch, compared)


@dataclass(frozen=True)
class RefinementReport:
    errors: tuple
    bounds: tuple
    within_at_each: bool
    order: float


def refinement_study(fun_factory, counts=(17, 33, 65)) -> RefinementReport:
    """Double-transform error across grid halvings against the h^2 envelope.

    The error at primal grid points is a hull-reconstruction error: it can hit
    exact zero when supporting slopes align with the dual grid, so the
    pointwise sequence need not decrease monotonically. What must hold is the
    per-level bound, which scales as h^2. The least-squares slope of the
    nonzero errors is reported as the empirical order (inf when the round
    trip is exact at every level).
    """
    errors = []
    bounds = []
    for c in counts:
        rep = double_transform_error(fun_factory(c))
        errors.append(rep.max_error)
        bounds.append(rep.bound)
    within = all(e <= b for e, b in zip(errors, bounds))
    pts = [
        (i, np.log2(e)) for i, e in enumerate(errors) if e > 1e-14 * max(bounds)
    ]
    if len(pts) < 2:
        order = float("inf")
    else:
        xs = np.array([p[0] for p in pts], dtype=float)
        ys = np.array([p[1] for p in pts])
        slope = np.polyfit(xs, ys, 1)[0]
        order = float(-slope)
    return RefinementReport(tuple(errors), tuple(bounds), within, order)
