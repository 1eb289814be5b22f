"""Quantum torus algebra T(L, alpha) with exact rational-phase arithmetic.

Generators e(n), n in Z^d, multiply by e(m) e(n) = alpha(m, n) e(m + n) with
alpha(m, n) = exp(2 pi i phi(m, n)) for a skew rational form phi. Because phi
is skew, alpha(m, n) alpha(n, m) = 1 and alpha is bilinear in each slot, which
is all the algebra laws need.

Coefficients live in a small tower: exact PhaseSum scalars (finite rational
combinations of rational-angle unit phases, closed under + * conj) or plain
complex floats. Products of exact scalars stay exact, so associativity, the
unit law, and the star anti-homomorphism are tested with exact equality.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import SkewForm


class ParameterMismatch(Exception):
    """Operands carry different cocycle parameters."""


class NotAnAutomorphism(Exception):
    """The requested substitution does not preserve the multiplication."""


@dataclass(frozen=True)
class PhaseRational:
    """Unit scalar exp(2 pi i value) with value a rational mod 1."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value) % 1)

    def __mul__(self, other: "PhaseRational") -> "PhaseRational":
        return PhaseRational(self.value + other.value)

    def inverse(self) -> "PhaseRational":
        return PhaseRational(-self.value)

    def conjugate(self) -> "PhaseRational":
        return self.inverse()

    def to_complex(self) -> complex:
        return cmath.exp(2j * cmath.pi * float(self.value))


def _fold(phase: Fraction, mag: Fraction) -> tuple[Fraction, Fraction]:
    # canonical representative: phase in [0, 1/2), half turns folded into the sign
    phase = phase % 1
    if phase >= Fraction(1, 2):
        return phase - Fraction(1, 2), -mag
    return phase, mag


class PhaseSum:
    """Finite rational combination sum_k c_k exp(2 pi i p_k), kept exact."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        out: dict[Fraction, Fraction] = {}
        for p, c in (terms or {}).items():
            p, c = _fold(Fraction(p), Fraction(c))
            if c:
                out[p] = out.get(p, Fraction(0)) + c
                if not out[p]:
                    del out[p]
        self.terms = out

    @classmethod
    def from_rational(cls, c) -> "PhaseSum":
        return cls({Fraction(0): Fraction(c)})

    @classmethod
    def from_phase(cls, phase: PhaseRational, mag=1) -> "PhaseSum":
        return cls({phase.value: Fraction(mag)})

    def __add__(self, other: "PhaseSum") -> "PhaseSum":
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, Fraction(0)) + c
        return PhaseSum(out)

    def __neg__(self) -> "PhaseSum":
        return PhaseSum({p: -c for p, c in self.terms.items()})

    def __sub__(self, other: "PhaseSum") -> "PhaseSum":
        return self + (-other)

    def __mul__(self, other: "PhaseSum") -> "PhaseSum":
        out: dict[Fraction, Fraction] = {}
        for p1, c1 in self.terms.items():
            for p2, c2 in other.terms.items():
                p, c = _fold(p1 + p2, c1 * c2)
                out[p] = out.get(p, Fraction(0)) + c
        return PhaseSum(out)

    def conjugate(self) -> "PhaseSum":
        return PhaseSum({-p: c for p, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def to_complex(self) -> complex:
        return sum(
            (float(c) * cmath.exp(2j * cmath.pi * float(p)) for p, c in self.terms.items()),
            0j,
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, PhaseSum):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == PhaseSum.from_rational(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "PhaseSum(0)"
        parts = [f"{c}*e({p})" for p, c in sorted(self.terms.items())]
        return "PhaseSum(" + " + ".join(parts) + ")"


PHASE_ONE = PhaseSum.from_rational(1)


def as_scalar(x):
    """Coerce numbers into the coefficient tower."""
    if isinstance(x, PhaseSum):
        return x
    if isinstance(x, PhaseRational):
        return PhaseSum.from_phase(x)
    if isinstance(x, (int, Fraction)):
        return PhaseSum.from_rational(x)
    return complex(x)


def scalar_mul(a, b):
    if isinstance(a, PhaseSum) and isinstance(b, PhaseSum):
        return a * b
    return scalar_complex(a) * scalar_complex(b)


def scalar_add(a, b):
    if isinstance(a, PhaseSum) and isinstance(b, PhaseSum):
        return a + b
    return scalar_complex(a) + scalar_complex(b)


def scalar_conj(a):
    if isinstance(a, PhaseSum):
        return a.conjugate()
    return scalar_complex(a).conjugate()


def scalar_complex(a) -> complex:
    return a.to_complex() if isinstance(a, PhaseSum) else complex(a)


def scalar_is_zero(a) -> bool:
    return a.is_zero() if isinstance(a, PhaseSum) else a == 0


def scalar_phase_mul(a, phase: PhaseRational):
    """Multiply a tower scalar by a unit rational phase, exactly when possible."""
    if isinstance(a, PhaseSum):
        return a * PhaseSum.from_phase(phase)
    return scalar_complex(a) * phase.to_complex()


def alpha(phi: SkewForm, m, n) -> PhaseRational:
    """Cocycle alpha(m, n) = exp(2 pi i phi(m, n))."""
    return PhaseRational(phi.pairing(m, n))


@dataclass(frozen=True)
class QTorusElement:
    """Finite formal sum sum_n a_n e(n) over the lattice Z^d."""

    phi: SkewForm
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for n, c in self.terms.items():
            key = tuple(int(x) for x in n)
            if len(key) != self.phi.d:
                raise ValueError("lattice vector has wrong length")
            c = as_scalar(c)
            if not scalar_is_zero(c):
                clean[key] = c
        object.__setattr__(self, "terms", clean)

    @property
    def d(self) -> int:
        return self.phi.d

    def coefficient(self, n):
        return self.terms.get(tuple(int(x) for x in n), PhaseSum())

    def support(self):
        return sorted(self.terms)

    def _check(self, other: "QTorusElement"):
        if self.phi.entries != other.phi.entries:
            raise ParameterMismatch("cocycle parameters differ")

    def __add__(self, other: "QTorusElement") -> "QTorusElement":
        self._check(other)
        out = dict(self.terms)
        for n, c in other.terms.items():
            out[n] = scalar_add(out[n], c) if n in out else c
        return QTorusElement(self.phi, out)

    def __neg__(self) -> "QTorusElement":
        return QTorusElement(
            self.phi,
            {n: (-c if isinstance(c, PhaseSum) else -scalar_complex(c)) for n, c in self.terms.items()},
        )

    def __sub__(self, other: "QTorusElement") -> "QTorusElement":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QTorusElement):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for m, cm in self.terms.items():
            for n, cn in other.terms.items():
                key = tuple(a + b for a, b in zip(m, n))
                c = scalar_phase_mul(scalar_mul(cm, cn), alpha(self.phi, m, n))
                out[key] = scalar_add(out[key], c) if key in out else c
        return QTorusElement(self.phi, out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "QTorusElement":
        c = as_scalar(c)
        return QTorusElement(self.phi, {n: scalar_mul(c, v) for n, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, QTorusElement):
            return NotImplemented
        return self.phi.entries == other.phi.entries and self.terms == other.terms

    def __hash__(self):
        return hash((self.phi.entries, frozenset(self.terms)))

    def max_coeff_diff(self, other: "QTorusElement") -> float:
        """Largest |a_n - b_n| over the union of supports (numeric)."""
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return max(
            (abs(scalar_complex(self.coefficient(n)) - scalar_complex(other.coefficient(n))) for n in keys),
            default=0.0,
        )


def unit(phi: SkewForm) -> QTorusElement:
    return QTorusElement(phi, {(0,) * phi.d: PHASE_ONE})


def generator(phi: SkewForm, n, coeff=1) -> QTorusElement:
    return QTorusElement(phi, {tuple(int(x) for x in n): as_scalar(coeff)})


def multiply(x: QTorusElement, y: QTorusElement) -> QTorusElement:
    return x * y


def star(x: QTorusElement) -> QTorusElement:
    """Involution with e(n)^* = e(-n), extended antilinearly.

    star(c e(n)) = conj(c) e(-n); no cocycle factor appears because
    phi(n, n) = 0 for a skew form.
    """
    return QTorusElement(
        x.phi, {tuple(-k for k in n): scalar_conj(c) for n, c in x.terms.items()}
    )


def sl2z_automorphism(g, x: QTorusElement) -> QTorusElement:
    """e(m) -> e(g m) for integer 2x2 g.

    In the symmetric-generator convention this preserves the product exactly
    when det g = 1 (the skew pairing on Z^2 is det-invariant); anything else
    raises NotAnAutomorphism.
    """
    if x.d != 2:
        raise ValueError("defined for rank-2 lattices")
    (a, b), (c, d) = ((int(g[0][0]), int(g[0][1])), (int(g[1][0]), int(g[1][1])))
    if a * d - b * c != 1:
        raise NotAnAutomorphism(f"det = {a * d - b * c}, need +1")
    return QTorusElement(
        x.phi,
        {(a * m + b * n, c * m + d * n): coef for (m, n), coef in x.terms.items()},
    )


def fourier_mukai_matrix():
    """The rank-2 substitution x -> y, y -> x^{-1} as an integer matrix."""
    return ((0, -1), (1, 0))


def _scalar_int_pow(base, k: int):
    # exact for a single-phase scalar; otherwise numeric
    if isinstance(base, PhaseSum) and len(base.terms) == 1:
        ((p, c),) = base.terms.items()
        return PhaseSum({k * p: c**k})
    z = scalar_complex(base)
    return z**k


@dataclass(frozen=True)
class PointAutomorphism:
    """Diagonal automorphism e(n) -> t(n) e(n) for t in Hom(L, C^*).

    values[i] is t(e_i); t extends multiplicatively, so every product law is
    preserved for any nonzero values. The unitary flag certifies |t(e_i)| = 1,
    which is what compatibility with the involution needs.
    """

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_scalar(v) for v in self.values))
        if any(scalar_is_zero(v) for v in self.values):
            raise ValueError("values must be nonzero")

    @property
    def unitary(self) -> bool:
        return all(abs(abs(scalar_complex(v)) - 1.0) < 1e-12 for v in self.values)

    def value_at(self, n):
        out = PHASE_ONE
        for v, k in zip(self.values, n):
            out = scalar_mul(out, _scalar_int_pow(v, int(k)))
        return out

    def apply(self, x: QTorusElement) -> QTorusElement:
        if len(self.values) != x.d:
            raise ParameterMismatch("rank mismatch")
        return QTorusElement(
            x.phi, {n: scalar_mul(self.value_at(n), c) for n, c in x.terms.items()}
        )


def apply_point_automorphism(t: PointAutomorphism, x: QTorusElement) -> QTorusElement:
    return t.apply(x)


def smooth_truncate(x: QTorusElement, radius: int) -> QTorusElement:
    """Restrict to |n|_inf <= radius (projection to a finite window)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return QTorusElement(
        x.phi, {n: c for n, c in x.terms.items() if max(map(abs, n), default=0) <= radius}
    )


def sup_norm_bound(x: QTorusElement) -> float:
    """sum |a_n|, an upper bound for the sup norm in any *-representation."""
    return sum(abs(scalar_complex(c)) for c in x.terms.values())


def _format_real(v: float, precision: int) -> str:
    return repr(float(v)) if precision >= 17 else format(float(v), f".{precision}g")


def element_to_json_dict(x: QTorusElement, precision: int = 17) -> dict:
    """Schema: {"d", "phi" (rational strings), "terms" (decimal re/im strings)}."""
    return {
        "d": x.d,
        "phi": [[str(v) for v in row] for row in x.phi.entries],
        "terms": [
            {
                "n": list(n),
                "re": _format_real(scalar_complex(c).real, precision),
                "im": _format_real(scalar_complex(c).imag, precision),
            }
            for n, c in sorted(x.terms.items())
        ],
    }


def element_from_json_dict(data: dict) -> QTorusElement:
    phi = SkewForm(tuple(tuple(Fraction(v) for v in row) for row in data["phi"]))
    terms = {
        tuple(int(k) for k in t["n"]): complex(float(t["re"]), float(t["im"]))
        for t in data["terms"]
    }
    return QTorusElement(phi, terms)
