"""2x2 unimodular matrices and their Möbius action.

Integer (and rational) matrices stay exact through products; floats are only
used where an analytic quantity is evaluated.  The point at infinity is the
singleton :data:`INF` rather than an IEEE infinity, so projective formulas
are total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number

from .errors import InfeasibleParameters, PoleError, ValidationError

DET_TOL = 1e-12


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix ``[[a, b], [c, d]]`` with determinant one."""

    a: Number
    b: Number
    c: Number
    d: Number

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if self.exact:
            if det != 1:
                raise ValidationError(f"determinant {det} != 1 for {self.rows()}")
        elif not abs(det - 1) <= DET_TOL * max(1.0, abs(self.a * self.d)):
            raise ValidationError(f"determinant {det!r} not within {DET_TOL} of 1")

    @classmethod
    def from_rows(cls, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def _trusted(cls, a, b, c, d) -> "Mat2":
        # products and inverses of unimodular matrices skip the det check;
        # float round-off would otherwise trip it on long words
        m = object.__new__(cls)
        object.__setattr__(m, "a", a)
        object.__setattr__(m, "b", b)
        object.__setattr__(m, "c", c)
        object.__setattr__(m, "d", d)
        return m

    @property
    def exact(self) -> bool:
        return all(_is_exact(x) for x in (self.a, self.b, self.c, self.d))

    @property
    def integral(self) -> bool:
        return all(isinstance(x, int) for x in (self.a, self.b, self.c, self.d))

    def rows(self) -> list[list]:
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2._trusted(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2._trusted(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Mat2":
        return Mat2._trusted(self.d, -self.b, -self.c, self.a)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d

    def norm(self) -> float:
        """Euclidean (Frobenius) norm."""
        return math.sqrt(float(self.norm_squared()))

    def norm_squared(self):
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def as_float(self) -> tuple[float, float, float, float]:
        return float(self.a), float(self.b), float(self.c), float(self.d)

    def mod(self, n: int) -> tuple[int, int, int, int]:
        if not self.integral:
            raise InfeasibleParameters("reduction mod n needs an integral matrix")
        return self.a % n, self.b % n, self.c % n, self.d % n


@dataclass(frozen=True)
class Disk:
    center: Number
    radius: Number

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError(f"disk radius must be positive, got {self.radius!r}")
        if not math.isfinite(float(self.center)):
            raise ValidationError("disk center must be finite")

    @property
    def interval(self) -> "RInterval":
        return RInterval(self.center - self.radius, self.center + self.radius)

    def contains(self, z, closed: bool = False) -> bool:
        dist = abs(complex(z) - float(self.center))
        r = float(self.radius)
        return dist <= r if closed else dist < r


@dataclass(frozen=True)
class RInterval:
    lo: Number
    hi: Number

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValidationError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo

    def contains(self, x, closed: bool = True) -> bool:
        return self.lo <= x <= self.hi if closed else self.lo < x < self.hi

    def contains_interval(self, other: "RInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def disjoint(self, other: "RInterval") -> bool:
        return self.hi <= other.lo or other.hi <= self.lo


def _divide(num, den):
    if _is_exact(num) and _is_exact(den):
        return Fraction(num, den) if den != 1 else num
    return num / den


def mobius_apply(m: Mat2, z):
    """Return ``(a z + b) / (c z + d)`` on the extended plane.

    Exact inputs (ints, Fractions) give exact outputs.
    """
    if z is INF:
        return INF if m.c == 0 else _divide(m.a, m.c)
    den = m.c * z + m.d
    if den == 0:
        return INF
    return _divide(m.a * z + m.b, den)


def mobius_derivative(m: Mat2, z):
    """Return ``1 / (c z + d)^2``; raises :class:`PoleError` at the pole."""
    den = m.c * z + m.d
    if den == 0:
        raise PoleError(f"derivative requested at the pole z={z!r}")
    return _divide(1, den * den)


def pole(m: Mat2):
    """The preimage of infinity, ``-d/c`` (or INF for affine maps)."""
    return INF if m.c == 0 else _divide(-m.d, m.c)


def isometric_circle(m: Mat2) -> Disk:
    """The circle ``|c z + d| = 1``, as a disk.

    ``m`` maps its exterior onto the interior of ``isometric_circle(m⁻¹)``.
    """
    if m.c == 0:
        raise InfeasibleParameters("affine matrix (c = 0) has no isometric circle")
    return Disk(_divide(-m.d, m.c), _divide(1, abs(m.c)))


def translation_length(m: Mat2) -> float:
    """Hyperbolic translation length ``2 arccosh(|tr|/2)``."""
    tr = abs(m.trace)
    if tr <= 2:
        raise InfeasibleParameters(f"|trace| = {tr} <= 2: not hyperbolic")
    return 2.0 * math.acosh(float(tr) / 2.0)


def apply_complex(m: Mat2, z: complex) -> complex:
    """Floating-point action, for analytic evaluation sites."""
    a, b, c, d = m.as_float()
    return (a * z + b) / (c * z + d)
