"""Exact scalar domains for period and deformation computations.

Three scalar domains are used throughout the package:

* exact rationals (``fractions.Fraction``),
* exact Gaussian rationals (:class:`QQi`, a pair of Fractions), and
* complex double precision (Python ``complex``).

All exact arithmetic is performed with the first two; floating evaluation
coerces through :func:`to_complex`.  Mixing an exact domain with the floating
domain inside a single exact operation is an error (:class:`DomainError`),
never a silent coercion.

Serialization conventions: rationals render as ``p/q`` strings, Gaussian
rationals and complex numbers as ``(re,im)`` pairs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union


class DomainError(TypeError):
    """Incompatible scalar domains were mixed in an exact operation."""


class QQi:
    """Gaussian rational: ``re + im*i`` with exact rational parts.

    Immutable and hashable.  Arithmetic stays inside Q(i); division by a
    nonzero Gaussian rational is exact.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    # -- constructors -----------------------------------------------------
    @staticmethod
    def of(value) -> "QQi":
        """Coerce an int/Fraction/QQi to QQi."""
        if isinstance(value, QQi):
            return value
        if isinstance(value, (int, Fraction)):
            return QQi(value, 0)
        raise DomainError(f"cannot coerce {type(value).__name__} to QQi")

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        other = QQi.of(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-QQi.of(other))

    def __rsub__(self, other):
        return QQi.of(other) + (-self)

    def __mul__(self, other):
        other = QQi.of(other)
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QQi.of(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return QQi.of(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("QQi powers must be non-negative integers")
        out = QQi(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    # -- comparisons / hashing ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QQi(other)
        if not isinstance(other, QQi):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_scalar(self)


I_QQI = QQi(0, 1)

Scalar = Union[Fraction, QQi, complex]

#: domain tags
RATIONAL = "rational"
GAUSSIAN = "gaussian"
COMPLEX = "complex"


def domain_of(x) -> str:
    if isinstance(x, (int, Fraction)):
        return RATIONAL
    if isinstance(x, QQi):
        return GAUSSIAN
    if isinstance(x, (float, complex)):
        return COMPLEX
    raise DomainError(f"unsupported scalar type {type(x).__name__}")


_ORDER = {RATIONAL: 0, GAUSSIAN: 1, COMPLEX: 2}


def join_domain(a: str, b: str) -> str:
    """Smallest common domain.  Exact domains never silently join COMPLEX."""
    if a == b:
        return a
    lo, hi = sorted((a, b), key=_ORDER.get)
    if hi == COMPLEX and lo != COMPLEX:
        raise DomainError(f"cannot mix exact scalars ({lo}) with complex doubles")
    return hi


def coerce(x, dom: str):
    """Coerce scalar ``x`` into domain ``dom`` (widening only)."""
    have = domain_of(x)
    if _ORDER[have] > _ORDER[dom]:
        raise DomainError(f"cannot narrow {have} scalar to {dom}")
    if dom == RATIONAL:
        return Fraction(x)
    if dom == GAUSSIAN:
        return QQi.of(x)
    return to_complex(x)


def to_complex(x) -> complex:
    """Floating view of any scalar."""
    if isinstance(x, QQi):
        return complex(x)
    return complex(x)


def conj(x):
    """Domain-preserving complex conjugate."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, QQi):
        return x.conjugate()
    return complex(x).conjugate()


def is_zero(x) -> bool:
    if isinstance(x, QQi):
        return not bool(x)
    return x == 0


def zero(dom: str):
    return {RATIONAL: Fraction(0), GAUSSIAN: QQi(0), COMPLEX: 0j}[dom]


def one(dom: str):
    return {RATIONAL: Fraction(1), GAUSSIAN: QQi(1), COMPLEX: 1 + 0j}[dom]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def format_scalar(x) -> str:
    """Render a scalar per the report conventions (p/q or (re,im))."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, QQi):
        return f"({format_scalar(x.re)},{format_scalar(x.im)})"
    z = complex(x)
    return f"({z.real!r},{z.imag!r})"


def parse_rational(text: str) -> Fraction:
    """Parse a ``p/q`` or integer or decimal string into an exact Fraction."""
    return Fraction(text.strip())
