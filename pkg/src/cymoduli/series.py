"""Truncated power series and log-series arithmetic.

A :class:`TruncSeries` is a polynomial-with-unknown-tail: ``coeffs[m]`` is the
coefficient of ``z^m`` for ``m < trunc_order`` and nothing is asserted at or
beyond ``trunc_order``.  Every operation propagates the weakest input order,
so validity is tracked rather than assumed.

A :class:`LogSeries` is a finite sum ``sum_k block_k(z) * log(z)^k``; these
carry the Frobenius solutions of Picard-Fuchs operators (log powers 0..3 in
weight-3 applications).

All values are immutable; operations are pure and deterministic, so results
are safe to share across threads and are bit-identical to sequential
evaluation.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Sequence

from .scalars import (
    COMPLEX,
    DomainError,
    coerce,
    conj,
    domain_of,
    format_scalar,
    is_zero,
    join_domain,
    one,
    to_complex,
    zero,
)


class TruncationError(ValueError):
    """A series operation was asked for more coefficients than are known."""


class TruncSeries:
    """Truncated univariate power series over an exact or floating domain."""

    __slots__ = ("coeffs", "domain")

    def __init__(self, coeffs: Sequence, domain: str | None = None):
        coeffs = list(coeffs)
        if not coeffs:
            raise TruncationError("truncation order zero")
        if domain is None:
            domain = domain_of(coeffs[0])
            for c in coeffs[1:]:
                domain = join_domain(domain, domain_of(c))
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "coeffs", tuple(coerce(c, domain) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("TruncSeries is immutable")

    # -- basic structure ---------------------------------------------------
    @property
    def trunc_order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, m: int):
        if m < 0:
            raise IndexError("negative power")
        if m >= self.trunc_order:
            raise TruncationError(f"coefficient of z^{m} is beyond trunc_order {self.trunc_order}")
        return self.coeffs[m]

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.trunc_order:
            raise TruncationError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[:order], self.domain)

    @staticmethod
    def constant(c, order: int, domain: str | None = None) -> "TruncSeries":
        dom = domain or domain_of(c)
        z = zero(dom)
        return TruncSeries([coerce(c, dom)] + [z] * (order - 1), dom)

    @staticmethod
    def zero_series(order: int, domain: str) -> "TruncSeries":
        return TruncSeries([zero(domain)] * order, domain)

    @staticmethod
    def identity(order: int, domain: str) -> "TruncSeries":
        # the series "z"
        c = [zero(domain)] * order
        if order < 2:
            raise TruncationError("identity series needs order >= 2")
        c[1] = one(domain)
        return TruncSeries(c, domain)

    def _join(self, other: "TruncSeries") -> tuple[str, int]:
        dom = join_domain(self.domain, other.domain)
        return dom, min(self.trunc_order, other.trunc_order)

    # -- ring operations -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(other, self.trunc_order)
        dom, n = self._join(other)
        return TruncSeries(
            [coerce(self.coeffs[i], dom) + coerce(other.coeffs[i], dom) for i in range(n)], dom
        )

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs], self.domain)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(other, self.trunc_order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        dom, n = self._join(other)
        a = [coerce(c, dom) for c in self.coeffs[:n]]
        b = [coerce(c, dom) for c in other.coeffs[:n]]
        out = [zero(dom) for _ in range(n)]
        for i, ai in enumerate(a):
            if is_zero(ai):
                continue
            for j in range(n - i):
                bj = b[j]
                if not is_zero(bj):
                    out[i + j] = out[i + j] + ai * bj
        return TruncSeries(out, dom)

    def __rmul__(self, other):
        return self * other

    def scale(self, c) -> "TruncSeries":
        dom = join_domain(self.domain, domain_of(c))
        cc = coerce(c, dom)
        return TruncSeries([coerce(a, dom) * cc for a in self.coeffs], dom)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use reciprocal for negative powers")
        out = TruncSeries.constant(one(self.domain), self.trunc_order, self.domain)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by z^k (order grows by k; known window unchanged)."""
        z = zero(self.domain)
        return TruncSeries([z] * k + list(self.coeffs), self.domain)

    # -- derivations ---------------------------------------------------------
    def theta(self) -> "TruncSeries":
        """z d/dz, exact on the known window."""
        return TruncSeries([m * c for m, c in enumerate(self.coeffs)], self.domain)

    def d_dz(self) -> "TruncSeries":
        """d/dz; loses one order of validity."""
        if self.trunc_order < 2:
            raise TruncationError("cannot differentiate an order-1 series")
        return TruncSeries(
            [m * self.coeffs[m] for m in range(1, self.trunc_order)], self.domain
        )

    # -- inverses ------------------------------------------------------------
    def reciprocal(self) -> "TruncSeries":
        """Multiplicative inverse; requires a(0) != 0."""
        a0 = self.coeffs[0]
        if is_zero(a0):
            raise ZeroDivisionError("reciprocal of series with zero constant term")
        dom = self.domain
        n = self.trunc_order
        inv0 = one(dom) / a0 if dom != COMPLEX else 1.0 / a0
        out = [inv0] + [zero(dom)] * (n - 1)
        for m in range(1, n):
            s = zero(dom)
            for j in range(1, m + 1):
                s = s + self.coeffs[j] * out[m - j]
            out[m] = -s * inv0
        return TruncSeries(out, dom)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.reciprocal()
        dom = join_domain(self.domain, domain_of(other))
        inv = one(dom) / coerce(other, dom)
        return self.scale(inv)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner(z)); requires inner(0) = 0."""
        if not is_zero(inner.coeffs[0]):
            raise ValueError("compose requires inner(0) = 0")
        dom, n = self._join(inner)
        out = TruncSeries.zero_series(n, dom)
        # Horner from the top of the known window
        for m in range(min(self.trunc_order, n) - 1, -1, -1):
            out = out * inner + TruncSeries.constant(coerce(self.coeffs[m], dom), n, dom)
        return out

    def reversion(self) -> "TruncSeries":
        """Compositional inverse; requires a(0) = 0, a'(0) != 0.

        Fixed-point iteration g <- (z - (a - a1*z) o g)/a1, exact in exact
        domains; compose(a, reversion(a)) = z + O(z^trunc_order).
        """
        if not is_zero(self.coeffs[0]):
            raise ValueError("reversion requires a(0) = 0")
        if self.trunc_order < 2 or is_zero(self.coeffs[1]):
            raise ValueError("reversion requires a'(0) != 0")
        dom = self.domain
        n = self.trunc_order
        a1 = self.coeffs[1]
        inv_a1 = one(dom) / a1 if dom != COMPLEX else 1.0 / a1
        g = TruncSeries.identity(n, dom).scale(inv_a1)
        tail = TruncSeries(
            [zero(dom), zero(dom)] + [c for c in self.coeffs[2:]], dom
        )
        ident = TruncSeries.identity(n, dom)
        # each pass fixes one more coefficient; n-2 passes suffice
        for _ in range(max(0, n - 2)):
            g = (ident - tail.compose(g)).scale(inv_a1)
        return g

    # -- transcendental ------------------------------------------------------
    def exp(self) -> "TruncSeries":
        """Formal exp; in exact domains requires a(0) = 0 (no transcendental rationals)."""
        dom = self.domain
        if dom != COMPLEX and not is_zero(self.coeffs[0]):
            raise DomainError("exact exp requires zero constant term")
        n = self.trunc_order
        scale0 = one(dom)
        a = self.coeffs
        if dom == COMPLEX and a[0] != 0:
            scale0 = cmath.exp(a[0])
            a = (0j,) + a[1:]
        # e' = a' e  =>  m e_m = sum_{j=1}^{m} j a_j e_{m-j}
        e = [one(dom)] + [zero(dom)] * (n - 1)
        for m in range(1, n):
            s = zero(dom)
            for j in range(1, m + 1):
                if not is_zero(a[j]):
                    s = s + (j * a[j]) * e[m - j]
            e[m] = s / m if dom == COMPLEX else s * _inv_int(m, dom)
        return TruncSeries(e, dom).scale(scale0)

    def log(self) -> "TruncSeries":
        """Formal log; requires a(0) = 1 in exact domains (a(0) != 0 in floating)."""
        dom = self.domain
        a0 = self.coeffs[0]
        if dom != COMPLEX:
            if a0 != one(dom):
                raise DomainError("exact log requires constant term 1")
            base = zero(dom)
            f = self
        else:
            if a0 == 0:
                raise ZeroDivisionError("log of series with zero constant term")
            base = cmath.log(a0)
            f = self.scale(1.0 / a0)
        # log(f)' = f'/f integrated termwise
        df = f.theta()
        quot = df * f.reciprocal()
        n = min(quot.trunc_order, self.trunc_order)
        out = [base] + [
            quot.coeffs[m] * _inv_int(m, dom) if dom != COMPLEX else quot.coeffs[m] / m
            for m in range(1, n)
        ]
        return TruncSeries(out, dom)

    # -- views ---------------------------------------------------------------
    def conjugate(self) -> "TruncSeries":
        return TruncSeries([conj(c) for c in self.coeffs], self.domain)

    def to_complex(self) -> "TruncSeries":
        return TruncSeries([to_complex(c) for c in self.coeffs], COMPLEX)

    def __call__(self, z0: complex) -> complex:
        """Evaluate at a complex point (floating; Horner)."""
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z0 + to_complex(c)
        return acc

    # -- comparisons / repr ----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.coeffs == other.coeffs and self.domain == other.domain

    def __hash__(self):
        return hash((self.coeffs, self.domain))

    def is_zero(self) -> bool:
        return all(is_zero(c) for c in self.coeffs)

    def __repr__(self):
        shown = ", ".join(format_scalar(c) for c in self.coeffs[:6])
        tail = ", ..." if self.trunc_order > 6 else ""
        return f"TruncSeries([{shown}{tail}] + O(z^{self.trunc_order}))"


def _inv_int(m: int, dom: str):
    from .scalars import GAUSSIAN, QQi, RATIONAL

    if dom == RATIONAL:
        return Fraction(1, m)
    if dom == GAUSSIAN:
        return QQi(Fraction(1, m))
    return 1.0 / m


# ---------------------------------------------------------------------------
# operations with named-op dispatch (spec surface)
# ---------------------------------------------------------------------------

def ring_op(a, b, op: str):
    """add | sub | mul on two TruncSeries or two LogSeries."""
    if op not in ("add", "sub", "mul"):
        raise ValueError(f"unknown ring op {op!r}")
    if isinstance(a, LogSeries) or isinstance(b, LogSeries):
        a = as_log_series(a)
        b = as_log_series(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    return a * b


def reciprocal(a: TruncSeries) -> TruncSeries:
    return a.reciprocal()


def compose(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    return outer.compose(inner)


def reversion(a: TruncSeries) -> TruncSeries:
    return a.reversion()


def transcend(a: TruncSeries, fn: str) -> TruncSeries:
    if fn == "exp":
        return a.exp()
    if fn == "log":
        return a.log()
    raise ValueError(f"unknown transcendental {fn!r}")


# ---------------------------------------------------------------------------
# log-series
# ---------------------------------------------------------------------------

MAX_LOG_POWER = 3          # weight-3 applications
MAX_LOG_POWER_INTERNAL = 6  # transient bound inside products


class LogSeries:
    """Finite sum of ``block_k(z) * log(z)^k`` with truncated blocks.

    Blocks beyond the highest nonzero power are not stored.  Products are
    capped at log power 6 internally; callers re-truncate per policy.
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks: Sequence[TruncSeries]):
        blocks = list(blocks)
        if not blocks:
            raise TruncationError("LogSeries needs at least the log^0 block")
        dom = blocks[0].domain
        n = min(b.trunc_order for b in blocks)
        for b in blocks:
            dom = join_domain(dom, b.domain)
        blocks = [TruncSeries([coerce(c, dom) for c in b.coeffs[:n]], dom) for b in blocks]
        while len(blocks) > 1 and blocks[-1].is_zero():
            blocks.pop()
        if len(blocks) - 1 > MAX_LOG_POWER_INTERNAL:
            raise ValueError("log power exceeds the internal bound 6")
        object.__setattr__(self, "blocks", tuple(blocks))

    def __setattr__(self, name, value):
        raise AttributeError("LogSeries is immutable")

    @property
    def max_log_power(self) -> int:
        return len(self.blocks) - 1

    @property
    def trunc_order(self) -> int:
        return self.blocks[0].trunc_order

    @property
    def domain(self) -> str:
        return self.blocks[0].domain

    def block(self, k: int) -> TruncSeries:
        if k <= self.max_log_power:
            return self.blocks[k]
        return TruncSeries.zero_series(self.trunc_order, self.domain)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = as_log_series(other, like=self)
        n = max(self.max_log_power, other.max_log_power)
        return LogSeries([self.block(k) + other.block(k) for k in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return LogSeries([-b for b in self.blocks])

    def __sub__(self, other):
        return self + (-as_log_series(other, like=self))

    def __rsub__(self, other):
        return (-self) + as_log_series(other, like=self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) or not isinstance(
            other, (LogSeries, TruncSeries)
        ):
            return LogSeries([b * other for b in self.blocks])
        other = as_log_series(other, like=self)
        n = self.max_log_power + other.max_log_power
        if n > MAX_LOG_POWER_INTERNAL:
            raise ValueError("combined log power exceeds the internal bound 6")
        order = min(self.trunc_order, other.trunc_order)
        dom = join_domain(self.domain, other.domain)
        out = [TruncSeries.zero_series(order, dom) for _ in range(n + 1)]
        for i, bi in enumerate(self.blocks):
            for j, bj in enumerate(other.blocks):
                out[i + j] = out[i + j] + bi * bj
        return LogSeries(out)

    def __rmul__(self, other):
        return self * other

    def scale(self, c) -> "LogSeries":
        return LogSeries([b.scale(c) for b in self.blocks])

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.reciprocal()
        return LogSeries([b / other for b in self.blocks])

    def theta(self) -> "LogSeries":
        """z d/dz with theta(log z) = 1: theta maps log power k to <= k."""
        n = self.max_log_power
        out = []
        for k in range(n + 1):
            b = self.block(k).theta()
            if k + 1 <= n:
                b = b + self.block(k + 1) * (k + 1)
            out.append(b)
        return LogSeries(out)

    def conjugate(self) -> "LogSeries":
        return LogSeries([b.conjugate() for b in self.blocks])

    def to_complex(self) -> "LogSeries":
        return LogSeries([b.to_complex() for b in self.blocks])

    def truncate(self, order: int) -> "LogSeries":
        return LogSeries([b.truncate(order) for b in self.blocks])

    def cap_log_power(self, p: int) -> "LogSeries":
        """Drop blocks above log power p (caller re-truncation policy)."""
        return LogSeries(list(self.blocks[: p + 1]))

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks)

    def log_free_part(self) -> TruncSeries:
        """The log^0 block, asserting all higher blocks vanish."""
        if any(not b.is_zero() for b in self.blocks[1:]):
            raise ValueError("series has genuine log terms")
        return self.blocks[0]

    def __call__(self, z0: complex, log_z0: complex | None = None) -> complex:
        L = cmath.log(z0) if log_z0 is None else log_z0
        acc = 0j
        for b in reversed(self.blocks):
            acc = acc * L + b(z0)
        return acc

    def __eq__(self, other):
        if not isinstance(other, LogSeries):
            return NotImplemented
        return self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return "LogSeries(" + " + ".join(
            f"[{b!r}]*log^{k}" if k else f"{b!r}" for k, b in enumerate(self.blocks)
        ) + ")"


def as_log_series(x, like: LogSeries | None = None) -> LogSeries:
    if isinstance(x, LogSeries):
        return x
    if isinstance(x, TruncSeries):
        return LogSeries([x])
    if like is not None:
        return LogSeries([TruncSeries.constant(x, like.trunc_order)])
    raise DomainError(f"cannot view {type(x).__name__} as LogSeries")


def log_z(order: int, domain: str) -> LogSeries:
    """The series log(z) itself."""
    return LogSeries(
        [TruncSeries.zero_series(order, domain), TruncSeries.constant(one(domain), order, domain)]
    )


def theta_derive(a: LogSeries) -> LogSeries:
    return a.theta()
