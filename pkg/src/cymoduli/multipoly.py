"""Exact polynomials in (tau_1..tau_N, taubar_1..taubar_N), total-degree truncated.

The few-variable expansions needed by the deformation and anomaly modules are
nested/multivariate truncations (never a general series ring): keys are
exponent tuples of length 2N, values exact scalars (Fraction or QQi).
Conjugation swaps the two exponent groups and conjugates coefficients.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import QQi, conj as conj_scalar, is_zero


class MPoly:
    """Truncated exact polynomial in N holomorphic and N antiholomorphic vars."""

    __slots__ = ("n", "max_degree", "terms")

    def __init__(self, n: int, max_degree: int, terms: dict | None = None):
        self.n = n
        self.max_degree = max_degree
        self.terms = {}
        if terms:
            for k, v in terms.items():
                if sum(k) <= max_degree and not is_zero(v):
                    self.terms[k] = v

    # -- constructors ----------------------------------------------------------
    @staticmethod
    def constant(c, n: int, max_degree: int) -> "MPoly":
        key = (0,) * (2 * n)
        return MPoly(n, max_degree, {key: c})

    @staticmethod
    def variable(i: int, n: int, max_degree: int, bar: bool = False, coeff=1) -> "MPoly":
        key = [0] * (2 * n)
        key[i + (n if bar else 0)] = 1
        return MPoly(n, max_degree, {tuple(key): QQi.of(coeff) if isinstance(coeff, QQi) else Fraction(coeff)})

    def _like(self, terms: dict) -> "MPoly":
        return MPoly(self.n, self.max_degree, terms)

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, MPoly):
            other = MPoly.constant(other, self.n, self.max_degree)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k)
            s = v if s is None else s + v
            if is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MPoly):
            other = MPoly.constant(other, self.n, self.max_degree)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return self._like({k: v * other for k, v in self.terms.items()})
        cap = self.max_degree
        out = {}
        for k1, v1 in self.terms.items():
            d1 = sum(k1)
            for k2, v2 in other.terms.items():
                if d1 + sum(k2) > cap:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                s = out.get(k)
                p = v1 * v2
                s = p if s is None else s + p
                if is_zero(s):
                    out.pop(k, None)
                else:
                    out[k] = s
        return self._like(out)

    __rmul__ = __mul__

    def conj(self) -> "MPoly":
        n = self.n
        out = {}
        for k, v in self.terms.items():
            key = tuple(k[n:]) + tuple(k[:n])
            out[key] = conj_scalar(v)
        return self._like(out)

    def diff(self, i: int, bar: bool = False) -> "MPoly":
        idx = i + (self.n if bar else 0)
        out = {}
        for k, v in self.terms.items():
            e = k[idx]
            if e == 0:
                continue
            key = list(k)
            key[idx] = e - 1
            out[tuple(key)] = v * e
        return self._like(out)

    def constant_term(self):
        return self.terms.get((0,) * (2 * self.n), Fraction(0))

    def log1p(self) -> "MPoly":
        """log(self) for self = 1 + s, exact, truncated at max_degree."""
        one = self.constant_term()
        if one != 1:
            raise ValueError("log1p needs constant term 1")
        s = self - 1
        acc = MPoly.constant(Fraction(0), self.n, self.max_degree)
        power = MPoly.constant(Fraction(1), self.n, self.max_degree)
        for k in range(1, self.max_degree + 1):
            power = power * s
            coeff = Fraction((-1) ** (k + 1), k)
            acc = acc + power * coeff
        return acc

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.terms == other.terms

    def __repr__(self):
        items = sorted(self.terms.items())[:8]
        return f"MPoly({items}{'...' if len(self.terms) > 8 else ''})"
