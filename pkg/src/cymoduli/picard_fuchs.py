"""Frobenius period frames of one-parameter Picard-Fuchs operators.

An operator ``L = sum_k p_k(z) theta^k`` (theta = z d/dz) with a maximally
unipotent point at z = 0 (indicial polynomial sigma^4) has a basis of
solutions

    pi_j = sum_{p=0..j} log(z)^p / p! * A_{j-p}(z),        j = 0..3,

with exact rational power-series blocks A_q.  The frame realizes the period
map; the antisymmetric solution-space pairing is recovered from the operator
alone (wronskian normalization) and is constant, i.e. Gauss-Manin flat.

The frame's real structure (used downstream for Hodge positivity) is
coefficientwise conjugation: the operator has rational coefficients, so
z -> conj(f(conj z)) permutes solutions.  On the positive real axis all four
solutions are real-valued and the Hodge pairing degenerates there, so
evaluation points belong in the punctured disk off the positive real axis;
the shipped models evaluate on the negative real axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg_exact import nullspace
from .scalars import RATIONAL
from .series import LogSeries, TruncSeries, TruncationError


class NotMaximallyUnipotent(ValueError):
    """The indicial equation at z = 0 is not sigma^4."""


def log_positive_cut(z: complex) -> complex:
    """log z with the branch cut along the positive real axis (arg in [0, 2pi)).

    The positive real axis is where the coefficientwise real structure
    degenerates, so evaluation never needs to live there; putting the cut
    there keeps the negative real axis (the shipped sampling slice) smooth.
    """
    r = abs(z)
    if r == 0:
        raise ZeroDivisionError("log of zero")
    phase = cmath.phase(z)
    if phase < 0:
        phase += 2 * math.pi
    return complex(math.log(r), phase)


@dataclass(frozen=True)
class PFOperator:
    """L = sum_{k=0}^{4} p_k(z) theta^k with exact rational polynomial p_k."""

    coeffs: tuple  # five tuples of Fractions, p_k coefficient lists in z
    mum_check: bool = True

    @staticmethod
    def from_lists(p_lists: Sequence[Sequence], mum_check: bool = True) -> "PFOperator":
        if len(p_lists) != 5:
            raise ValueError("expected exactly five theta-coefficient polynomials p_0..p_4")
        coeffs = tuple(tuple(Fraction(c) for c in p) for p in p_lists)
        op = PFOperator(coeffs, mum_check)
        if not op.coeffs[4] or op.coeffs[4][0] == 0:
            raise NotMaximallyUnipotent("leading coefficient p_4 vanishes at z = 0")
        if mum_check:
            for k in range(4):
                if op.coeffs[k] and op.coeffs[k][0] != 0:
                    raise NotMaximallyUnipotent(
                        f"indicial equation is not sigma^4: p_{k}(0) != 0"
                    )
        return op

    def degree(self) -> int:
        return max(len(p) for p in self.coeffs)

    def p_series(self, order: int) -> list[TruncSeries]:
        out = []
        for p in self.coeffs:
            padded = list(p) + [Fraction(0)] * (order - len(p))
            out.append(TruncSeries(padded[:order], RATIONAL))
        return out

    def apply(self, f: LogSeries | TruncSeries) -> LogSeries:
        """L f, exact to the common truncation."""
        if isinstance(f, TruncSeries):
            f = LogSeries([f])
        ps = self.p_series(f.trunc_order)
        acc = LogSeries([TruncSeries.zero_series(f.trunc_order, f.domain)])
        power = f
        for k in range(5):
            acc = acc + power * ps[k]
            if k < 4:
                power = power.theta()
        return acc


QUINTIC = PFOperator.from_lists(
    [
        [0, -120],
        [0, -1250],
        [0, -4375],
        [0, -6250],
        [1, -3125],
    ]
)


@dataclass(frozen=True)
class PeriodFrame:
    """Frobenius solution basis with its flat antisymmetric pairing."""

    operator: PFOperator
    solutions: tuple  # four LogSeries, log powers 0..3
    pairing: tuple    # 4x4 antisymmetric, rows of Fractions
    trunc_order: int
    basis_change: tuple | None = None  # optional integral symplectic frame, rows

    @property
    def dim(self) -> int:
        return 4

    def holomorphic_solution(self) -> TruncSeries:
        return self.solutions[0].log_free_part()

    # -- numerical evaluation ------------------------------------------------
    def period_vector(self, z0: complex, derivatives: int = 0) -> np.ndarray:
        """Values of (theta^d pi_j)(z0); shape (derivatives+1, 4).

        Evaluates log z0 with the cut along the positive real axis.
        """
        L = log_positive_cut(complex(z0))
        rows = []
        sols = list(self.solutions)
        for _ in range(derivatives + 1):
            rows.append(np.array([s(z0, log_z0=L) for s in sols], dtype=complex))
            sols = [s.theta() for s in sols]
        return np.stack(rows)

    def pairing_complex(self) -> np.ndarray:
        return np.array([[complex(Fraction(x)) for x in row] for row in self.pairing])

    def q_form(self, u: np.ndarray, v: np.ndarray) -> complex:
        """The flat bilinear pairing Q(u, v) on solution-coefficient vectors."""
        return complex(u @ self.pairing_complex() @ v)


def frobenius_basis(op: PFOperator, order: int) -> PeriodFrame:
    """Solve L pi = 0 at the MUM point through z^(order-1), exactly.

    The ansatz Pi(z, eps) = z^eps sum_m a_m(eps) z^m with a_0 = 1 gives
    a_m in Q[eps]/eps^4 by the recursion

        a_m * I(m + eps) = - sum_{s>=1} sum_k p_{k,s} (m - s + eps)^k a_{m-s},

    I(x) = p_4(0) x^4; the four solutions are the eps-coefficients.
    """
    if order < 4:
        raise TruncationError("period frame needs order >= 4")
    if not op.mum_check:
        raise NotMaximallyUnipotent("frame construction requires a MUM operator")
    eps_order = 4
    one = TruncSeries.constant(Fraction(1), eps_order, RATIONAL)
    a = [one]
    p4_0 = op.coeffs[4][0]
    max_shift = op.degree()
    for m in range(1, order):
        rhs = TruncSeries.zero_series(eps_order, RATIONAL)
        for s in range(1, min(m, max_shift - 1) + 1):
            base = TruncSeries([Fraction(m - s), Fraction(1), 0, 0], RATIONAL)
            power = one
            for k in range(5):
                p = op.coeffs[k]
                if s < len(p) and p[s] != 0:
                    rhs = rhs + (power * a[m - s]).scale(p[s])
                if k < 4:
                    power = power * base
        indicial = (TruncSeries([Fraction(m), Fraction(1), 0, 0], RATIONAL) ** 4).scale(p4_0)
        a.append(-rhs * indicial.reciprocal())
    blocks_a = [
        TruncSeries([a[m][q] for m in range(order)], RATIONAL) for q in range(eps_order)
    ]
    fact = [Fraction(1), Fraction(1), Fraction(2), Fraction(6)]
    solutions = []
    for j in range(4):
        blocks = [blocks_a[j - p] / fact[p] for p in range(j + 1)]
        solutions.append(LogSeries(blocks))
    for s in solutions:
        residual = op.apply(s)
        if not residual.is_zero():
            raise ArithmeticError("Frobenius recursion left a nonzero residual")
    pairing = pairing_from_wronskian(op, solutions)
    return PeriodFrame(op, tuple(solutions), pairing, order)


def pairing_from_wronskian(op: PFOperator, solutions: Sequence[LogSeries]) -> tuple:
    """The constant antisymmetric pairing with Q(Pi, theta Pi) = 0.

    Unique up to scale for self-dual operators; scale fixed by
    Q(pi_0, pi_3) = 1.  Isotropy Q(Pi, Pi) = 0 holds by antisymmetry and
    Q(Pi, theta^2 Pi) = 0 follows by differentiating the imposed identity.
    """
    sols = list(solutions)
    theta_sols = [s.theta() for s in sols]
    pairs = [(a, b) for a in range(4) for b in range(4) if a < b]
    rows = []
    order = sols[0].trunc_order
    # coefficient of z^m log^k in (pi_a theta pi_b - pi_b theta pi_a)
    products = {}
    for a, b in pairs:
        products[(a, b)] = sols[a] * theta_sols[b] - sols[b] * theta_sols[a]
    max_log = max(p.max_log_power for p in products.values())
    for m in range(order):
        for k in range(max_log + 1):
            row = [products[p].block(k).coeffs[m] for p in pairs]
            if any(x != 0 for x in row):
                rows.append(row)
    basis = nullspace(rows)
    if len(basis) == 0:
        raise ArithmeticError("no flat antisymmetric pairing to this truncation (operator not self-dual)")
    if len(basis) > 1:
        raise ArithmeticError("pairing not unique to this truncation; raise the order")
    sol = basis[0]
    sigma = {p: sol[i] for i, p in enumerate(pairs)}
    scale = sigma[(0, 3)]
    if scale == 0:
        raise ArithmeticError("degenerate pairing normalization: Q(pi_0, pi_3) = 0")
    mat = [[Fraction(0)] * 4 for _ in range(4)]
    for (a, b), v in sigma.items():
        mat[a][b] = v / scale
        mat[b][a] = -v / scale
    return tuple(tuple(row) for row in mat)


def mirror_map(frame: PeriodFrame) -> tuple[TruncSeries, TruncSeries]:
    """Flat coordinate exponential q(z) = z exp((pi_1 - pi_0 log z)/pi_0) and its reversion."""
    if frame.trunc_order < 2:
        raise TruncationError("mirror map needs order >= 2")
    pi0 = frame.holomorphic_solution()
    pi1 = frame.solutions[1]
    log_free = (pi1 - LogSeries([TruncSeries.zero_series(frame.trunc_order, RATIONAL), pi0])).log_free_part()
    s = log_free * pi0.reciprocal()
    q = TruncSeries([Fraction(0)] + list(s.exp().coeffs), RATIONAL)
    z_of_q = q.reversion()
    return q, z_of_q


def special_coordinate_derivative(frame: PeriodFrame) -> TruncSeries:
    """theta t where t = pi_1/pi_0 is the flat coordinate; a pure power series."""
    pi0 = frame.holomorphic_solution()
    pi1 = frame.solutions[1]
    log_free = (pi1 - LogSeries([TruncSeries.zero_series(frame.trunc_order, RATIONAL), pi0])).log_free_part()
    s = log_free * pi0.reciprocal()
    return TruncSeries.constant(Fraction(1), frame.trunc_order, RATIONAL) + s.theta()


def local_torelli_rank(frame: PeriodFrame, z0: complex, radius: float | None = None) -> int:
    """Rank of the derivative of the period line [Pi(z)] at z0 (0 or 1)."""
    if radius is not None and abs(z0) > radius:
        raise ValueError(f"evaluation point |z0| = {abs(z0):g} exceeds the evaluation radius {radius:g}")
    vals = frame.period_vector(z0, derivatives=1)
    v, dv = vals[0], vals[1]
    nv = np.linalg.norm(v)
    if nv == 0:
        return 0
    proj = dv - (np.vdot(v, dv) / nv**2) * v
    return int(np.linalg.norm(proj) > 1e-8 * max(1.0, np.linalg.norm(dv)))
