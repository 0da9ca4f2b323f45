"""Kähler potential, Weil-Petersson metric, Yukawa couplings and curvature.

All one-parameter quantities derive from a :class:`~cymoduli.picard_fuchs.PeriodFrame`:

* ``e^-K = -i Q(Pi^, conj Pi^)`` with ``Pi^ = Pi/pi_0`` the normalized period
  vector (holomorphic-solution trivialization of the dualizing line),
* ``G = d_t d_tbar K`` in the flat coordinate ``t = pi_1/pi_0``,
* ``C_ttt = Q(Pi, theta^3 Pi) / (pi_0^2 (theta t)^3)``, an exact series.

The t-derivative tower ``d_t = (1/theta t) theta`` is computed on exact
series, so only the outermost comparison derivative of a check is ever a
finite difference, and finite differences are always steps in t.

Conjugation is coefficientwise in the Frobenius frame; the physical region
(e^-K > 0, G > 0) therefore excludes the positive real axis, and shipped
models sample the negative real axis where e^-K = (4/3) (arg z)^3 |pi_0|^2
(1 + O(z)).

Everything here is pure and deterministic; samples at distinct points are
independent and parallelizable with bit-identical results.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .picard_fuchs import (
    PeriodFrame,
    log_positive_cut,
    mirror_map,
    special_coordinate_derivative,
)
from .series import LogSeries, TruncSeries


class UnphysicalRegion(ArithmeticError):
    """e^-K or G failed positivity at the requested point."""


@dataclass(frozen=True)
class SpecialGeometrySample:
    """Special geometry data at one moduli point, flat coordinate frame.

    Arrays are shaped for N moduli; the period-frame pipeline fills N = 1,
    the torus fixture fills N = 9 through exact kuranishi data.
    """

    z: complex
    t: complex
    K: float
    expK: float            # e^{+K}
    G: np.ndarray          # hermitian positive (N, N)
    Ginv: np.ndarray
    C: np.ndarray          # totally symmetric (N, N, N)
    lam: complex           # lambda = pi_0(z)
    dK: np.ndarray         # d_{t^i} K
    dG: np.ndarray         # dG[i, j, k] = d_{t^i} G_{j kbar}

    @property
    def n_moduli(self) -> int:
        return self.G.shape[0]

    def g_small(self) -> np.ndarray:
        """The untwisted middle-bundle metric g = e^-K G (Eq. of Wit12a type)."""
        return math.exp(-self.K) * self.G


def yukawa_z_series(frame: PeriodFrame) -> TruncSeries:
    """C_zzz = Q(Pi, theta^3 Pi) as an exact, log-free series."""
    sols = list(frame.solutions)
    theta3 = [s.theta().theta().theta() for s in sols]
    acc = None
    for a in range(4):
        for b in range(4):
            w = frame.pairing[a][b]
            if w == 0:
                continue
            term = (sols[a] * theta3[b]) * w
            acc = term if acc is None else acc + term
    return acc.log_free_part()


class FrameGeometry:
    """Evaluator bundling a period frame with its exact derivative towers."""

    def __init__(self, frame: PeriodFrame, yukawa_normalization=1):
        self.frame = frame
        self.q_of_z, self.z_of_q = mirror_map(frame)
        self.theta_t = special_coordinate_derivative(frame)
        self.yukawa_normalization = Fraction(yukawa_normalization)
        pi0 = frame.holomorphic_solution()
        self.pi0 = pi0
        m_inv = self.theta_t.reciprocal()
        # d_t^a of the normalized period vector, exact LogSeries components
        tower = [[s / pi0 for s in frame.solutions]]
        for _ in range(4):
            tower.append([(s.theta() * m_inv) for s in tower[-1]])
        self.tower = tower
        czzz = yukawa_z_series(frame)
        self.c_zzz = czzz
        m3 = self.theta_t * self.theta_t * self.theta_t
        self.c_ttt_z = czzz * (pi0 * pi0 * m3).reciprocal()

    # -- point data ----------------------------------------------------------
    def tower_at(self, z0: complex, depth: int = 3) -> np.ndarray:
        """Array [a, j] = (d_t^a Pi^_j)(z0)."""
        L = log_positive_cut(complex(z0))
        return np.array(
            [[comp(z0, log_z0=L) for comp in self.tower[a]] for a in range(depth + 1)],
            dtype=complex,
        )

    def s_derivatives(self, z0: complex, depth: int = 2) -> np.ndarray:
        """s[a, b] = d_t^a d_tbar^b of S = -i Q(Pi^, conj Pi^) at z0."""
        tw = self.tower_at(z0, depth)
        sig = self.frame.pairing_complex()
        s = np.empty((depth + 1, depth + 1), dtype=complex)
        for a in range(depth + 1):
            for b in range(depth + 1):
                s[a, b] = -1j * (tw[a] @ sig @ np.conj(tw[b]))
        return s

    def flat_coordinate(self, z0: complex) -> complex:
        vals = self.frame.period_vector(z0)
        return vals[0][1] / vals[0][0]

    def z_at_t(self, t: complex) -> complex:
        """Invert the mirror map numerically: z(e^t) by the exact reversion series."""
        return self.z_of_q(cmath.exp(t))

    # -- the named operations -------------------------------------------------
    def kahler_potential(self, z0: complex) -> tuple[float, float]:
        """(K, e^K); errors if e^-K is not positive at z0."""
        s = self.s_derivatives(z0, depth=0)
        s00 = s[0, 0]
        if abs(s00.imag) > 1e-9 * abs(s00) or s00.real <= 0:
            raise UnphysicalRegion(
                f"e^-K = {s00} is not positive at z0 = {z0}; point is outside the physical region"
            )
        K = -math.log(s00.real)
        return K, math.exp(K)

    def wp_metric(self, z0: complex, fd_step: float = 3e-4) -> tuple[float, float]:
        """(G_ttbar, fd_residual): analytic metric and its centered-FD cross-check.

        The analytic value comes from the exact derivative tower; the cross
        check recomputes d_t d_tbar K as a 5-point Laplacian/4 in t.
        """
        G = self.metric_value(z0)
        if G <= 0:
            raise UnphysicalRegion(f"WP metric {G} not positive at z0 = {z0}")
        t0 = self.flat_coordinate(z0)
        h = fd_step
        if h <= 0 or h > 1e-1:
            raise ValueError("step underflow/overflow in finite-difference cross-check")

        def K_at(t: complex) -> float:
            return self.kahler_potential(self.z_at_t(t))[0]

        lap = (
            K_at(t0 + h) + K_at(t0 - h) + K_at(t0 + 1j * h) + K_at(t0 - 1j * h) - 4 * K_at(t0)
        ) / (h * h)
        G_fd = lap / 4.0
        return G, abs(G_fd - G) / abs(G)

    def metric_value(self, z0: complex) -> float:
        s = self.s_derivatives(z0, depth=1)
        s00, s10, s01, s11 = s[0, 0], s[1, 0], s[0, 1], s[1, 1]
        G = (-s11 / s00 + s10 * s01 / (s00 * s00)).real
        return G

    def metric_derivative(self, z0: complex) -> complex:
        """d_t G_ttbar, analytic."""
        s = self.s_derivatives(z0, depth=2)
        s00, s10, s01, s11 = s[0, 0], s[1, 0], s[0, 1], s[1, 1]
        s20, s21 = s[2, 0], s[2, 1]
        return (
            -s21 / s00
            + s11 * s10 / s00**2
            + (s20 * s01 + s10 * s11) / s00**2
            - 2 * s10 * s01 * s10 / s00**3
        )

    def sample(self, z0: complex) -> SpecialGeometrySample:
        K, expK = self.kahler_potential(z0)
        s = self.s_derivatives(z0, depth=2)
        s00, s10 = s[0, 0], s[1, 0]
        G = self.metric_value(z0)
        if G <= 0:
            raise UnphysicalRegion(f"WP metric {G} not positive at z0 = {z0}")
        dG = self.metric_derivative(z0)
        C = self.c_ttt_z(z0)
        return SpecialGeometrySample(
            z=z0,
            t=self.flat_coordinate(z0),
            K=K,
            expK=expK,
            G=np.array([[G]], dtype=complex),
            Ginv=np.array([[1.0 / G]], dtype=complex),
            C=np.array([[[C]]], dtype=complex),
            lam=self.pi0(z0),
            dK=np.array([-s10 / s00], dtype=complex),
            dG=np.array([[[dG]]], dtype=complex),
        )

    def yukawa(self, q_order: int | None = None) -> tuple[TruncSeries, TruncSeries]:
        """(C_zzz(z), C_ttt(q)), exact; C_ttt carries the declared normalization."""
        order = self.frame.trunc_order if q_order is None else q_order
        if order > self.frame.trunc_order:
            raise ValueError("truncation insufficient for requested q-order")
        c_t = self.c_ttt_z.truncate(order).compose(self.z_of_q.truncate(order))
        return self.c_zzz, c_t.scale(self.yukawa_normalization)

    def curvature_check(self, z0: complex, h: float = 1e-3) -> dict:
        """WP curvature identity R = 2G^2 - e^{2K}|C|^2/G, R by FD of G.

        R := (d_t d_tbar G - |d_t G|^2 / G) with d_t d_tbar G from a 5-point
        Laplacian in t and d_t G centered.  Returns the relative residual at
        the requested h plus a convergence slope measured on the Richardson
        pair (8h, 4h): at h = 1e-3 the residual sits far below tolerance and
        near the double-precision FD floor, so the O(h^2) rate is read off in
        the truncation-dominated regime.
        """
        if not (1e-5 <= h <= 1e-2):
            raise ValueError("curvature step h outside [1e-5, 1e-2]")
        sample = self.sample(z0)
        G = sample.G[0, 0].real
        x = sample.expK**2 * abs(sample.C[0, 0, 0]) ** 2 / G
        rhs = 2 * G * G - x
        t0 = sample.t

        def G_at(t: complex) -> float:
            return self.metric_value(self.z_at_t(t))

        def residual(step: float) -> float:
            lap = (
                G_at(t0 + step)
                + G_at(t0 - step)
                + G_at(t0 + 1j * step)
                + G_at(t0 - 1j * step)
                - 4 * G
            ) / (step * step)
            ddbar_G = lap / 4.0
            dG = (
                (G_at(t0 + step) - G_at(t0 - step)) - 1j * (G_at(t0 + 1j * step) - G_at(t0 - 1j * step))
            ) / (4 * step)
            r_fd = ddbar_G - abs(dG) ** 2 / G
            return abs(r_fd - rhs) / abs(rhs)

        res_h = residual(h)
        pair = (residual(8 * h), residual(4 * h))
        slope = math.log2(pair[0] / pair[1]) if pair[1] > 0 else float("inf")
        return {
            "residual": res_h,
            "richardson_pair": pair,
            "slope": slope,
            "rhs_reference": rhs,
        }


def instanton_numbers(c_ttt: TruncSeries, d_max: int) -> list:
    """Solve C_ttt = n_0 + sum_d n_d d^3 q^d/(1-q^d) for integers n_d, exactly.

    Non-integral output raises (an upstream normalization bug, per contract).
    """
    if d_max >= c_ttt.trunc_order:
        raise ValueError(
            f"C_ttt known through q^{c_ttt.trunc_order - 1}, cannot extract n_{d_max}"
        )
    for c in c_ttt.coeffs:
        if not isinstance(c, Fraction):
            raise TypeError("instanton extraction needs exact rational coefficients")
    n = [c_ttt.coeffs[0]]
    for d in range(1, d_max + 1):
        acc = Fraction(0)
        for dp in range(1, d):
            if d % dp == 0:
                acc += n[dp] * dp**3
        nd = (c_ttt.coeffs[d] - acc) / Fraction(d**3)
        n.append(nd)
    out = []
    for d, nd in enumerate(n):
        if nd.denominator != 1:
            raise ArithmeticError(f"non-integral instanton number n_{d} = {nd}")
        out.append(int(nd))
    return out
