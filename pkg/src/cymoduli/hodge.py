"""Hodge frames, the Weil operator, and the extended period domain.

A Hodge frame at a moduli point packages bases of H^{3,0}, H^{2,1}, H^{1,2},
H^{0,3} inside H^3 (x) C, the Weil operator J (eigenvalue i^{p-q} on H^{p,q})
and the indefinite metric of signature (2, 2 h^{2,1}) built from the pairing
with alternating-type weights.

The extended period domain is handled abstractly: points are oriented
2-planes E in a real symplectic vector space with Q(gamma, mu) > 0 for an
oriented basis; the correspondence with lines [Omega_E = mu + i gamma] on the
isotropic quadric, weight-two filtrations via exact symplectic completion,
contact one-forms on the projective charts, rational-plane approximation and
Siegel period matrices of the induced abelian tori are all implemented here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import subspace_angles

from .geometry import FrameGeometry
from .linalg_exact import mat_vec, nullspace, rank
from .picard_fuchs import log_positive_cut
from .scalars import QQi, is_zero


# ---------------------------------------------------------------------------
# symplectic spaces and Hodge frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymplecticSpace:
    """H^3(M, Z)/Tor with its intersection form (integer antisymmetric)."""

    omega: tuple  # rows of ints
    basis_labels: tuple = ()

    def __post_init__(self):
        n = len(self.omega)
        if n % 2:
            raise ValueError("symplectic space must be even-dimensional")
        for i in range(n):
            for j in range(n):
                if self.omega[i][j] != -self.omega[j][i]:
                    raise ValueError("intersection form not antisymmetric")

    @property
    def dim(self) -> int:
        return len(self.omega)

    def pairing(self, u, v):
        return sum(u[i] * self.omega[i][j] * v[j] for i in range(self.dim) for j in range(self.dim))

    def matrix(self) -> np.ndarray:
        return np.array(self.omega, dtype=float)


def standard_symplectic(n: int) -> SymplecticSpace:
    """<gamma_i, mu_i> = 1 basis order (gamma_0..gamma_n-1, mu_0..mu_n-1)."""
    omega = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        omega[i][n + i] = 1
        omega[n + i][i] = -1
    return SymplecticSpace(tuple(tuple(r) for r in omega))


@dataclass(frozen=True)
class HodgeFrame:
    """Bases of the Hodge pieces in H^3 (x) C at one moduli point."""

    h30: np.ndarray  # columns: basis of H^{3,0}
    h21: np.ndarray
    h12: np.ndarray
    h03: np.ndarray
    J: np.ndarray        # Weil operator, real (2n+2) x (2n+2)
    Gmetric: np.ndarray  # real symmetric, signature (2, 2n)
    sigma: np.ndarray    # the pairing used

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    def basis_matrix(self) -> np.ndarray:
        return np.hstack([self.h30, self.h21, self.h12, self.h03])

    def signature(self, tol: float = 1e-8) -> tuple[int, int]:
        ev = np.linalg.eigvalsh(self.Gmetric)
        return int((ev > tol).sum()), int((ev < -tol).sum())


def frame_from_periods(geom: FrameGeometry, z0: complex, tol: float = 1e-10) -> HodgeFrame:
    """Hodge frame from period data: h30 = Pi^, h21 = covariant derivative.

    The covariant section E = (d_t + d_t K) Pi^ is Q-orthogonal to Pi^ and
    conj(Pi^) exactly, so no Gram-Schmidt is needed; conjugates fill the rest.
    """
    tw = geom.tower_at(z0, depth=1)
    s = geom.s_derivatives(z0, depth=1)
    dK = -s[1, 0] / s[0, 0]
    pi_hat = tw[0]
    e = tw[1] + dK * tw[0]
    b = np.stack([pi_hat, e, np.conj(e), np.conj(pi_hat)], axis=1)
    if np.linalg.matrix_rank(b, tol=tol * max(1.0, float(np.abs(b).max()))) < 4:
        raise ArithmeticError("rank deficiency: Hodge pieces do not span at this point")
    weil = b @ np.diag([-1j, 1j, -1j, 1j]) @ np.linalg.inv(b)
    if np.abs(weil.imag).max() > 1e-8 * max(1.0, np.abs(weil.real).max()):
        raise ArithmeticError("Weil operator not real: conjugation structure broken")
    sigma = geom.frame.pairing_complex()
    proj = _hodge_projectors(b)
    g = _ho4_metric(sigma, proj)
    frame = HodgeFrame(
        h30=b[:, :1],
        h21=b[:, 1:2],
        h12=b[:, 2:3],
        h03=b[:, 3:4],
        J=weil.real,
        Gmetric=g,
        sigma=sigma,
    )
    _check_frame(frame, tol)
    return frame


def _hodge_projectors(b: np.ndarray) -> list:
    """Projectors onto the four pieces in the ambient coordinates."""
    n = b.shape[1]
    binv = np.linalg.inv(b)
    out = []
    blocks = [(0, 1), (1, n // 2), (n // 2, n - 1), (n - 1, n)]
    for lo, hi in blocks:
        sel = np.zeros((n, n))
        for k in range(lo, hi):
            sel[k, k] = 1.0
        out.append(b @ sel @ binv)
    return out


def _ho4_metric(sigma: np.ndarray, projectors: list) -> np.ndarray:
    """G(u, v) = -i Q(P30 u, conj P30 v) - i Q(P21 ...) + i Q(P12 ...) + i Q(P03 ...)."""
    n = sigma.shape[0]
    weights = [-1j, -1j, 1j, 1j]
    g = np.zeros((n, n), dtype=complex)
    for w, p in zip(weights, projectors):
        g += w * (p.T @ sigma @ np.conj(p))
    if np.abs(g.imag).max() > 1e-8 * max(1.0, np.abs(g.real).max()):
        raise ArithmeticError("indefinite metric failed to be real symmetric")
    return (g.real + g.real.T) / 2.0


def _check_frame(frame: HodgeFrame, tol: float) -> None:
    n = frame.dim
    if np.abs(frame.J @ frame.J + np.eye(n)).max() > 1e-8:
        raise ArithmeticError("J^2 != -1")
    s = frame.sigma
    if np.abs(frame.J.T @ s @ frame.J - s).max() > 1e-8 * np.abs(s).max():
        raise ArithmeticError("pairing not J-invariant")
    # pairwise Q-orthogonality per the weight-3 filtration
    for a, b in [(frame.h30, frame.h30), (frame.h30, frame.h21), (frame.h21, frame.h21)]:
        if np.abs(a.T @ s @ b).max() > tol * 10:
            raise ArithmeticError("Hodge pieces not Q-isotropic as required")


def sample_frames(geom: FrameGeometry, points) -> list:
    return [frame_from_periods(geom, z0) for z0 in points]


# ---------------------------------------------------------------------------
# dJ formulas (Wit12 / Wit15)
# ---------------------------------------------------------------------------

def dj_check(geom: FrameGeometry, z0: complex, h: float = 1e-3) -> dict:
    """Finite-difference dJ against the C-and-metric formulas.

    Measures d/dt [J_t s(t)] for the moving covariant section s = E(t), takes
    the conj(E)-block coefficient, and compares with

      Wit15 (tangent bundle):  e^K  C_ttt G^{-1},
      Wit12 (middle bundle):   C_ttt g^{-1} with g = e^{-K} G.

    Also reports the frozen-vector operator derivative, whose conj-block is
    twice the above (the factor-2 discrepancy between the two dJ conventions).
    Slope is measured on the (8h, 4h) Richardson pair.
    """
    sample = geom.sample(z0)
    t0 = sample.t
    G = sample.G[0, 0].real
    C = sample.C[0, 0, 0]
    rhs15 = sample.expK * C / G
    g_small = math.exp(-sample.K) * G
    rhs12 = C / g_small

    def frame_data(t: complex):
        z = geom.z_at_t(t)
        tw = geom.tower_at(z, depth=1)
        s = geom.s_derivatives(z, depth=1)
        dK = -s[1, 0] / s[0, 0]
        pi_hat = tw[0]
        e = tw[1] + dK * tw[0]
        b = np.stack([pi_hat, e, np.conj(e), np.conj(pi_hat)], axis=1)
        weil = b @ np.diag([-1j, 1j, -1j, 1j]) @ np.linalg.inv(b)
        return b, weil, e

    b0, J0, e0 = frame_data(t0)

    def measured(step: float) -> complex:
        _, jp, ep = frame_data(t0 + step)
        _, jm, em = frame_data(t0 - step)
        d = (jp @ ep - jm @ em) / (2 * step)
        coeffs = np.linalg.solve(b0, d)
        return coeffs[2]

    def residuals(step: float) -> tuple[float, float]:
        m = measured(step)
        return (abs(m - rhs12) / abs(rhs12), abs(m - rhs15) / abs(rhs15))

    r12, r15 = residuals(h)
    pair = (residuals(8 * h), residuals(4 * h))
    slope = math.log2(pair[0][0] / pair[1][0]) if pair[1][0] > 0 else float("inf")
    # frozen-vector operator derivative for the ratio report
    _, jp, _ = frame_data(t0 + h)
    _, jm, _ = frame_data(t0 - h)
    dj_op = (jp - jm) @ e0 / (2 * h)
    op_coeff = np.linalg.solve(b0, dj_op)[2]
    return {
        "residual_wit12": r12,
        "residual_wit15": r15,
        "slope": slope,
        "richardson_pair": (pair[0][0], pair[1][0]),
        "measured": measured(h),
        "operator_ratio": abs(op_coeff / measured(h)),
    }


# ---------------------------------------------------------------------------
# extended period domain
# ---------------------------------------------------------------------------

class PlaneError(ValueError):
    """The 2-plane fails the positivity/orientation preconditions."""


def extended_point(space: SymplecticSpace, gamma, mu, exact: bool | None = None) -> dict:
    """Oriented positive 2-plane -> line on the quadric + weight-2 filtration.

    Returns Omega = mu + i gamma (exactly -i<Omega, conj Omega> = 2 <gamma, mu>),
    the symplectic completion used, and the filtration pieces.
    """
    s = space.pairing(gamma, mu)
    if s <= 0:
        raise PlaneError(f"plane pairing <gamma, mu> = {s} is not positive (orientation)")
    if exact is None:
        exact = all(isinstance(x, (int, Fraction)) for x in list(gamma) + list(mu))
    basis = symplectic_completion(space, gamma, mu)
    n_pairs = space.dim // 2
    gammas = basis[:n_pairs]
    mus = basis[n_pairs:]
    omega_exact = tuple(QQi(Fraction(m), Fraction(g)) for g, m in zip(gammas[0], mus[0]))
    h20 = omega_exact
    h11 = []
    for k in range(1, n_pairs):
        h11.append(tuple(QQi(Fraction(m), Fraction(g)) for g, m in zip(gammas[k], mus[k])))
        h11.append(tuple(QQi(Fraction(m), -Fraction(g)) for g, m in zip(gammas[k], mus[k])))
    minus_i_norm = -2 * space.pairing(
        [x.re for x in h20], [x.im for x in h20]
    )
    return {
        "omega": h20,
        "filtration": {"H20": (h20,), "H11": tuple(h11), "H02": (tuple(x.conjugate() for x in h20),)},
        "pairing_value": s,
        "minus_i_norm": minus_i_norm,
        "completion": basis,
    }


def plane_of_line(omega) -> tuple:
    """Inverse of extended_point: [Omega] -> oriented plane (gamma, mu)."""
    gamma = tuple(x.im if isinstance(x, QQi) else complex(x).imag for x in omega)
    mu = tuple(x.re if isinstance(x, QQi) else complex(x).real for x in omega)
    return gamma, mu


def symplectic_completion(space: SymplecticSpace, gamma, mu) -> list:
    """Extend (gamma, mu) to a rational symplectic basis, lowest-index greedy.

    Returns [gamma_0.., gamma_n-1, mu_0.., mu_n-1] with <gamma_i, mu_j> =
    s delta_ij (s = <gamma, mu> for the leading pair, 1 for the others).
    """
    dim = space.dim
    n_pairs = dim // 2
    gamma = [Fraction(x) for x in gamma]
    mu = [Fraction(x) for x in mu]
    s0 = space.pairing(gamma, mu)
    if s0 == 0:
        raise PlaneError("degenerate plane")
    gammas, mus, scales = [gamma], [mu], [s0]

    def reduce(v):
        out = list(v)
        for g, m, s in zip(gammas, mus, scales):
            a = space.pairing(out, m)
            b = space.pairing(out, g)
            out = [x - Fraction(a, s) * gi + Fraction(b, s) * mi for x, gi, mi in zip(out, g, m)]
        return out

    idx = 0
    while len(gammas) < n_pairs:
        # first standard basis vector with nonzero symplectic reduction
        while True:
            if idx >= dim:
                raise PlaneError("could not complete to a symplectic basis")
            cand = reduce([Fraction(1 if k == idx else 0) for k in range(dim)])
            idx += 1
            if any(x != 0 for x in cand):
                break
        g_new = cand
        jdx = 0
        while True:
            if jdx >= dim:
                raise PlaneError("could not find a symplectic partner")
            cand2 = reduce([Fraction(1 if k == jdx else 0) for k in range(dim)])
            jdx += 1
            p = space.pairing(g_new, cand2)
            if p != 0:
                m_new = [x / p for x in cand2]
                break
        gammas.append(g_new)
        mus.append(m_new)
        scales.append(space.pairing(g_new, m_new))
    return gammas + mus


# ---------------------------------------------------------------------------
# contact one-forms on the projective charts
# ---------------------------------------------------------------------------

def contact_form_eval(space: SymplecticSpace, point, w1, w2, chart: int, tol: float = 1e-10):
    """d alpha_chart evaluated on two tangents at [point].

    Tangents must be tangent to the quadric: Q(w, point) = 0 within tol.
    The chart-i affine representative of w is (w - (w_i/v_i) v) for the
    normalized point v = point/point_i; the value is the intersection form of
    the representatives, which is chart-independent on the quadric tangents.
    """
    v = [complex(x) for x in point]
    if abs(v[chart]) < tol:
        raise ValueError(f"chart coordinate z_{chart} vanishes at this point")
    norm_v = max(abs(x) for x in v)
    for w in (w1, w2):
        q = space.pairing([complex(x) for x in w], v)
        nw = max(abs(complex(x)) for x in w)
        if abs(q) > tol * max(1.0, nw * norm_v):
            raise ValueError("tangent is not tangent to the quadric (Q(w, v) != 0)")
    vn = [x / v[chart] for x in v]

    def affine(w):
        w = [complex(x) for x in w]
        return [wi - w[chart] * vi for wi, vi in zip(w, vn)]

    return space.pairing(affine(w1), affine(w2))


# ---------------------------------------------------------------------------
# rational planes near a real plane
# ---------------------------------------------------------------------------

def rational_plane_near(space: SymplecticSpace, gamma, mu, denom_bound: int) -> dict:
    """Greedy rational approximation of an oriented positive 2-plane.

    Per-coordinate continued-fraction convergents (denominators <= bound)
    followed by a local single-coordinate refinement; global optimality is
    not claimed.  The returned plane is integral, primitive, has
    <gamma, mu> in Z_{>0}, and its distance (max principal angle) is reported.
    """
    if space.pairing([float(x) for x in gamma], [float(x) for x in mu]) <= 0:
        raise PlaneError("input plane must be positively oriented")

    def approx(vec):
        return [Fraction(float(x)).limit_denominator(denom_bound) for x in vec]

    g0, m0 = approx(gamma), approx(mu)

    def to_primitive_int(v):
        den = 1
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
        ints = [int(x * den) for x in v]
        g = 0
        for x in ints:
            g = math.gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        return ints

    def plane_distance(ga, ma):
        a = np.array([gamma, mu], dtype=float).T
        b = np.array([[float(x) for x in ga], [float(x) for x in ma]], dtype=float).T
        return float(subspace_angles(a, b).max())

    gi, mi = to_primitive_int(g0), to_primitive_int(m0)
    if space.pairing(gi, mi) == 0:
        raise PlaneError("no positive rational plane within this denominator bound")
    if space.pairing(gi, mi) < 0:
        gi, mi = mi, gi
    best = (plane_distance(gi, mi), gi, mi)
    # local refinement: adjust one coordinate of gamma/mu by +-1/denom_bound
    step = Fraction(1, denom_bound)
    for which in (0, 1):
        base_g, base_m = best[1], best[2]
        for i in range(space.dim):
            for s in (-1, 1):
                g_try = list(map(Fraction, base_g))
                m_try = list(map(Fraction, base_m))
                if which == 0:
                    g_try[i] += s * step
                else:
                    m_try[i] += s * step
                gt, mt = to_primitive_int(g_try), to_primitive_int(m_try)
                if space.pairing(gt, mt) <= 0:
                    continue
                d = plane_distance(gt, mt)
                if d < best[0]:
                    best = (d, gt, mt)
    dist, gi, mi = best
    pair = space.pairing(gi, mi)
    if pair <= 0:
        raise PlaneError("no positive rational plane within this denominator bound")
    return {"gamma": tuple(gi), "mu": tuple(mi), "distance": dist, "pairing": int(pair)}


# ---------------------------------------------------------------------------
# abelian period matrices (Donagi-Markman fibres)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegerLattice:
    """Full-rank lattice with its (integral) symplectic Gram matrix."""

    basis: tuple           # 2n vectors (rows), each length 2n, integers/Fractions
    gram: tuple            # antisymmetric integral Gram of the pairing

    def det_abs(self) -> int:
        m = np.array([[float(x) for x in row] for row in self.gram])
        return int(round(abs(np.linalg.det(m))))


def abelian_period_matrix(lattice_columns: np.ndarray, J: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Siegel point of the torus (R^2n / lattice) polarized by omega, J-complex.

    lattice_columns: 2n x 2n real matrix, columns a symplectic basis
    (A_1..A_n, B_1..B_n) with omega(A_i, B_j) = delta_ij.  Requires J
    compatible (omega(Ju, Jv) = omega(u, v)) and positive (omega(u, Ju) > 0).
    Returns Z = P_A^{-1} P_B, verified symmetric with Im Z > 0.
    """
    dim = J.shape[0]
    n = dim // 2
    if np.abs(J @ J + np.eye(dim)).max() > 1e-9:
        raise ValueError("J^2 != -1")
    if np.abs(J.T @ omega @ J - omega).max() > 1e-9 * np.abs(omega).max():
        raise ValueError("omega not J-invariant")
    g = omega @ J
    if np.linalg.eigvalsh((g + g.T) / 2).min() <= 0:
        raise ValueError("nonpositive polarization: omega(u, Ju) not positive definite")
    # holomorphic coordinates: rows spanning the annihilator of the (0,1) space
    ev, vec = np.linalg.eig(J)
    cols = [vec[:, k] for k in range(dim) if abs(ev[k] - 1j) < 1e-8]
    if len(cols) != n:
        raise ValueError("J eigenspace structure broken")
    m = np.stack(cols, axis=1)  # basis of W^{1,0}
    # functionals: w -> coefficients of the (1,0) projection in that basis
    proj = np.linalg.pinv(m) @ ((np.eye(dim) - 1j * J) / 2.0)
    periods = proj @ np.asarray(lattice_columns, dtype=float)
    p_a, p_b = periods[:, :n], periods[:, n:]
    z = np.linalg.solve(p_a, p_b)
    if np.abs(z - z.T).max() > 1e-8 * max(1.0, np.abs(z).max()):
        raise ArithmeticError("Siegel matrix not symmetric")
    if np.linalg.eigvalsh(z.imag).min() <= 0:
        z = np.conj(z)
        if np.linalg.eigvalsh(z.imag).min() <= 0:
            raise ArithmeticError("Siegel matrix has no positive imaginary part")
    return z
