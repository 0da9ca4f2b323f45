"""Gauss-Manin matrices, the Higgs field, and the flat CHSV family.

The t-family D = nabla + t theta + t^{-1} theta-bar is realized as the
Hodge-graded rescaling of the Gauss-Manin connection in the moving frame
(Pi^, E_i, conj E_i, conj Pi^): the level-preserving part is the metric
connection of the middle-bundle pairing plus the line-bundle d K terms, the
level-lowering Griffiths pieces are multiplied by t on dt-legs and the
raising pieces by 1/t on dt-bar legs.  Because the unrescaled connection is
flat and its curvature splits by level shift, the family is flat for every
t in C*; |t| = 1 is exactly where the real structure is preserved.

One modulus structure functions (eta-normalized, flat coordinate t):

    d_t Pi^   = -dK Pi^ + E,            d_tbar Pi^  = 0,
    d_t E     = Gamma E + beta conj(E), d_tbar E    = G Pi^,
    Gamma     = d_t log(G e^{-K}),      beta        = -i C e^K / G,

whose flatness is equivalent to the special-geometry curvature identity
ddbar log G = 2G - e^{2K}|C|^2/G^2 together with holomorphy of C; the
plaquette suite verifies exactly those identities numerically, and the torus
fixture verifies them in exact arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from .geometry import FrameGeometry
from .kuranishi import DGLAModel, TorusGeometry
from .multipoly import MPoly
from .picard_fuchs import PeriodFrame
from .scalars import QQi, is_zero
from .series import LogSeries, TruncSeries


# ---------------------------------------------------------------------------
# Gauss-Manin companion matrix and pairing invariance
# ---------------------------------------------------------------------------

def gauss_manin_matrix(frame: PeriodFrame) -> list:
    """Connection matrix A(z) in the cyclic basis (Pi, theta Pi, ..): theta w = A w.

    The last row is -p_k/p_4 from the operator; entries are exact series.
    """
    order = frame.trunc_order
    ps = frame.operator.p_series(order)
    inv_p4 = ps[4].reciprocal()
    zero = TruncSeries.zero_series(order, "rational")
    one = TruncSeries.constant(Fraction(1), order, "rational")
    rows = []
    for k in range(3):
        rows.append([one if j == k + 1 else zero for j in range(4)])
    rows.append([-(ps[j] * inv_p4) for j in range(4)])
    return rows


def gm_pairing_invariance_residual(frame: PeriodFrame) -> int:
    """Nonzero coefficients of theta(S) - A S - S A^T, S_ab = Q(theta^a Pi, theta^b Pi).

    S is z-dependent in the cyclic basis; the parallel-pairing identity above
    is the flatness statement.  Returns the number of offending coefficients
    (0 = exact invariance).
    """
    a = gauss_manin_matrix(frame)
    sols = list(frame.solutions)
    thetas = [sols]
    for _ in range(3):
        thetas.append([s.theta() for s in thetas[-1]])
    order = frame.trunc_order
    sigma = frame.pairing

    def q_series(f, g) -> TruncSeries:
        acc = None
        for c in range(4):
            for d in range(4):
                w = sigma[c][d]
                if w == 0:
                    continue
                term = (f[c] * g[d]) * w
                acc = term if acc is None else acc + term
        return acc.log_free_part()

    s_tilde = [[q_series(thetas[i], thetas[j]) for j in range(4)] for i in range(4)]
    bad = 0
    for i in range(4):
        for j in range(4):
            lhs = s_tilde[i][j].theta()
            rhs = TruncSeries.zero_series(order, "rational")
            for k in range(4):
                rhs = rhs + a[i][k] * s_tilde[k][j] + s_tilde[i][k] * a[j][k]
            diff = lhs - rhs
            bad += sum(1 for c in diff.coeffs if c != 0)
    return bad


# ---------------------------------------------------------------------------
# Higgs field and Frobenius product (exact, N moduli)
# ---------------------------------------------------------------------------

def higgs_field(yukawa, h_pairing) -> list:
    """theta_i matrices from C_ij^k = sum_m C_ijm h^{mk} (exact).

    yukawa: nested (N,N,N) exact tensor; h_pairing: N x N exact matrix.
    Returns [theta_i]: theta_i[k][j] = coefficient of phi_k in theta_i phi_j.
    """
    from .linalg_exact import inverse

    n = len(h_pairing)
    h_inv = inverse([list(r) for r in h_pairing])
    thetas = []
    for i in range(n):
        mat = [[QQi(0) for _ in range(n)] for _ in range(n)]
        for j in range(n):
            for k in range(n):
                acc = QQi(0)
                for m in range(n):
                    acc = acc + QQi.of(yukawa[i][j][m]) * QQi.of(h_inv[m][k])
                mat[k][j] = acc
        thetas.append(mat)
    return thetas


def higgs_commutators(thetas) -> list:
    """All [theta_i, theta_j] as exact matrices (must vanish: Eq. of H3 type)."""
    from .linalg_exact import mat_mul

    n = len(thetas)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            ab = mat_mul(thetas[i], thetas[j])
            ba = mat_mul(thetas[j], thetas[i])
            comm = [[ab[r][c] - ba[r][c] for c in range(len(ab))] for r in range(len(ab))]
            out.append(((i, j), comm))
    return out


def frobenius_product(yukawa, h_pairing) -> dict:
    """Structure constants F_ijk = i C_ijk with commutativity/associativity report."""
    n = len(h_pairing)
    eye = QQi(0, 1)
    f = [[[eye * QQi.of(yukawa[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
    commutative = all(
        f[i][j][k] == f[j][i][k] for i in range(n) for j in range(n) for k in range(n)
    )
    thetas = higgs_field(yukawa, h_pairing)
    assoc_exact = all(
        all(all(is_zero(x) for x in row) for row in comm) for _, comm in higgs_commutators(thetas)
    )
    return {"F": f, "commutative": commutative, "associative": assoc_exact}


# ---------------------------------------------------------------------------
# CHSV connection samples (one modulus, numeric)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConnectionSample:
    """Connection matrices at a point for the frame (Pi^, E, conj E, conj Pi^)."""

    z: complex
    t_param: complex
    a_matrix: np.ndarray  # dt-leg
    b_matrix: np.ndarray  # dtbar-leg
    frame_basis: np.ndarray
    theta_entry: complex
    gamma_entry: complex


class ChsvConnection:
    """Evaluator for the flat t-family on a one-parameter model."""

    def __init__(self, geom: FrameGeometry, t_param: complex = 1.0, allow_nonunitary: bool = False):
        if t_param == 0:
            raise ValueError("t must lie in C*")
        if not allow_nonunitary and abs(abs(t_param) - 1.0) > 1e-12:
            raise ValueError("|t| = 1 required (pass allow_nonunitary=True to unlock)")
        self.geom = geom
        self.t = complex(t_param)

    # -- scalar structure functions -------------------------------------------
    def structure(self, z: complex) -> dict:
        geom = self.geom
        s = geom.s_derivatives(z, depth=2)
        s00, s10, s01, s11 = s[0, 0], s[1, 0], s[0, 1], s[1, 1]
        G = (-s11 / s00 + s10 * s01 / (s00 * s00)).real
        dK = -s10 / s00
        dG = geom.metric_derivative(z)
        expK = 1.0 / s00.real
        C = geom.c_ttt_z(z)
        gamma = dG / G - dK
        beta = -1j * C * expK / G
        return {"G": G, "dK": dK, "gamma": gamma, "beta": beta, "C": C, "expK": expK}

    def matrices(self, z: complex) -> tuple[np.ndarray, np.ndarray]:
        """(A, B): the dt and dtbar connection matrices at z."""
        st = self.structure(z)
        t = self.t
        G, dK, gamma, beta = st["G"], st["dK"], st["gamma"], st["beta"]
        a = np.zeros((4, 4), dtype=complex)
        a[0, 0] = -dK
        a[1, 0] = t * 1.0
        a[1, 1] = gamma
        a[2, 1] = t * beta
        a[3, 2] = t * G
        b = np.zeros((4, 4), dtype=complex)
        b[3, 3] = -np.conj(dK)
        b[2, 3] = 1.0 / t
        b[2, 2] = np.conj(gamma)
        b[1, 2] = np.conj(beta) / t
        b[0, 1] = G / t
        return a, b

    def frame_basis(self, z: complex) -> np.ndarray:
        geom = self.geom
        tw = geom.tower_at(z, depth=1)
        s = geom.s_derivatives(z, depth=1)
        dK = -s[1, 0] / s[0, 0]
        e = tw[1] + dK * tw[0]
        return np.stack([tw[0], e, np.conj(e), np.conj(tw[0])], axis=1)

    def sample(self, z: complex) -> ConnectionSample:
        a, b = self.matrices(z)
        return ConnectionSample(
            z=z,
            t_param=self.t,
            a_matrix=a,
            b_matrix=b,
            frame_basis=self.frame_basis(z),
            theta_entry=a[2, 1] / self.t,
            gamma_entry=a[1, 1],
        )

    # -- transport --------------------------------------------------------------
    def edge_transport(self, t_start: complex, t_end: complex) -> np.ndarray:
        """Magnus-4 (two-point Gauss) parallel transport along a t-segment."""
        geom = self.geom
        delta = t_end - t_start
        g1 = t_start + delta * (0.5 - math.sqrt(3) / 6)
        g2 = t_start + delta * (0.5 + math.sqrt(3) / 6)

        def gen(tc: complex) -> np.ndarray:
            a, b = self.matrices(geom.z_at_t(tc))
            return -(a * delta + b * np.conj(delta))

        m1, m2 = gen(g1), gen(g2)
        omega = 0.5 * (m1 + m2) + (math.sqrt(3) / 12.0) * (m2 @ m1 - m1 @ m2)
        return expm(omega)

    def transport(self, t_path, subdivisions: int = 1) -> np.ndarray:
        """Transport的 moving-frame coefficients along a polygonal t-path."""
        u = np.eye(4, dtype=complex)
        for start, end in zip(t_path[:-1], t_path[1:]):
            for k in range(subdivisions):
                a = start + (end - start) * k / subdivisions
                b = start + (end - start) * (k + 1) / subdivisions
                u = self.edge_transport(a, b) @ u
        return u

    def plaquette_residual(self, z0: complex, h: float) -> dict:
        """Holonomy around the (Re t, Im t) square of side h, residual/area.

        The (2,0) and (0,2) commutator blocks vanish identically for one
        modulus ([D_t, D_t] = 0); the plaquette measures the (1,1) block.
        """
        t0 = self.geom.flat_coordinate(z0)
        corners = [t0, t0 + h, t0 + h + 1j * h, t0 + 1j * h, t0]
        u = self.transport(corners)
        area = h * h
        res = float(np.abs(u - np.eye(4)).max() / area)
        return {"dd_bar": res, "dd": 0.0, "dbar_dbar": 0.0}

    def flatness_residual(self, z0: complex, h: float) -> dict:
        """Plaquette residuals at h with an (8h, 4h) Richardson slope, plus
        the symplectic-parallelism drift of the pairing along the loop."""
        res_h = self.plaquette_residual(z0, h)
        r8 = self.plaquette_residual(z0, 8 * h)["dd_bar"]
        r4 = self.plaquette_residual(z0, 4 * h)["dd_bar"]
        slope = math.log2(r8 / r4) if r4 > 0 else float("inf")
        # pairing drift: transport frame coefficients around the loop and
        # compare Q-grams before/after (Q constant in the flat frame)
        t0 = self.geom.flat_coordinate(z0)
        corners = [t0, t0 + h, t0 + h + 1j * h, t0 + 1j * h, t0]
        u = self.transport(corners)
        b0 = self.frame_basis(z0)
        sigma = self.geom.frame.pairing_complex()
        gram0 = b0.T @ sigma @ b0
        v_end = b0 @ u
        gram1 = v_end.T @ sigma @ v_end
        omega_drift = float(np.abs(gram1 - gram0).max() / max(1e-30, np.abs(gram0).max()))
        return {
            "residuals": res_h,
            "slope": slope,
            "richardson_pair": (r8, r4),
            "omega_parallel_drift": omega_drift,
        }


def lattice_transport(
    conn: ChsvConnection,
    vectors,
    t_path,
    subdivisions: int = 32,
    integrality_tol: float = 1e-8,
) -> dict:
    """Transport flat-frame vectors along a path; Gram re-rounded to integers.

    vectors: list of length-4 coefficient vectors in the Frobenius frame.
    Returns transported vectors (flat coordinates at the endpoint), the exact
    starting Gram, the transported Gram and its integer rounding; raises if
    the transported Gram is not integral within tolerance.
    """
    geom = conn.geom
    z_start = geom.z_at_t(t_path[0])
    z_end = geom.z_at_t(t_path[-1])
    b_start = conn.frame_basis(z_start)
    b_end = conn.frame_basis(z_end)
    sigma = geom.frame.pairing_complex()
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    coeffs = [np.linalg.solve(b_start, v) for v in vecs]
    u = conn.transport(t_path, subdivisions=subdivisions)
    out = [b_end @ (u @ c) for c in coeffs]
    gram0 = np.array([[complex(v1 @ sigma @ v2) for v2 in vecs] for v1 in vecs])
    gram1 = np.array([[complex(v1 @ sigma @ v2) for v2 in out] for v1 in out])
    rounded = np.round(gram1.real)
    if np.abs(gram1 - rounded).max() > integrality_tol:
        raise ArithmeticError(
            "non-integral Gram after transport (connection or step-size failure): "
            f"max deviation {np.abs(gram1 - rounded).max():.3e}"
        )
    return {
        "vectors": out,
        "gram_start": gram0,
        "gram_end": rounded.astype(int),
        "holonomy_defect": float(np.abs(u - np.eye(4)).max()) if t_path[0] == t_path[-1] else None,
    }


# ---------------------------------------------------------------------------
# exact CHSV flatness on the torus fixture
# ---------------------------------------------------------------------------

def torus_chsv_exact(tg: TorusGeometry, t_param) -> dict:
    """All three commutator blocks of the CHSV family at tau = 0, exactly.

    Builds the (2N+2)-frame connection matrices as degree-1 exact polynomials
    from the torus Kähler expansion and evaluates
    F = d A_j / d taubar_i - d B_i / d tau_j + [A_j, B_i] etc. at the center.
    t enters as an exact Gaussian rational; every block must vanish exactly.
    """
    n = tg.n
    t = QQi.of(t_param) if not isinstance(t_param, QQi) else t_param
    t_inv = QQi(1) / t
    dim = 2 * n + 2
    deg = 2

    def mp(c=0) -> MPoly:
        return MPoly.constant(QQi.of(c), n, deg)

    k_poly = tg.k_poly
    # first derivatives of K as degree<=1 polynomials
    dk = [k_poly.diff(i) for i in range(n)]
    dkbar = [k_poly.diff(i, bar=True) for i in range(n)]
    g = [[k_poly.diff(i).diff(j, bar=True) for j in range(n)] for i in range(n)]
    # exact inverse of G(0) = identity on the diagonal sector; for the general
    # exact metric use the 0th order inverse (suffices for first-order data)
    from .linalg_exact import inverse

    g0 = [[QQi.of(g[i][j].constant_term()) for j in range(n)] for i in range(n)]
    g0_inv = inverse(g0)
    c_tensor = tg.yukawa
    e_k = (-k_poly).log_expify() if hasattr(k_poly, "log_expify") else None
    # e^K = 1/S exactly as a truncated polynomial: S * e^K = 1
    s = tg.s_poly
    exp_k = _poly_reciprocal(s, deg)

    # frame order: (Pi^, E_1..E_n, Ebar_1..Ebar_n, Pibar)
    def a_matrix(i: int) -> list:
        m = [[mp() for _ in range(dim)] for _ in range(dim)]
        m[0][0] = -dk[i]
        m[1 + i][0] = mp(1) * t
        for j in range(n):
            # Gamma_{ij}^k = g^{k lbar} d_i g_{j lbar} - delta dK (Chern of G e^{-K})
            for k in range(n):
                gamma = mp()
                for l in range(n):
                    gamma = gamma + g[j][l].diff(i) * QQi.of(g0_inv[l][k])
                if k == j:
                    gamma = gamma - dk[i]
                m[1 + k][1 + j] = gamma
            for l in range(n):
                beta = mp()
                for kk in range(n):
                    beta = beta + mp(c_tensor[i][j][kk]) * exp_k * QQi.of(g0_inv[kk][l]) * QQi(0, -1)
                m[1 + n + l][1 + j] = beta * t
            m[dim - 1][1 + n + j] = g[j][i].conj() * t if False else _conj_metric(g, j, i) * t
        return m

    def b_matrix(i: int) -> list:
        a = a_matrix(i)
        # conjugate mirror with t -> 1/t on the raising entries
        m = [[mp() for _ in range(dim)] for _ in range(dim)]
        perm = _conj_permutation(n)
        for r in range(dim):
            for c in range(dim):
                entry = a[r][c]
                if entry.is_zero():
                    continue
                scaled = entry
                # undo t on lowering, apply 1/t instead
                m[perm[r]][perm[c]] = scaled.conj()
        # fix the t-powers: lowering entries carried t, conj gives conj(t);
        # replace by 1/t exactly
        tt = t.conjugate()
        ratio = t_inv / tt
        lowering = {(1 + 0, 0)}
        out = [[mp() for _ in range(dim)] for _ in range(dim)]
        for r in range(dim):
            for c in range(dim):
                e = m[r][c]
                if e.is_zero():
                    continue
                lvl_r = _level(r, n)
                lvl_c = _level(c, n)
                if lvl_r == lvl_c + 1:  # raising on the conj side
                    e = e * ratio
                out[r][c] = e
        return out

    a_mats = [a_matrix(i) for i in range(n)]
    b_mats = [b_matrix(i) for i in range(n)]

    def comm(x, y):
        out = [[mp() for _ in range(dim)] for _ in range(dim)]
        for r in range(dim):
            for c in range(dim):
                acc = mp()
                for k in range(dim):
                    acc = acc + x[r][k] * y[k][c] - y[r][k] * x[k][c]
                out[r][c] = acc
        return out

    def eval0(p: MPoly):
        return QQi.of(p.constant_term())

    worst = {"dd": QQi(0), "dd_bar": QQi(0), "dbar_dbar": QQi(0)}
    exact = True
    for i in range(n):
        for j in range(n):
            # (1,1): d_{tau_i} B_j - d_{taubar_j} A_i + [A_i, B_j]
            f11 = comm(a_mats[i], b_mats[j])
            for r in range(dim):
                for c in range(dim):
                    v = eval0(b_mats[j][r][c].diff(i) - a_mats[i][r][c].diff(j, bar=True) + f11[r][c])
                    if not is_zero(v):
                        exact = False
                        worst["dd_bar"] = v
            if j > i:
                f20 = comm(a_mats[i], a_mats[j])
                for r in range(dim):
                    for c in range(dim):
                        v = eval0(a_mats[j][r][c].diff(i) - a_mats[i][r][c].diff(j) + f20[r][c])
                        if not is_zero(v):
                            exact = False
                            worst["dd"] = v
                f02 = comm(b_mats[i], b_mats[j])
                for r in range(dim):
                    for c in range(dim):
                        v = eval0(
                            b_mats[j][r][c].diff(i, bar=True) - b_mats[i][r][c].diff(j, bar=True) + f02[r][c]
                        )
                        if not is_zero(v):
                            exact = False
                            worst["dbar_dbar"] = v
    return {"exact": exact, "worst": worst}


def _level(idx: int, n: int) -> int:
    """Hodge level of a frame slot: Pi^ = 3, E = 2, Ebar = 1, Pibar = 0."""
    if idx == 0:
        return 3
    if idx <= n:
        return 2
    if idx <= 2 * n:
        return 1
    return 0


def _conj_permutation(n: int) -> list:
    dim = 2 * n + 2
    perm = [0] * dim
    perm[0] = dim - 1
    perm[dim - 1] = 0
    for i in range(n):
        perm[1 + i] = 1 + n + i
        perm[1 + n + i] = 1 + i
    return perm


def _conj_metric(g, j, i):
    return g[j][i].conj()


def _poly_reciprocal(p: MPoly, deg: int) -> MPoly:
    """1/p for p with constant term 1, truncated at total degree deg."""
    s = p - 1
    acc = MPoly.constant(Fraction(1), p.n, deg)
    power = MPoly.constant(Fraction(1), p.n, deg)
    for _ in range(deg):
        power = power * s * Fraction(-1)
        acc = acc + power
    return acc