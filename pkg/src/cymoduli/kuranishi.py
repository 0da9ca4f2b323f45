"""Formal deformation theory on finite-dimensional DGLA models.

The order-by-order Maurer-Cartan recursion

    phi_I = -1/2 dbar* G_h  sum_{J+K=I} [phi_J, phi_K],   |I| >= 2,

needs only Hodge-algebraic inputs: the graded pieces, dbar, the bracket, and
harmonic/Green data.  Models are finite exact matrices.  Random fixtures are
generated with dbar: V1 -> V2 surjective (no harmonic obstruction space) and
the bracket concentrated in V1 x V1 -> V2 with V3 = 0, which makes the
recursion's unobstructedness hypotheses hold by construction - the honest
finite-dimensional stand-in for the vanishing theorems available on an
actual Calabi-Yau.

The torus fixture is the constant-form model of T^6 = C^3/(Z^3 + i Z^3):
nine constant Beltrami directions, vanishing bracket and dbar, H^3 of rank
20 realized in an exact exterior algebra over the Gaussian rationals, with
the holomorphic 3-form scaled so that (-1)^{n(n-1)/2} (sqrt-1)^n
int Omega ^ conj(Omega) = 1 exactly.

All operations are pure and deterministic; independent multi-index terms of
a fixed degree may be computed concurrently with bit-identical results.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import exterior as ext
from .linalg_exact import identity, inverse, mat_mul, mat_vec, nullspace, rank, transpose
from .multipoly import MPoly
from .scalars import QQi, is_zero


# ---------------------------------------------------------------------------
# multi-indices (graded-lexicographic order)
# ---------------------------------------------------------------------------

def unit_index(i: int, n: int) -> tuple:
    out = [0] * n
    out[i] = 1
    return tuple(out)


def graded_lex_key(index: tuple):
    return (sum(index), index)


def indices_of_degree(n: int, degree: int):
    """All exponent tuples of the given total degree, graded-lex order."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in indices_of_degree(n - 1, degree - first):
            yield (first,) + rest


def proper_splits(index: tuple):
    """All ordered pairs (J, K), J + K = index, both of positive degree."""
    ranges = [range(e + 1) for e in index]
    total = sum(index)
    for J in itertools.product(*ranges):
        dj = sum(J)
        if dj == 0 or dj == total:
            continue
        K = tuple(e - j for e, j in zip(index, J))
        yield J, K


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

class ModelError(ValueError):
    """The supplied DGLA data violates a structural invariant."""


@dataclass(frozen=True)
class TorusForms:
    """Exterior-algebra realization of the torus fixture's cohomology."""

    n_gen: int                       # 6 generators: dz^1..3, dzbar^1..3
    omega0: dict                     # Form: normalized holomorphic 3-form
    beltrami: tuple                  # basis (a, b): dzbar^a (x) d/dz^b
    conj_swap: dict                  # generator conjugation map

    def pairing(self, alpha: dict, beta: dict) -> QQi:
        """int alpha ^ beta over the unit cell (exact Gaussian rational)."""
        top = ext.top_coefficient(ext.wedge(alpha, beta), self.n_gen)
        return top * QQi(0, -8)

    def hermitian(self, alpha: dict, beta: dict) -> QQi:
        """<alpha, beta> = int alpha ^ conj(beta)."""
        return self.pairing(alpha, ext.conj_form(beta, self.conj_swap))


@dataclass(frozen=True)
class DGLAModel:
    """Finite matrix model of (A^{0,*} (x) T, dbar, [.,.], Hodge data)."""

    n1: int
    n2: int
    dbar: tuple                     # n2 x n1 rows of Fractions (V1 -> V2)
    bracket: tuple                  # symmetric triples (i, j, k, coeff)
    n3: int = 0
    forms: TorusForms | None = None
    label: str = "model"

    def __post_init__(self):
        validate_model(self)

    # -- derived Hodge operators (exact) --------------------------------------
    def hodge_ops(self) -> tuple:
        """(P, H2, H1): dbar* G_h on V2, harmonic projectors on V2 and V1.

        Inner products are the identity on the declared bases, dbar* = dbar^T.
        With V3 = 0 the Hodge identity on V2 reads id = H2 + dbar P.
        """
        if self.n2 == 0:
            return ([[] for _ in range(self.n1)], [], identity(self.n1))
        dbar = [list(r) for r in self.dbar]
        dt = transpose(dbar)
        lap2 = mat_mul(dbar, dt)
        kernel = nullspace(dt)  # ker dbar* inside V2
        if not kernel:
            h2 = [[Fraction(0)] * self.n2 for _ in range(self.n2)]
            p = mat_mul(dt, inverse(lap2))
        else:
            k = [list(v) for v in kernel]
            gram = mat_mul(k, transpose(k))
            h2 = mat_mul(transpose(k), mat_mul(inverse(gram), k))
            m = [
                [lap2[i][j] + h2[i][j] for j in range(self.n2)] for i in range(self.n2)
            ]
            p = mat_mul(dt, inverse(m))
        pd = mat_mul(p, dbar)
        h1 = identity(self.n1)
        h1 = [[h1[i][j] - pd[i][j] for j in range(self.n1)] for i in range(self.n1)]
        return (p, h2, h1)

    def green_pull(self) -> list:
        return self.hodge_ops()[0]

    def harmonic_projector_v1(self) -> list:
        return self.hodge_ops()[2]

    def bracket_eval(self, u, v) -> list:
        """[u, v] in V2 for u, v in V1 (symmetric on degree-1 pairs)."""
        out = [Fraction(0)] * self.n2
        for i, j, k, c in self.bracket:
            if not is_zero(u[i]) and not is_zero(v[j]):
                out[k] += c * u[i] * v[j]
            if i != j and not is_zero(u[j]) and not is_zero(v[i]):
                out[k] += c * u[j] * v[i]
        return out

    def apply_dbar(self, v) -> list:
        if self.n2 == 0:
            return []
        return mat_vec([list(r) for r in self.dbar], list(v))

    def harmonic_basis(self) -> list:
        h = self.harmonic_projector_v1()
        cols = transpose(h)
        basis = []
        seen = []
        for col in cols:
            if any(not is_zero(x) for x in col):
                cand = seen + [col]
                if rank(cand) > len(seen):
                    seen.append(col)
                    basis.append(tuple(col))
        return basis


def validate_model(model: DGLAModel) -> None:
    """Check dbar^2 = 0, adjointness, Leibniz and the Hodge identity, exactly."""
    if model.n3 != 0:
        raise ModelError("models carry V3 = 0 (dbar^2 = 0 holds structurally)")
    if model.n2 and len(model.dbar) != model.n2:
        raise ModelError("dbar row count != dim V2")
    for r in model.dbar:
        if len(r) != model.n1:
            raise ModelError("dbar column count != dim V1")
    for i, j, k, c in model.bracket:
        if not (0 <= i < model.n1 and 0 <= j < model.n1 and 0 <= k < model.n2):
            raise ModelError("bracket indices out of range")
    # Leibniz dbar[a,b] = [dbar a, b] - [a, dbar b] lands in V3 = 0 and the
    # V2 x V1 bracket components are zero: holds identically.
    if model.n2:
        dbar = [list(r) for r in model.dbar]
        p, h2, h1 = model.hodge_ops()
        # Hodge identity on V2: id = H2 + dbar dbar* G_h (dbar V2 = 0)
        dp = mat_mul(dbar, p)
        ident = identity(model.n2)
        if any(
            h2[i][j] + dp[i][j] != ident[i][j] for i in range(model.n2) for j in range(model.n2)
        ):
            raise ModelError("Hodge decomposition identity failed on V2")
        for proj in (h1, h2):
            if mat_mul(proj, proj) != proj or transpose(proj) != proj:
                raise ModelError("harmonic projector not an orthogonal projector")
        # unobstructedness: bracket values have no harmonic part
        for i, j in {(t[0], t[1]) for t in model.bracket}:
            ei = [Fraction(1) if a == i else Fraction(0) for a in range(model.n1)]
            ej = [Fraction(1) if a == j else Fraction(0) for a in range(model.n1)]
            val = model.bracket_eval(ei, ej)
            if any(not is_zero(x) for x in mat_vec(h2, val)):
                raise ModelError("obstructed model: bracket has a harmonic V2 component")


def random_model(seed: int, max_dim: int = 12) -> DGLAModel:
    """Seeded random unobstructed model with a nontrivial bracket."""
    rng = random.Random(seed)
    while True:
        n1 = rng.randint(4, max(4, min(8, max_dim - 2)))
        n2 = rng.randint(1, max(1, n1 - 3))
        if n1 + n2 > max_dim:
            continue
        dbar = [[Fraction(rng.randint(-2, 2)) for _ in range(n1)] for _ in range(n2)]
        if rank(dbar) != n2:
            continue
        triples = []
        n_terms = rng.randint(2, 6)
        for _ in range(n_terms):
            i = rng.randint(0, n1 - 1)
            j = rng.randint(i, n1 - 1)
            k = rng.randint(0, n2 - 1)
            c = Fraction(rng.choice([-2, -1, 1, 2]))
            triples.append((i, j, k, c))
        model = DGLAModel(
            n1=n1,
            n2=n2,
            dbar=tuple(tuple(r) for r in dbar),
            bracket=tuple(triples),
            label=f"random-{seed}",
        )
        if len(model.harmonic_basis()) >= 2:
            return model


# ---------------------------------------------------------------------------
# Maurer-Cartan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BeltramiSeries:
    """phi(tau) = sum_I phi_I tau^I with exact V1-valued coefficients."""

    n_directions: int
    order: int
    terms: dict  # multi-index tuple -> tuple of scalars (V1 vector)

    def term(self, index: tuple):
        return self.terms.get(index)

    def sorted_indices(self) -> list:
        return sorted(self.terms, key=graded_lex_key)


def solve_maurer_cartan(model: DGLAModel, directions, order: int) -> BeltramiSeries:
    """Solve dbar phi + 1/2 [phi, phi] = 0 to the given total degree."""
    if order < 1:
        raise ValueError("order must be >= 1")
    directions = [tuple(Fraction(x) if not isinstance(x, QQi) else x for x in d) for d in directions]
    h1 = model.harmonic_projector_v1()
    for d in directions:
        if mat_vec(h1, list(d)) != list(d):
            raise ModelError("direction is not harmonic")
    n = len(directions)
    p = model.green_pull()
    terms = {}
    for i, d in enumerate(directions):
        terms[unit_index(i, n)] = d
    half = Fraction(1, 2)
    for degree in range(2, order + 1):
        for index in indices_of_degree(n, degree):
            src = [Fraction(0)] * model.n2
            for J, K in proper_splits(index):
                pj = terms.get(J)
                pk = terms.get(K)
                if pj is None or pk is None:
                    continue
                b = model.bracket_eval(pj, pk)
                src = [s + half * x for s, x in zip(src, b)]
            if all(is_zero(x) for x in src):
                continue
            val = mat_vec(p, src)
            terms[index] = tuple(-x for x in val)
    return BeltramiSeries(n_directions=n, order=order, terms=terms)


def mc_residual(model: DGLAModel, phi: BeltramiSeries) -> dict:
    """Exact multi-degree expansion of dbar phi + 1/2 [phi, phi] (V2-valued)."""
    out = {}
    half = Fraction(1, 2)
    n = phi.n_directions
    for degree in range(1, phi.order + 1):
        for index in indices_of_degree(n, degree):
            res = [Fraction(0)] * model.n2
            t = phi.term(index)
            if t is not None:
                res = [Fraction(x) if not isinstance(x, QQi) else x for x in model.apply_dbar(t)]
            for J, K in proper_splits(index):
                pj, pk = phi.term(J), phi.term(K)
                if pj is None or pk is None:
                    continue
                b = model.bracket_eval(pj, pk)
                res = [r + half * x for r, x in zip(res, b)]
            if any(not is_zero(x) for x in res):
                out[index] = tuple(res)
    return out


def gauge_residual(model: DGLAModel, phi: BeltramiSeries) -> dict:
    """Harmonic projections of all degree >= 2 terms (must vanish: gauge fixing)."""
    h1 = model.harmonic_projector_v1()
    out = {}
    for index, v in phi.terms.items():
        if sum(index) < 2:
            continue
        proj = mat_vec(h1, list(v))
        if any(not is_zero(x) for x in proj):
            out[index] = tuple(proj)
    return out


# ---------------------------------------------------------------------------
# torus fixture
# ---------------------------------------------------------------------------

def torus_model() -> DGLAModel:
    """The constant-form model of T^6 = C^3/(Z^3 + i Z^3).

    V1 is the nine constant Beltrami matrices dzbar^a (x) d/dz^b; dbar and
    the bracket vanish on constants, so every Hodge operator is trivial and
    the expansions below are exact Gaussian-rational polynomials.
    """
    beltrami = tuple((a, b) for a in range(3) for b in range(3))
    c = QQi(Fraction(1, 4), Fraction(1, 4))  # |c|^2 = 1/8 normalizes int Omega ^ conj Omega
    omega0 = ext.scale(ext.form(((0, 1, 2), 1)), c)
    swap = {0: 3, 1: 4, 2: 5, 3: 0, 4: 1, 5: 2}
    forms = TorusForms(n_gen=6, omega0=omega0, beltrami=beltrami, conj_swap=swap)
    return DGLAModel(
        n1=9,
        n2=9,
        dbar=tuple(tuple(Fraction(0) for _ in range(9)) for _ in range(9)),
        bracket=(),
        forms=forms,
        label="torus",
    )


def abelian_model() -> DGLAModel:
    """Single-direction restriction of the torus (C = 0: flat fixture)."""
    m = torus_model()
    return m


def _contract_one(forms: TorusForms, coeffs, target: dict) -> dict:
    """(sum_c coeffs_c dzbar^a (x) d/dz^b) -| target."""
    out = {}
    for (a, b), coeff in zip(forms.beltrami, coeffs):
        if is_zero(QQi.of(coeff)):
            continue
        inner = ext.contract(b, target)
        piece = ext.wedge(ext.scale(ext.form((((3 + a),), 1)), QQi.of(coeff)), inner)
        out = ext.add(out, piece)
    return out


def holomorphic_form_expansion(model: DGLAModel, phi: BeltramiSeries, order: int | None = None) -> dict:
    """Taylor expansion of the holomorphic 3-form along phi(tau).

    Omega_tau = Omega_0 - (phi -| Omega_0) + 1/2 (phi^2) -| Omega_0
                - 1/6 (phi^3) -| Omega_0,

    with (phi^k) -| realized as iterated contraction / k!.  Signs follow the
    cohomology expansion's degree-1 and the diagonal degree-3 examples.
    Returns {multi-index: Form}; the model must carry contraction data.
    """
    if model.forms is None:
        raise ModelError("model has no contraction data (no form realization)")
    forms = model.forms
    cap = phi.order if order is None else order
    n = phi.n_directions
    levels = [{(0,) * n: dict(forms.omega0)}]
    for k in range(1, 4):
        prev = levels[-1]
        nxt = {}
        for pidx, coeffs in phi.terms.items():
            for index, f in prev.items():
                new_index = tuple(a + b for a, b in zip(index, pidx))
                if sum(new_index) > cap:
                    continue
                piece = _contract_one(forms, coeffs, f)
                if piece:
                    nxt[new_index] = ext.add(nxt.get(new_index, {}), piece)
        inv_k = QQi(Fraction(1, k))
        levels.append({i: ext.scale(f, inv_k) for i, f in nxt.items()})
    result = {}
    for k, level in enumerate(levels):
        sgn = QQi(Fraction((-1) ** k))
        for i, f in level.items():
            result[i] = ext.add(result.get(i, {}), ext.scale(f, sgn))
    return {i: f for i, f in result.items() if f}


def cohomology_expansion(model: DGLAModel, phi: BeltramiSeries, order: int = 2) -> dict:
    """Harmonic projections of the form expansion through total degree `order`.

    On constant-form models the harmonic projector is the identity, so the
    classes are the forms themselves; degree-1 coefficients are -[phi_i -| Omega_0].
    """
    full = holomorphic_form_expansion(model, phi, order=order)
    return {i: f for i, f in full.items() if sum(i) <= order}


# ---------------------------------------------------------------------------
# exact special geometry of the torus fixture
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusGeometry:
    """Exact Weil-Petersson data of the torus at tau = 0 for chosen directions."""

    n: int
    s_poly: MPoly          # S(tau, taubar) = i <Omega_tau, conj Omega_tau>, exact
    k_poly: MPoly          # K = -log S through total degree 4
    metric: tuple          # G_{i jbar}(0), rows of QQi
    yukawa: tuple          # C_{ijk}(0), nested tuples
    h_pairing: tuple       # h_{ij} of the (2,1)x(1,2) duality at tau = 0

    def metric_entry(self, i: int, j: int) -> QQi:
        return self.metric[i][j]

    def curvature_lhs(self, i: int, j: int, k: int, l: int) -> QQi:
        """R_{i jbar k lbar} = (d_i d_jbar d_k d_lbar K)(0) (pure 4th derivative;
        the connection terms vanish because K has no (2,1)-type cubic part)."""
        p = self.k_poly.diff(i).diff(j, bar=True).diff(k).diff(l, bar=True)
        return QQi.of(p.constant_term())


def torus_geometry(model: DGLAModel, directions) -> TorusGeometry:
    """Assemble exact K, G, C, h data for harmonic torus directions."""
    if model.forms is None:
        raise ModelError("torus geometry needs a form realization")
    forms = model.forms
    n = len(directions)
    phi = solve_maurer_cartan(model, directions, order=3)
    omega = holomorphic_form_expansion(model, phi)
    # S = i <Omega_tau, conj Omega_tau>; i-normalization makes S(0) = 1 > 0
    s = MPoly(n, 4)
    eye = QQi(0, 1)
    for idx_i, f_i in omega.items():
        for idx_j, f_j in omega.items():
            if sum(idx_i) + sum(idx_j) > 4:
                continue
            val = forms.hermitian(f_i, f_j) * eye
            if is_zero(val):
                continue
            key = tuple(idx_i) + tuple(idx_j)
            mono = MPoly(n, 4, {key: val})
            s = s + mono
    if s.constant_term() != QQi(1):
        raise ModelError("holomorphic form normalization failed: S(0) != 1")
    k_poly = -(s.log1p())
    # cubic (2,1)-type terms of K must vanish for curvature_lhs to be honest
    for i in range(n):
        for j in range(n):
            for l in range(n):
                c = k_poly.diff(i).diff(j).diff(l, bar=True).constant_term()
                if not is_zero(QQi.of(c)):
                    raise ModelError("unexpected (2,1)-cubic term in torus Kähler expansion")
    metric = tuple(
        tuple(QQi.of(k_poly.diff(i).diff(j, bar=True).constant_term()) for j in range(n))
        for i in range(n)
    )
    # Yukawa C_ijk = -i int Omega ^ ((phi_i ^ phi_j ^ phi_k) -| Omega)
    def contract_dir(i_dir, target):
        return _contract_one(forms, directions[i_dir], target)

    yuk = []
    for i in range(n):
        yi = []
        for j in range(n):
            yj = []
            for k in range(n):
                w = contract_dir(k, contract_dir(j, contract_dir(i, dict(forms.omega0))))
                val = forms.pairing(forms.omega0, w) * QQi(0, -1)
                yj.append(val)
            yi.append(tuple(yj))
        yuk.append(tuple(yi))
    # h_ij: pairing of phi_i -| Omega with the conjugate basis, Omega-normalized
    contracted = [contract_dir(i, dict(forms.omega0)) for i in range(n)]
    denom = forms.hermitian(forms.omega0, forms.omega0)
    h = tuple(
        tuple(forms.hermitian(contracted[i], contracted[j]) * QQi(0, 1) / (denom * QQi(0, 1)) for j in range(n))
        for i in range(n)
    )
    return TorusGeometry(
        n=n,
        s_poly=s,
        k_poly=k_poly,
        metric=metric,
        yukawa=yuk,
        h_pairing=h,
    )


def wp0_rhs(model: DGLAModel, directions, i: int, j: int, k: int, l: int, metric) -> QQi:
    """delta delta + delta delta - i <(phi_i ^ phi_k) -| Omega, (phi_j ^ phi_l) -| Omega>.

    Stated in a WP-orthonormal frame; `metric` supplies the delta weights for
    frames that are orthogonal but not normalized.
    """
    forms = model.forms

    def contract_dir(i_dir, target):
        return _contract_one(forms, directions[i_dir], target)

    w_ik = contract_dir(k, contract_dir(i, dict(forms.omega0)))
    w_jl = contract_dir(l, contract_dir(j, dict(forms.omega0)))
    cross = forms.hermitian(w_ik, w_jl) * QQi(0, 1)
    return metric[i][j] * metric[k][l] + metric[i][l] * metric[k][j] - cross
