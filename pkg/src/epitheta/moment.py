"""Moment maps for a residue dual pair and the tests built on them.

Conventions, asserted by a one-time self test:
  * the unprimed group acts on maps by w -> w g^{-1}, the primed one by
    w -> g' w, so the infinitesimal actions are X.w = -wX and X'.w = X'w;
  * M(w) = star(w) w lands in the unprimed Lie algebra, M'(w) = w star(w)
    in the primed one, and <X.w, w> = 2 B(M(w), X).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg as la
from .algebra import DualAlgebra, SplitAlgebra
from .spaces import (
    EpsHermSpace,
    FormedMap,
    lie_basis,
    lie_member,
    pairing,
    star,
    star_matrix,
    trace_form,
)


@dataclass(frozen=True)
class MomentSetting:
    """A residue dual pair: two formed spaces with opposite signs over the
    same coefficient ring, acting on the maps between them."""

    V: EpsHermSpace
    Vp: EpsHermSpace

    def __post_init__(self):
        if self.V.algebra is not self.Vp.algebra:
            raise ValueError("the two spaces must share the coefficient ring")
        if self.V.eps != -self.Vp.eps:
            raise ValueError("a dual pair needs opposite form signs")
        _check_action_convention(self)

    @property
    def algebra(self):
        return self.V.algebra

    def map_from(self, matrix: la.Mat) -> FormedMap:
        return FormedMap(self.V, self.Vp, matrix)

    def dim_W(self) -> int:
        return self.V.dim * self.Vp.dim


def moment_M(setting: MomentSetting, w: la.Mat) -> la.Mat:
    """M(w) = star(w) w, an element of the unprimed Lie algebra."""
    ws = star_matrix(setting.V, setting.Vp, w)
    return la.mmul(setting.algebra, ws, w)


def moment_Mp(setting: MomentSetting, w: la.Mat) -> la.Mat:
    """M'(w) = w star(w), an element of the primed Lie algebra."""
    ws = star_matrix(setting.V, setting.Vp, w)
    return la.mmul(setting.algebra, w, ws)


def act_unprimed(setting: MomentSetting, g: la.Mat, w: la.Mat) -> la.Mat:
    return la.mmul(setting.algebra, w, la.mat_inv(setting.algebra, g))


def act_primed(setting: MomentSetting, gp: la.Mat, w: la.Mat) -> la.Mat:
    return la.mmul(setting.algebra, gp, w)


def lie_act_unprimed(setting: MomentSetting, X: la.Mat, w: la.Mat) -> la.Mat:
    return la.mneg(setting.algebra, la.mmul(setting.algebra, w, X))


def lie_act_primed(setting: MomentSetting, Xp: la.Mat, w: la.Mat) -> la.Mat:
    return la.mmul(setting.algebra, Xp, w)


_CONVENTION_OK: set = set()


def _check_action_convention(setting: MomentSetting):
    """One-time sanity check that the sign convention for the infinitesimal
    action matches the pairing identity; aborts loudly otherwise."""
    if isinstance(setting.V.algebra, DualAlgebra):
        return
    key = (id(setting.V.algebra), setting.V.gram, setting.Vp.gram)
    if key in _CONVENTION_OK:
        return
    alg = setting.V.algebra
    import random

    rng = random.Random(0xC0FFEE)
    Xs = lie_basis(setting.V)
    n, m = setting.Vp.dim, setting.V.dim
    for _ in range(4):
        w = tuple(
            tuple(rng.randrange(alg.order) for _ in range(m)) for _ in range(n)
        )
        Mw = la.mmul(alg, star_matrix(setting.V, setting.Vp, w), w)
        for X in Xs[: min(3, len(Xs))]:
            lhs = pairing(setting.V, setting.Vp, la.mneg(alg, la.mmul(alg, w, X)), w)
            F = alg.fixed_field
            rhs = F.mul(F.from_int(2), trace_form(setting.V, Mw, X))
            if lhs != rhs:
                raise AssertionError(
                    "moment-map action convention failed its self test; "
                    "the infinitesimal action sign is inconsistent with the "
                    "pairing identity for this configuration"
                )
    _CONVENTION_OK.add(key)


def pairing_identities_check(setting: MomentSetting, rng=None, samples: int = 0) -> dict:
    """Verify the defining pairing identities, exhaustively when the space
    of maps is small enough, by sampling otherwise.

    Checks, for maps w and Lie algebra elements X, X':
      <X.w, w>  = 2 B(M(w), X)
      <X'.w, w> = 2 B'(-M'(w), X')
    plus skewness and nondegeneracy of the pairing on a basis.
    """
    alg = setting.algebra
    F = alg.fixed_field
    n, m = setting.Vp.dim, setting.V.dim
    XV = lie_basis(setting.V)
    XVp = lie_basis(setting.Vp)
    failures = []
    two = F.from_int(2)

    def one_check(w):
        Mw = moment_M(setting, w)
        Mpw = moment_Mp(setting, w)
        for X in XV:
            lhs = pairing(setting.V, setting.Vp, lie_act_unprimed(setting, X, w), w)
            rhs = F.mul(two, trace_form(setting.V, Mw, X))
            if lhs != rhs:
                failures.append(("unprimed", w, X, lhs, rhs))
                return
        for Xp in XVp:
            lhs = pairing(setting.V, setting.Vp, lie_act_primed(setting, Xp, w), w)
            rhs = F.mul(two, trace_form(setting.Vp, la.mneg(alg, Mpw), Xp))
            if lhs != rhs:
                failures.append(("primed", w, Xp, lhs, rhs))
                return

    total = alg.order ** (n * m)
    exhaustive = samples <= 0 or total <= samples
    count = 0
    if exhaustive:
        for w in _all_matrices(alg, n, m):
            one_check(w)
            count += 1
            if failures:
                break
    else:
        for _ in range(samples):
            w = tuple(
                tuple(rng.randrange(alg.order) for _ in range(m)) for _ in range(n)
            )
            one_check(w)
            count += 1
            if failures:
                break
    skew = _pairing_is_alternating(setting)
    nondeg = _pairing_is_nondegenerate(setting)
    return {
        "checked": count,
        "exhaustive": exhaustive,
        "alternating": skew,
        "nondegenerate": nondeg,
        "counterexamples": failures,
        "ok": not failures and skew and nondeg,
    }


def _all_matrices(alg, n, m):
    import itertools

    for flat in itertools.product(alg.elements(), repeat=n * m):
        yield tuple(flat[i * m : (i + 1) * m] for i in range(n))


def _basis_maps(alg, n, m):
    out = []
    d = alg.fixed_dim
    F = alg.fixed_field
    for i in range(n):
        for j in range(m):
            for t in range(d):
                coords = [0] * d
                coords[t] = F.one
                e = alg.from_fixed_coords(tuple(coords))
                rows = [[0] * m for _ in range(n)]
                rows[i][j] = e
                out.append(la.mat(rows))
    return out


def _pairing_is_alternating(setting) -> bool:
    alg = setting.algebra
    basis = _basis_maps(alg, setting.Vp.dim, setting.V.dim)
    F = alg.fixed_field
    for i, w1 in enumerate(basis):
        if pairing(setting.V, setting.Vp, w1, w1) != 0:
            return False
        for w2 in basis[i + 1 :]:
            a = pairing(setting.V, setting.Vp, w1, w2)
            b = pairing(setting.V, setting.Vp, w2, w1)
            if F.add(a, b) != 0:
                return False
    return True


def _pairing_is_nondegenerate(setting) -> bool:
    alg = setting.algebra
    F = alg.fixed_field
    basis = _basis_maps(alg, setting.Vp.dim, setting.V.dim)
    G = tuple(
        tuple(pairing(setting.V, setting.Vp, w1, w2) for w2 in basis) for w1 in basis
    )
    return la.rank(F, G) == len(basis)


# -- regular semisimplicity via the adjoint characteristic polynomial ----


def lie_rank(space: EpsHermSpace) -> int:
    """Rank of the isometry Lie algebra of the space.

    Unitary and general-linear shadows have rank equal to the module rank;
    symplectic and orthogonal ones have rank floor(dim/2).
    """
    if isinstance(space.algebra, SplitAlgebra):
        return space.dim
    if space.algebra.involution_kind == "frobenius":
        return space.dim
    return space.dim // 2


class LieContext:
    """Cached basis, coordinate solver and structure constants for the
    isometry Lie algebra of a formed space."""

    def __init__(self, space: EpsHermSpace):
        self.space = space
        alg = space.algebra
        F = alg.fixed_field
        self.field = F
        self.basis = lie_basis(space)
        b = len(self.basis)
        A = la.mat([la.entry_coords(alg, B) for B in self.basis])  # b x D
        At = la.transpose(A)
        _, pivots = la.rref(F, la.transpose(At))
        # pivot coordinate positions give an invertible square slice
        self.rows = pivots
        square = la.mat([[At[i][j] for j in range(b)] for i in self.rows])
        self.solver = la.mat_inv(F, square)
        self.dim = b

    def coefficients(self, C: la.Mat):
        alg = self.space.algebra
        coords = la.entry_coords(alg, C)
        sel = tuple(coords[i] for i in self.rows)
        return la.vec_matmul(self.field, self.solver, sel)

    def from_coefficients(self, xs):
        alg = self.space.algebra
        out = la.zeros(self.space.dim)
        for c, B in zip(xs, self.basis):
            if c:
                out = la.madd(alg, out, la.mscale(alg, alg.embed_fixed(c), B))
        return out

    def structure_tensor(self):
        """T[s][t][k] with [B_s, B_k] = sum_t T[s][t][k] B_t."""
        if not hasattr(self, "_T"):
            alg = self.space.algebra
            b = self.dim
            T = []
            for s in range(b):
                rows = []
                for k in range(b):
                    C = la.commutator(alg, self.basis[s], self.basis[k])
                    rows.append(self.coefficients(C))
                # rows[k][t] -> T[s][t][k]
                T.append(tuple(zip(*rows)))
            self._T = tuple(T)
        return self._T


_LIE_CTX_CACHE: dict = {}


def lie_context(space: EpsHermSpace) -> LieContext:
    key = (id(space.algebra), space.eps, space.gram)
    if key not in _LIE_CTX_CACHE:
        _LIE_CTX_CACHE[key] = LieContext(space)
    return _LIE_CTX_CACHE[key]


def ad_matrix(space: EpsHermSpace, X: la.Mat):
    """Matrix of ad X on the Lie algebra over the fixed field."""
    ctx = lie_context(space)
    F = ctx.field
    xs = ctx.coefficients(X)
    if ctx.from_coefficients(xs) != X:
        raise ValueError("ad X needs a Lie algebra element")
    T = ctx.structure_tensor()
    b = ctx.dim
    out = [[0] * b for _ in range(b)]
    for s, c in enumerate(xs):
        if not c:
            continue
        Ts = T[s]
        for t in range(b):
            row = out[t]
            Trow = Ts[t]
            for k in range(b):
                if Trow[k]:
                    row[k] = F.add(row[k], F.mul(c, Trow[k]))
    return la.mat(out)


def invariant_P(space: EpsHermSpace, X: la.Mat):
    """Coefficient of z^rank in det(zI + ad X), over the fixed field.

    Nonvanishing characterizes the regular semisimple locus.
    """
    if not lie_member(space, X):
        raise ValueError("invariant_P needs a Lie algebra element")
    F = space.algebra.fixed_field
    K = ad_matrix(space, X)
    negK = la.mneg(F, K)
    coeffs = la.charpoly(F, negK)  # det(zI + adX), leading first
    r = lie_rank(space)
    return coeffs[len(K) - r]


def is_regular_semisimple(space: EpsHermSpace, X: la.Mat) -> bool:
    return invariant_P(space, X) != 0


def centralizer_defect(space: EpsHermSpace, X: la.Mat) -> int:
    """Independent regularity oracle: dimension of the generalized null
    space of ad X minus the rank.  Zero exactly on the regular semisimple
    locus."""
    F = space.algebra.fixed_field
    K = ad_matrix(space, X)
    return la.generalized_null_dim(F, K) - lie_rank(space)


def diagonal_P_gl(field, entries):
    """Closed form of the invariant on diagonal general-linear elements:
    the product of all pairwise differences."""
    out = field.one
    n = len(entries)
    for i in range(n):
        for j in range(n):
            if i != j:
                out = field.mul(out, field.sub(entries[i], entries[j]))
    return out


def diagonal_P_sp(field, entries):
    """Closed form on diag(a, -a) symplectic elements:
    prod_{i != j} (a_i^2 - a_j^2) * prod_j (-4 a_j^2)."""
    out = field.one
    sq = [field.mul(a, a) for a in entries]
    n = len(entries)
    for i in range(n):
        for j in range(n):
            if i != j:
                out = field.mul(out, field.sub(sq[i], sq[j]))
    m4 = field.neg(field.from_int(4))
    for j in range(n):
        out = field.mul(out, field.mul(m4, sq[j]))
    return out


def diagonal_P_so_even(field, entries):
    out = field.one
    sq = [field.mul(a, a) for a in entries]
    n = len(entries)
    for i in range(n):
        for j in range(n):
            if i != j:
                out = field.mul(out, field.sub(sq[i], sq[j]))
    return out


def diagonal_P_so_odd(field, entries):
    out = diagonal_P_so_even(field, entries)
    for a in entries:
        out = field.mul(out, field.neg(field.mul(a, a)))
    return out


# -- Cayley transform and the first-order character identity ------------


def cayley(space: EpsHermSpace, g: la.Mat) -> la.Mat:
    """c(g) = 2 (g - 1)(g + 1)^{-1}; lands in the Lie algebra on isometries."""
    alg = space.algebra
    one = la.identity(alg, len(g))
    try:
        inv = la.mat_inv(alg, la.madd(alg, g, one))
    except ZeroDivisionError:
        raise ZeroDivisionError("cayley transform undefined: g + 1 is singular")
    two = alg.from_int(2)
    return la.mscale(alg, two, la.mmul(alg, la.msub(alg, g, one), inv))


def _dual_setting(setting: MomentSetting) -> MomentSetting:
    alg = setting.algebra
    if isinstance(alg, (SplitAlgebra, DualAlgebra)) or alg.involution_kind != "identity":
        raise ValueError("first-order checks run over plain field coefficients")
    D = DualAlgebra(alg)
    V = EpsHermSpace(D, setting.V.eps, setting.V.gram)
    Vp = EpsHermSpace(D, setting.Vp.eps, setting.Vp.gram)
    return MomentSetting(V, Vp)


def first_order_osc_check(setting: MomentSetting, X: la.Mat, w: la.Mat) -> bool:
    """First-order shadow of the oscillator character identity.

    Working over dual numbers with g = 1 + eps X (X in the Lie algebra),
    both sides of  (1/2) <(g-1)w, w> = B(M(w), c(g))  are computed exactly
    and compared.
    """
    dsetting = _dual_setting(setting)
    D = dsetting.algebra
    one = la.identity(D, setting.V.dim)
    Xd = la.mscale(D, D.eps(), X)
    g = la.madd(D, one, Xd)
    # the action of g on a map is w g^{-1}, so (g - 1)w = w(g^{-1} - 1)
    gm1w = la.mmul(D, w, la.msub(D, la.mat_inv(D, g), one))
    half = D.inv(D.from_int(2))
    lhs = D.mul(half, pairing(dsetting.V, dsetting.Vp, gm1w, w))
    Mw = moment_M(dsetting, w)
    cg = cayley(dsetting.V, g)
    rhs = trace_form(dsetting.V, Mw, cg)
    return lhs == rhs


# -- batched sampling checks (prime fixed field) ------------------------


def _prime_batch_data(space: EpsHermSpace):
    import numpy as np

    alg = space.algebra
    F = alg.fixed_field
    if F.k != 1:
        raise ValueError("batched checks need a prime fixed field")
    ctx = lie_context(space)
    basis = np.array(
        [la.entry_coords(alg, B) for B in ctx.basis], dtype=np.int64
    )  # (b, D) fixed-field coordinates
    return ctx, basis


def sampled_identity_check(setting: MomentSetting, samples: int, seed: int) -> dict:
    """Batched check of the two pairing identities on random (X, X', w).

    Both sides are evaluated through the matrix formulas they are defined
    by (star through the Gram matrices on one side, the conjugation
    adjoint on the other), entirely over the prime field.
    """
    import numpy as np

    alg = setting.algebra
    if alg.fixed_dim != 1 or alg.fixed_field.k != 1:
        raise ValueError("sampled batch check supports plain prime fields")
    p = alg.p
    rng = np.random.default_rng(seed)
    n, npr = setting.V.dim, setting.Vp.dim
    GVi = np.array(setting.V.gram_inv, dtype=np.int64)
    GV = np.array(setting.V.gram, dtype=np.int64)
    GVp = np.array(setting.Vp.gram, dtype=np.int64)
    GVpi = np.array(setting.Vp.gram_inv, dtype=np.int64)
    bV = np.array([B for B in lie_basis(setting.V)], dtype=np.int64)
    bVp = np.array([B for B in lie_basis(setting.Vp)], dtype=np.int64)
    w = rng.integers(0, p, size=(samples, npr, n), dtype=np.int64)
    cV = rng.integers(0, p, size=(samples, bV.shape[0]), dtype=np.int64)
    cVp = rng.integers(0, p, size=(samples, bVp.shape[0]), dtype=np.int64)
    X = np.einsum("bs,sij->bij", cV, bV) % p
    Xp = np.einsum("bs,sij->bij", cVp, bVp) % p
    S = np.einsum("ij,bkj,kl->bil", GVi, w, GVp) % p  # star(w)
    M = np.einsum("bij,bjk->bik", S, w) % p
    Mp = np.einsum("bij,bjk->bik", w, S) % p
    inv2 = pow(2, p - 2, p)
    # <X.w, w> = tr(star(w) . (-wX))
    lhs = (-np.einsum("bij,bjk,bki->b", S, w, X)) % p
    # 2 B(M, X) = tr(X* M) with X* = GVi X^T GV
    Xstar = np.einsum("ij,bkj,kl->bil", GVi, X, GV) % p
    rhs = np.einsum("bij,bji->b", Xstar, M) % p
    ok1 = bool((lhs == rhs).all())
    # <X'.w, w> = tr(star(w) . X'w);  2 B'(-M', X') = -tr(X'* M')
    lhs2 = np.einsum("bij,bjk,bki->b", S, Xp, w) % p
    Xpstar = np.einsum("ij,bkj,kl->bil", GVpi, Xp, GVp) % p
    rhs2 = (-np.einsum("bij,bji->b", Xpstar, Mp)) % p
    ok2 = bool((lhs2 == rhs2).all())
    # equivariance on a fresh batch of isometries through the Cayley chart
    okeq = _sampled_equivariance(setting, samples // 4 + 1, seed + 1)
    return {
        "samples": samples,
        "unprimed_identity": ok1,
        "primed_identity": ok2,
        "equivariance": okeq,
        "ok": ok1 and ok2 and okeq,
    }


def _sampled_equivariance(setting: MomentSetting, samples: int, seed: int) -> bool:
    import random

    from .spaces import random_isometry

    rng = random.Random(seed)
    alg = setting.algebra
    n, npr = setting.V.dim, setting.Vp.dim
    for _ in range(samples):
        w = tuple(
            tuple(rng.randrange(alg.order) for _ in range(n)) for _ in range(npr)
        )
        g = random_isometry(setting.V, rng)
        gp = random_isometry(setting.Vp, rng)
        wg = la.mmul_many(alg, gp, w, la.mat_inv(alg, g))
        lhs = moment_M(setting, wg)
        rhs = la.mmul_many(alg, g, moment_M(setting, w), la.mat_inv(alg, g))
        if lhs != rhs:
            return False
        lhsp = moment_Mp(setting, wg)
        rhsp = la.mmul_many(alg, gp, moment_Mp(setting, w), la.mat_inv(alg, gp))
        if lhsp != rhsp:
            return False
    return True


def rs_agreement_batched(space: EpsHermSpace, samples: int, seed: int) -> dict:
    """Agreement of the invariant-coefficient test with the generalized
    null space oracle on random Lie algebra elements, batched over the
    prime fixed field."""
    import numpy as np

    ctx, basis = _prime_batch_data(space)
    F = ctx.field
    p = F.p
    b = ctx.dim
    rng = np.random.default_rng(seed)
    T = np.array(ctx.structure_tensor(), dtype=np.int64)  # (b, b, b)
    coeffs = rng.integers(0, p, size=(samples, b), dtype=np.int64)
    ads = np.einsum("bs,stk->btk", coeffs, T) % p
    r = lie_rank(space)
    cp = la.charpoly_batched_fp(p, (-ads) % p)  # det(zI + ad X)
    P_vals = cp[:, b - r]
    e = 1
    P2 = ads
    while e < b:
        P2 = np.einsum("bij,bjk->bik", P2, P2) % p
        e *= 2
    gnull = b - la.rank_batched_fp(p, P2)
    agree = (P_vals != 0) == (gnull == r)
    mism = int((~agree).sum())
    return {
        "samples": samples,
        "rank": r,
        "dim": b,
        "regular_semisimple_count": int((P_vals != 0).sum()),
        "mismatches": mism,
        "ok": mism == 0,
    }


def sampled_osc_check(setting: MomentSetting, samples: int, seed: int) -> dict:
    """Seeded sampling of the first-order character identity."""
    import random

    rng = random.Random(seed)
    alg = setting.algebra
    n, npr = setting.V.dim, setting.Vp.dim
    from .spaces import lie_basis as lb

    basis = lb(setting.V)
    bad = 0
    for _ in range(samples):
        w = tuple(
            tuple(rng.randrange(alg.order) for _ in range(n)) for _ in range(npr)
        )
        X = la.zeros(n)
        for B in basis:
            c = rng.randrange(alg.order)
            if c:
                X = la.madd(alg, X, la.mscale(alg, c, B))
        if not first_order_osc_check(setting, X, w):
            bad += 1
    return {"samples": samples, "failures": bad, "ok": bad == 0}
