"""Order-m gradings of isometry Lie algebras over residue coefficients.

A grading is carried by an invertible semilinear similitude Theta of the
formed space; conjugation by Theta is an algebra automorphism theta of the
endomorphism ring preserving both the isometry group and its Lie algebra.
The degree-j component of the Lie algebra is the zeta^{-j} eigenspace of
theta, and the degree-zero group is the theta-fixed isometry subgroup.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import linalg as la
from .algebra import root_of_unity
from .spaces import EpsHermSpace, is_isometry, lie_member


@dataclass(frozen=True)
class SemilinearOp:
    """v -> P . kappa(v) with kappa the ring involution or the identity."""

    space: EpsHermSpace
    matrix: la.Mat
    kappa: str = "identity"  # "identity" | "ring"

    def __post_init__(self):
        if self.kappa not in ("identity", "ring"):
            raise ValueError("kappa must be 'identity' or 'ring'")
        if not self.space.same_shape(self.matrix):
            raise ValueError("operator shape mismatch")
        la.mat_inv(self.space.algebra, self.matrix)  # must be invertible

    def twist(self, A: la.Mat) -> la.Mat:
        if self.kappa == "ring":
            return la.conj_entries(self.space.algebra, A)
        return A

    def apply_vec(self, v):
        alg = self.space.algebra
        if self.kappa == "ring":
            v = tuple(alg.involute(a) for a in v)
        return la.vec_matmul(alg, self.matrix, v)

    def conj(self, X: la.Mat) -> la.Mat:
        """Theta X Theta^{-1}, again a linear endomorphism."""
        alg = self.space.algebra
        return la.mmul_many(
            alg, self.matrix, self.twist(X), la.mat_inv(alg, self.matrix)
        )

    def power_matrix(self, e: int) -> la.Mat:
        """Matrix of the e-fold composite (kappa has order at most two)."""
        alg = self.space.algebra
        out = la.identity(alg, self.space.dim)
        kap = "identity"
        for _ in range(e):
            # (out, kap) o (P, kappa) composition
            P = self.matrix if kap == "identity" else la.conj_entries(alg, self.matrix)
            out = la.mmul(alg, out, P)
            kap = _kcomp(kap, self.kappa)
        return out

    def similitude(self):
        """mu with <Theta u, Theta v> = mu . kappa(<u, v>) on all basis pairs,
        or None when Theta is not a form similitude."""
        alg = self.space.algebra
        n = self.space.dim
        basis = la.identity(alg, n)
        mu = None
        for i in range(n):
            for j in range(n):
                lhs = self.space.form(self.apply_vec(basis[i]), self.apply_vec(basis[j]))
                base = self.space.form(basis[i], basis[j])
                if self.kappa == "ring":
                    base = alg.involute(base)
                if base == 0:
                    if lhs != 0:
                        return None
                    continue
                c = alg.mul(lhs, alg.inv(base))
                if mu is None:
                    mu = c
                elif mu != c:
                    return None
        return mu


def _kcomp(k1: str, k2: str) -> str:
    return "identity" if k1 == k2 else "ring"


@dataclass(frozen=True)
class GradedGroup:
    """A formed space with an order-m grading operator.

    theta is the composite similitude (inner part times optional ring
    twist); zeta is the chosen root of unity of order m in the fixed
    field, embedded in the coefficient ring.
    """

    space: EpsHermSpace
    m: int
    zeta: int
    theta: SemilinearOp

    def __post_init__(self):
        if self.theta.space is not self.space:
            raise ValueError("grading operator must act on the graded space")
        alg = self.space.algebra
        z = self.zeta
        for e in range(1, self.m):
            if z == alg.one:
                raise ValueError("zeta has order smaller than m")
            z = alg.mul(z, self.zeta)
        if z != alg.one:
            raise ValueError("zeta does not have order m")
        if self.theta.similitude() is None:
            raise ValueError("grading operator must be a form similitude")
        # conjugation must have order dividing m: Theta^m central
        P = self.theta.power_matrix(self.m)
        n = self.space.dim
        c = P[0][0]
        if not alg.is_unit(c) or P != la.scalar(alg, n, c):
            raise ValueError("grading operator does not have conjugation order m")

    @property
    def algebra(self):
        return self.space.algebra

    def zeta_power(self, j: int) -> int:
        alg = self.space.algebra
        e = j % self.m
        out = alg.one
        for _ in range(e):
            out = alg.mul(out, self.zeta)
        return out

    def degree_of(self, X: la.Mat) -> Optional[int]:
        """The j with theta(X) = zeta^{-j} X, or None if X is not graded."""
        if la.is_zero(X):
            return 0
        alg = self.space.algebra
        tX = self.theta.conj(X)
        for j in range(self.m):
            if tX == la.mscale(alg, self.zeta_power(-j), X):
                return j
        return None

    def component_basis(self, j: int, within_lie: bool = True):
        """Basis of the degree-j component over the fixed field."""
        alg = self.space.algebra
        n = self.space.dim
        F = alg.fixed_field
        zj = self.zeta_power(-j)
        ops = [lambda X: la.msub(
            alg, self.theta.conj(X), la.mscale(alg, zj, X)
        )]
        if within_lie:
            ops.append(lambda X: la.madd(alg, X, self.space.adjoint(X)))
        rows = []
        for op in ops:
            M, _ = la.operator_matrix(alg, op, n, n)
            rows.extend(M)
        return [
            la.from_entry_coords(alg, v, n, n) for v in la.kernel_basis(F, la.mat(rows))
        ]

    def lie_dims(self):
        return tuple(len(self.component_basis(j)) for j in range(self.m))

    def is_degree0_group_element(self, g: la.Mat) -> bool:
        return is_isometry(self.space, g) and self.theta.conj(g) == g

    def center_degree0_dim(self) -> int:
        """Dimension of the degree-zero part of the center of the Lie
        algebra (the part a stabilizer can never shrink)."""
        alg = self.space.algebra
        n = self.space.dim
        F = alg.fixed_field
        ctr = _center_basis(self.space)
        deg0 = self.component_basis(0)
        if not ctr or not deg0:
            return 0
        rows = [la.entry_coords(alg, B) for B in ctr + deg0]
        rk_all = la.rank(F, la.mat(rows))
        return len(ctr) + len(deg0) - rk_all


def _center_basis(space: EpsHermSpace):
    from .moment import lie_context

    ctx = lie_context(space)
    alg = space.algebra
    F = ctx.field
    # center = kernel of X -> ([X, B_1], ..., [X, B_b]) within the Lie algebra
    n = space.dim
    M, _ = la.operator_matrix(
        alg,
        lambda X: _stack_commutators(alg, X, ctx.basis),
        n,
        n,
    )
    lie_M, _ = la.operator_matrix(
        alg, lambda X: la.madd(alg, X, space.adjoint(X)), n, n
    )
    # pad the commutator stack to square blocks for the kernel computation
    full = la.mat(list(M) + list(lie_M))
    return [la.from_entry_coords(alg, v, n, n) for v in la.kernel_basis(F, full)]


def _stack_commutators(alg, X, basis):
    # represent the tuple of commutators as one wide matrix
    rows = []
    for B in basis:
        rows.extend(la.commutator(alg, X, B))
    return tuple(rows)


def build_grading(
    space: EpsHermSpace,
    m: int,
    weights,
    similitude_exponent: int = 0,
    twist: Optional[SemilinearOp] = None,
) -> GradedGroup:
    """Grading from cocharacter weights on a Witt basis.

    The operator scales e_i by zeta^{w_i}, the paired vector by
    zeta^{c - w_i} (c = similitude_exponent) and anisotropic vectors by
    zeta^{c/2}; it is a form similitude with factor zeta^c.  An optional
    extra twist is composed on the right.
    """
    if space.basis_labels is None:
        raise ValueError("grading from weights needs a Witt-basis space")
    alg = space.algebra
    F = alg.fixed_field
    zf = root_of_unity(F, m)
    zeta = alg.embed_fixed(zf)
    wlist = list(weights)
    wcount = sum(1 for lbl in space.basis_labels if lbl.startswith("+"))
    acount = sum(1 for lbl in space.basis_labels if lbl.startswith("0"))
    if len(wlist) != wcount:
        raise ValueError("one weight per hyperbolic pair")
    c = similitude_exponent
    if acount and c % 2 != 0:
        raise ValueError("odd similitude exponent needs an empty anisotropic part")
    diag = []
    for lbl in space.basis_labels:
        if lbl.startswith("+"):
            e = wlist[int(lbl[1:]) - 1]
        elif lbl.startswith("-"):
            e = c - wlist[int(lbl[1:]) - 1]
        else:
            e = c // 2
        diag.append(_zpow(alg, zeta, e))
    P = la.mat([[diag[i] if i == j else 0 for j in range(space.dim)] for i in range(space.dim)])
    op = SemilinearOp(space, P, "identity")
    if twist is not None:
        P2 = la.mmul(alg, P, twist.matrix)
        op = SemilinearOp(space, P2, twist.kappa)
    G = GradedGroup(space, m, zeta, op)
    # reject weight data whose conjugation action has order below m
    if m > 1 and all(len(G.component_basis(j)) == 0 for j in range(1, m)):
        raise ValueError("grading is trivial; adjust weights or the similitude exponent")
    return G


def _zpow(alg, zeta, e: int):
    out = alg.one
    if e >= 0:
        for _ in range(e):
            out = alg.mul(out, zeta)
    else:
        zi = alg.inv(zeta)
        for _ in range(-e):
            out = alg.mul(out, zi)
    return out


def degree0_centralizer_dim(G: GradedGroup, lam: la.Mat, mod_center: bool = False) -> int:
    """dim {Y in degree-0 Lie component : [Y, lam] = 0} over the fixed field.

    With mod_center=True the degree-zero central directions are subtracted:
    the sensible notion of ``finite stabilizer'' for types with a positive
    dimensional center.
    """
    alg = G.space.algebra
    F = alg.fixed_field
    deg0 = G.component_basis(0)
    if not deg0:
        return 0
    rows = []
    for B in deg0:
        rows.append(la.entry_coords(alg, la.commutator(alg, B, lam)))
    # kernel of the coefficient vector x -> [sum x_s B_s, lam]
    M = la.transpose(la.mat(rows))
    dim = len(la.kernel_basis(F, M))
    if mod_center:
        dim -= G.center_degree0_dim()
    return dim


def stable_candidate(G: GradedGroup, lam: la.Mat) -> bool:
    """Operational stability test for a degree -1 vector: nonzero, regular
    semisimple, and with no degree-zero centralizer beyond the center."""
    from .moment import is_regular_semisimple

    if la.is_zero(lam):
        return False
    if not lie_member(G.space, lam):
        raise ValueError("stability test needs a Lie algebra element")
    if G.degree_of(lam) != (-1) % G.m:
        return False
    if not is_regular_semisimple(G.space, lam):
        return False
    return degree0_centralizer_dim(G, lam, mod_center=True) == 0


def stable_vector_search(
    G: GradedGroup,
    limit: int = 10**6,
    rng=None,
    max_witnesses: int = 3,
    try_extension: bool = True,
) -> dict:
    """Count stable vectors in the degree minus-one slot.

    Exhaustive when the slot has at most ``limit`` points, seeded sampling
    otherwise.  When nothing stable is found over the base field and the
    coefficients are a plain prime field, the search is repeated over the
    quadratic extension to separate field-smallness from a type
    obstruction.
    """
    import itertools as it
    import random

    from . import linalg as _la
    from .algebra import make_field

    alg = G.space.algebra
    F = alg.fixed_field
    basis = G.component_basis((G.m - 1) % G.m)
    total = F.q ** len(basis)
    stable = 0
    tested = 0
    witnesses = []
    exhaustive = total <= limit
    if exhaustive:
        coeff_iter = it.product(range(F.q), repeat=len(basis))
    else:
        rng = rng or random.Random(0)
        coeff_iter = (
            tuple(rng.randrange(F.q) for _ in basis) for _ in range(limit)
        )
    for coeffs in coeff_iter:
        lam = _la.zeros(G.space.dim)
        for c, B in zip(coeffs, basis):
            if c:
                lam = _la.madd(alg, lam, _la.mscale(alg, alg.embed_fixed(c), B))
        tested += 1
        if stable_candidate(G, lam):
            stable += 1
            if len(witnesses) < max_witnesses:
                witnesses.append([list(r) for r in lam])
    out = {
        "slot_dim": len(basis),
        "tested": tested,
        "exhaustive": exhaustive,
        "stable_count": stable,
        "witnesses": witnesses,
    }
    if stable == 0 and try_extension and getattr(alg, "k", None) == 1 and \
            alg.involution_kind == "identity":
        ext = make_field(alg.p, 2)
        from .spaces import EpsHermSpace as _E

        # encodings of base-field values are unchanged in the extension
        space2 = _E(ext, G.space.eps, G.space.gram)
        theta2 = SemilinearOp(space2, G.theta.matrix, G.theta.kappa)
        try:
            G2 = GradedGroup(space2, G.m, G.zeta, theta2)
            sub = stable_vector_search(
                G2, limit=limit, rng=rng, max_witnesses=1, try_extension=False
            )
            out["extension_stable_count"] = sub["stable_count"]
            out["verdict"] = (
                "none-over-this-field"
                if sub["stable_count"]
                else "type-obstruction-at-extension"
            )
        except ValueError:
            out["verdict"] = "extension-unavailable"
    else:
        out["verdict"] = "stable-found" if stable else "none-found"
    return out
