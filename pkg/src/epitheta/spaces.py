"""Formed spaces over residue coefficient rings.

An EpsHermSpace is a free module with an epsilon-hermitian sesquilinear
form given by an explicit Gram matrix: <u, v> = involute(u)^T . G . v.
The conjugation induced on endomorphisms, the star operator on maps
between two formed spaces, and the invariant trace form live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import linalg as la
from .algebra import SplitAlgebra


@dataclass(frozen=True)
class EpsHermSpace:
    """A formed space: coefficient ring, sign epsilon, Gram matrix.

    basis_labels partitions indices into hyperbolic pairs and an
    anisotropic block when the space was built from a Witt basis; spaces
    with ad hoc Gram matrices leave it None.
    """

    algebra: object
    eps: int
    gram: la.Mat
    basis_labels: Optional[tuple] = None

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")
        n = len(self.gram)
        if any(len(row) != n for row in self.gram):
            raise ValueError("gram matrix must be square")
        ct = la.conj_transpose(self.algebra, self.gram)
        expect = self.gram if self.eps == 1 else la.mneg(self.algebra, self.gram)
        if ct != expect:
            raise ValueError("gram matrix is not eps-hermitian for this involution")
        try:
            gi = la.mat_inv(self.algebra, self.gram)
        except ZeroDivisionError as e:
            raise ValueError("gram matrix is degenerate") from e
        object.__setattr__(self, "_gram_inv", gi)

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def gram_inv(self) -> la.Mat:
        return self._gram_inv

    def form(self, u, v):
        """<u, v> for coordinate vectors u, v."""
        alg = self.algebra
        gu = la.vec_matmul(alg, self.gram, v)
        s = 0
        for ui, gv in zip(u, gu):
            s = alg.add(s, alg.mul(alg.involute(ui), gv))
        return s

    def adjoint(self, X: la.Mat) -> la.Mat:
        """X* with <X u, v> = <u, X* v>."""
        alg = self.algebra
        return la.mmul_many(alg, self._gram_inv, la.conj_transpose(alg, X), self.gram)

    def same_shape(self, X: la.Mat) -> bool:
        return len(X) == self.dim and all(len(r) == self.dim for r in X)

    def describe(self) -> dict:
        return {
            "algebra": self.algebra.describe(),
            "eps": self.eps,
            "dim": self.dim,
            "gram": [list(r) for r in self.gram],
        }


def witt_basis(
    algebra,
    dim: int,
    eps: int,
    witt_index: int,
    anisotropic_discs=(),
) -> EpsHermSpace:
    """Standard formed space: hyperbolic pairs <e_i, e_{-j}> = delta_ij plus
    a diagonal anisotropic block.

    Basis order is (e_1..e_w, anisotropic, e_{-w}..e_{-1}), which makes the
    hyperbolic part of the Gram matrix antidiagonal.
    """
    w = witt_index
    discs = tuple(anisotropic_discs)
    if 2 * w + len(discs) != dim:
        raise ValueError("witt index and anisotropic part do not fill the dimension")
    for d in discs:
        if not algebra.is_unit(d):
            raise ValueError("anisotropic entries must be units")
        if d != algebra.mul(algebra.from_int(eps), algebra.involute(d)):
            raise ValueError(
                "anisotropic entry %r is incompatible with eps=%+d under this involution"
                % (d, eps)
            )
    if eps == -1 and algebra.involution_kind == "identity" and discs:
        # alternating forms have no anisotropic vectors
        raise ValueError("eps=-1 with identity involution admits no anisotropic part")
    n = dim
    rows = [[0] * n for _ in range(n)]
    one = algebra.one
    e = algebra.from_int(eps)
    for i in range(w):
        rows[i][n - 1 - i] = one
        rows[n - 1 - i][i] = e
    for t, d in enumerate(discs):
        rows[w + t][w + t] = d
    labels = tuple(
        ["+%d" % (i + 1) for i in range(w)]
        + ["0%d" % (t + 1) for t in range(len(discs))]
        + ["-%d" % (w - i) for i in range(w)]
    )
    return EpsHermSpace(algebra, eps, la.mat(rows), labels)


def symplectic_space(algebra, n2: int) -> EpsHermSpace:
    if n2 % 2:
        raise ValueError("symplectic spaces are even dimensional")
    return witt_basis(algebra, n2, -1, n2 // 2)


def split_orthogonal_space(algebra, n: int) -> EpsHermSpace:
    """Maximal-Witt-index quadratic space of dimension n."""
    return witt_basis(algebra, n, 1, n // 2, (algebra.one,) if n % 2 else ())


@dataclass(frozen=True)
class FormedMap:
    """A module map between formed spaces, as a target x source matrix."""

    source: EpsHermSpace
    target: EpsHermSpace
    matrix: la.Mat

    def __post_init__(self):
        if self.source.algebra is not self.target.algebra:
            raise ValueError("source and target must share the coefficient ring")
        n, m = la.shape(self.matrix)
        if (n, m) != (self.target.dim, self.source.dim):
            raise ValueError("matrix shape does not match the spaces")

    @property
    def algebra(self):
        return self.source.algebra

    def __call__(self, v):
        return la.vec_matmul(self.algebra, self.matrix, v)


def star(w: FormedMap) -> FormedMap:
    """The form-adjoint V' -> V of w: <w v, v'> = <v, star(w) v'>."""
    alg = w.algebra
    m = la.mmul_many(
        alg,
        w.source.gram_inv,
        la.conj_transpose(alg, w.matrix),
        w.target.gram,
    )
    return FormedMap(w.target, w.source, m)


def star_matrix(space: EpsHermSpace, space2: EpsHermSpace, m: la.Mat) -> la.Mat:
    """star on raw matrices, for enumeration-heavy call sites."""
    alg = space.algebra
    return la.mmul_many(alg, space.gram_inv, la.conj_transpose(alg, m), space2.gram)


def is_isometry(space: EpsHermSpace, g: la.Mat) -> bool:
    """g g* = 1, equivalently g preserves the form."""
    if not space.same_shape(g):
        raise ValueError("shape mismatch")
    alg = space.algebra
    return la.mmul(alg, g, space.adjoint(g)) == la.identity(alg, space.dim)


def similitude_factor(space: EpsHermSpace, g: la.Mat):
    """c with <g u, g v> = c <u, v>, or None if g is not a similitude."""
    alg = space.algebra
    prod = la.mmul_many(alg, la.conj_transpose(alg, g), space.gram, g)
    n = space.dim
    cand = None
    for i in range(n):
        for j in range(n):
            if space.gram[i][j] != 0:
                c = alg.mul(prod[i][j], alg.inv(space.gram[i][j]))
                if cand is None:
                    cand = c
                elif cand != c:
                    return None
    if cand is None:
        return None
    if prod != la.mscale(alg, cand, space.gram):
        return None
    return cand


def lie_member(space: EpsHermSpace, X: la.Mat) -> bool:
    """X + X* = 0."""
    if not space.same_shape(X):
        raise ValueError("shape mismatch")
    alg = space.algebra
    return la.is_zero(la.madd(alg, X, space.adjoint(X)))


def lie_basis(space: EpsHermSpace):
    """Basis of {X : X + X* = 0} over the fixed field of the involution."""
    alg = space.algebra
    n = space.dim
    op = lambda X: la.madd(alg, X, space.adjoint(X))
    M, _ = la.operator_matrix(alg, op, n, n)
    F = alg.fixed_field
    return [la.from_entry_coords(alg, v, n, n) for v in la.kernel_basis(F, M)]


def trace_form(space: EpsHermSpace, X1: la.Mat, X2: la.Mat):
    """B(X1, X2) = (1/2) tr_{ring/fixed} tr(X2* X1), valued in the fixed field.

    The one-half factor is part of the normalization; both arguments are
    required to satisfy the skew condition.
    """
    alg = space.algebra
    for X in (X1, X2):
        if not lie_member(space, X):
            raise ValueError("trace form arguments must satisfy X + X* = 0")
    t = la.trace(alg, la.mmul(alg, space.adjoint(X2), X1))
    F = alg.fixed_field
    half = F.inv(F.from_int(2))
    return F.mul(half, alg.reltrace(t))


def pairing(source: EpsHermSpace, target: EpsHermSpace, w1: la.Mat, w2: la.Mat):
    """<w1, w2> = tr_{ring/fixed} tr(star(w2) w1): the symplectic pairing on
    Hom(V, V') pulled back from the tensor-product symplectic space."""
    alg = source.algebra
    t = la.trace(alg, la.mmul(alg, star_matrix(source, target, w2), w1))
    return alg.reltrace(t)


def cayley_param(space: EpsHermSpace, X: la.Mat) -> la.Mat:
    """g = (1 + X)(1 - X)^{-1}: an isometry for X in the Lie algebra."""
    alg = space.algebra
    one = la.identity(alg, space.dim)
    return la.mmul(alg, la.madd(alg, one, X), la.mat_inv(alg, la.msub(alg, one, X)))


def random_lie_element(space: EpsHermSpace, rng) -> la.Mat:
    basis = _lie_basis_cached(space)
    alg = space.algebra
    F = alg.fixed_field
    out = la.zeros(space.dim)
    for B in basis:
        c = rng.randrange(F.q)
        if c:
            out = la.madd(alg, out, la.mscale(alg, alg.embed_fixed(c), B))
    return out


def random_isometry(space: EpsHermSpace, rng) -> la.Mat:
    """Random isometry through the Cayley chart (plus occasional -1 twist)."""
    alg = space.algebra
    while True:
        X = random_lie_element(space, rng)
        one = la.identity(alg, space.dim)
        try:
            g = cayley_param(space, X)
        except ZeroDivisionError:
            continue
        if rng.randrange(2):
            g = la.mneg(alg, g)
        return g


_LIE_BASIS_CACHE: dict = {}


def _lie_basis_cached(space: EpsHermSpace):
    key = (id(space.algebra), space.eps, space.gram)
    if key not in _LIE_BASIS_CACHE:
        _LIE_BASIS_CACHE[key] = lie_basis(space)
    return _LIE_BASIS_CACHE[key]
