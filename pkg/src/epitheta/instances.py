"""Builders for the standard correspondence instances, one family per
supported pair kind, at grading order two.

Each builder fixes the two formed spaces, the grading similitudes, the
rationality eigenvalue and the apartment coordinates; the map parameters
select a member of the family.  Everything is validated on construction:
similitude factors, grading orders and the rationality of the chosen map.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg as la
from .algebra import make_field, make_split_algebra
from .corresp import CorrespondenceInstance
from .grading import GradedGroup, SemilinearOp
from .lattice import ApartmentPoint
from .spaces import EpsHermSpace

Q = Fraction


def _diag(alg, entries):
    n = len(entries)
    return la.mat([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def _graded(space, theta_matrix, kappa, zeta, m=2) -> GradedGroup:
    op = SemilinearOp(space, theta_matrix, kappa)
    return GradedGroup(space, m, zeta, op)


def sp_o_odd(q: int, params=(1, 1, 1), label: str = "") -> CorrespondenceInstance:
    """(symplectic rank 1) x (odd orthogonal rank 1) at order two.

    The symplectic side carries the uniformizer-twisted form, so its
    grading operator is a similitude with factor zeta; maps are rational
    for the eigenvalue zeta.
    """
    F = make_field(q)
    one, mone = F.one, F.neg(F.one)
    a, b, c = (F.from_int(x) for x in params)
    if 0 in (a, b, c):
        raise ValueError("family parameters must be units")
    V = EpsHermSpace(F, -1, la.mat([[0, mone], [one, 0]]))
    Vp = EpsHermSpace(F, 1, la.mat([[0, 0, one], [0, one, 0], [one, 0, 0]]))
    zeta = mone
    GV = _graded(V, _diag(F, [one, mone]), "identity", zeta)
    GVp = _graded(Vp, _diag(F, [mone, one, mone]), "identity", zeta)
    w = la.mat([[a, 0], [0, b], [c, 0]])
    return CorrespondenceInstance(
        kind="Sp-O",
        picture="twisted-source",
        gradingV=GV,
        gradingVp=GVp,
        c_W=zeta,
        w_bar=w,
        pointV=ApartmentPoint("base", (Q(1, 4),)),
        pointVp=ApartmentPoint("base", (Q(1, 2),), (Q(0),)),
        label=label or f"sp2-o3-q{q}-{params}",
    )


def sp_o_even(q: int, params=(1, 1, 1, 1), label: str = "") -> CorrespondenceInstance:
    """(symplectic rank 1) x (even orthogonal rank 2) at order two."""
    F = make_field(q)
    one, mone = F.one, F.neg(F.one)
    w1, w2, w3, w4 = (F.from_int(x) for x in params)
    if 0 in (w1, w2, w3, w4):
        raise ValueError("family parameters must be units")
    V = EpsHermSpace(F, -1, la.mat([[0, mone], [one, 0]]))
    gram4 = la.mat(
        [[0, 0, 0, one], [0, 0, one, 0], [0, one, 0, 0], [one, 0, 0, 0]]
    )
    Vp = EpsHermSpace(F, 1, gram4)
    zeta = mone
    GV = _graded(V, _diag(F, [one, mone]), "identity", zeta)
    GVp = _graded(Vp, _diag(F, [mone, one, one, mone]), "identity", zeta)
    w = la.mat([[0, w1], [w2, 0], [w3, 0], [0, w4]])
    return CorrespondenceInstance(
        kind="Sp-O",
        picture="twisted-source",
        gradingV=GV,
        gradingVp=GVp,
        c_W=one,
        w_bar=w,
        pointV=ApartmentPoint("base", (Q(1, 4),)),
        pointVp=ApartmentPoint("base", (Q(0), Q(1, 2))),
        label=label or f"sp2-o4-q{q}-{params}",
    )


def o_sp(q: int, params=(1, 1), discs=(1, 1), label: str = "") -> CorrespondenceInstance:
    """(anisotropic orthogonal rank 1) x (symplectic rank 1) at order two."""
    F = make_field(q)
    one, mone = F.one, F.neg(F.one)
    a, b = (F.from_int(x) for x in params)
    if 0 in (a, b):
        raise ValueError("family parameters must be units")
    d1, d2 = (F.from_int(x) for x in discs)
    V = EpsHermSpace(F, 1, _diag(F, [d1, d2]))
    Vp = EpsHermSpace(F, -1, la.mat([[0, mone], [one, 0]]))
    zeta = mone
    GV = _graded(V, _diag(F, [one, mone]), "identity", zeta)
    GVp = _graded(Vp, _diag(F, [one, mone]), "identity", zeta)
    w = _diag(F, [a, b])
    return CorrespondenceInstance(
        kind="O-Sp",
        picture="twisted-target",
        gradingV=GV,
        gradingVp=GVp,
        c_W=one,
        w_bar=w,
        pointV=ApartmentPoint("base", (), (Q(0), Q(1, 2))),
        pointVp=ApartmentPoint("base", (Q(1, 4),)),
        label=label or f"o2-sp2-q{q}-{params}-d{discs}",
    )


def gl_gl(q: int, params=(1, 1, 1, 1), label: str = "") -> CorrespondenceInstance:
    """Equal-rank general-linear pair through the split etale algebra with
    an inner order-two grading (the residue shadow of an unramified
    quadratic pair)."""
    A = make_split_algebra(q)
    F = A.base
    one = A.one
    mone = A.neg(one)
    a1, a2, b1, b2 = (F.from_int(x) for x in params)
    if 0 in (a1, a2, b1, b2):
        raise ValueError("family parameters must be units")
    V = EpsHermSpace(A, 1, _diag(A, [one, one]))
    cform = A.encode(F.one, F.neg(F.one))  # (1, -1): skew for the swap
    Vp = EpsHermSpace(A, -1, _diag(A, [cform, cform]))
    zeta = A.embed_fixed(F.neg(F.one))
    GV = _graded(V, _diag(A, [one, mone]), "identity", zeta)
    p = cform
    GVp = _graded(Vp, _diag(A, [p, A.neg(p)]), "identity", zeta)
    w = la.mat(
        [
            [A.encode(a1, 0), A.encode(0, b1)],
            [A.encode(0, b2), A.encode(a2, 0)],
        ]
    )
    return CorrespondenceInstance(
        kind="GL-GL",
        picture="split-inner",
        gradingV=GV,
        gradingVp=GVp,
        c_W=one,
        w_bar=w,
        pointV=ApartmentPoint("unramified", (Q(0),)),
        pointVp=ApartmentPoint("unramified", (Q(1, 4),)),
        label=label or f"gl2-gl2-q{q}-{params}",
    )


def u_u(q: int, params=(1, 1, 1, 1), label: str = "") -> CorrespondenceInstance:
    """Equal-rank rank-two unitary pair over a ramified quadratic shadow:
    split etale algebra with the swap implemented by the grading twist.

    Parameters (t1, t2, s1, s2) select the rational map; the exceptional
    pattern occurs exactly on the locus s1 t2 = s2 t1.
    """
    A = make_split_algebra(q)
    F = A.base
    one = A.one
    t1, t2, s1, s2 = (F.from_int(x) for x in params)
    if 0 in (t1, t2, s1, s2):
        raise ValueError("family parameters must be units")
    V = EpsHermSpace(A, 1, la.mat([[0, one], [one, 0]]))
    Bp = la.mat([[0, one], [A.neg(one), 0]])
    Vp = EpsHermSpace(A, -1, Bp)
    zeta = A.embed_fixed(F.neg(F.one))
    GV = _graded(V, la.identity(A, 2), "ring", zeta)
    GVp = _graded(Vp, _diag(A, [A.neg(one), one]), "ring", zeta)
    w = la.mat(
        [
            [A.encode(t1, F.neg(t1)), A.encode(t2, F.neg(t2))],
            [A.encode(s1, s1), A.encode(s2, s2)],
        ]
    )
    return CorrespondenceInstance(
        kind="U-U",
        picture="ramified-swap",
        gradingV=GV,
        gradingVp=GVp,
        c_W=one,
        w_bar=w,
        pointV=ApartmentPoint("ramified", (Q(0),)),
        pointVp=ApartmentPoint("ramified", (Q(1, 4),)),
        label=label or f"u2-u2-q{q}-{params}",
    )


def u_u_rank1(q: int, params=(1,), label: str = "") -> CorrespondenceInstance:
    """Rank-one unitary pair over a ramified quadratic shadow."""
    A = make_split_algebra(q)
    F = A.base
    one = A.one
    (t,) = (F.from_int(x) for x in params)
    if t == 0:
        raise ValueError("family parameter must be a unit")
    V = EpsHermSpace(A, 1, la.mat([[one]]))
    Vp = EpsHermSpace(A, -1, la.mat([[A.encode(F.one, F.neg(F.one))]]))
    zeta = A.embed_fixed(F.neg(F.one))
    GV = _graded(V, la.identity(A, 1), "ring", zeta)
    GVp = _graded(Vp, la.mat([[A.neg(one)]]), "ring", zeta)
    w = la.mat([[A.encode(t, F.neg(t))]])
    return CorrespondenceInstance(
        kind="U-U",
        picture="ramified-swap",
        gradingV=GV,
        gradingVp=GVp,
        c_W=one,
        w_bar=w,
        pointV=ApartmentPoint("ramified", (), (Q(0),)),
        pointVp=ApartmentPoint("ramified", (), (Q(1, 4),)),
        label=label or f"u1-u1-q{q}-{params}",
    )


def standard_suite(q: int = 3):
    """The bundled verification suite: at least three stable instances per
    supported pair kind, plus the exceptional unitary instance."""
    insts = [
        sp_o_odd(q, (1, 1, 1)),
        sp_o_odd(q, (1, 2, 1)),
        sp_o_odd(q, (2, 1, 2)),
        sp_o_even(q, (1, 1, 1, 1)),
        o_sp(q, (1, 1)),
        o_sp(q, (1, 2)),
        o_sp(q, (2, 2), discs=(1, 2)),
        gl_gl(q, (1, 1, 1, 1)),
        gl_gl(q, (1, 2, 1, 1)),
        gl_gl(q, (2, 1, 1, 2)),
        u_u_rank1(q, (1,)),
        u_u_rank1(q, (2,)),
        u_u(q, (1, 1, 1, 2)),  # full-rank image: ordinary pattern
        u_u(q, (1, 1, 1, 1)),  # rank-deficient image: exceptional pattern
    ]
    return insts


BUILDERS = {
    "sp-o-odd": sp_o_odd,
    "sp-o-even": sp_o_even,
    "o-sp": o_sp,
    "gl-gl": gl_gl,
    "u-u": u_u,
    "u-u-rank1": u_u_rank1,
}
