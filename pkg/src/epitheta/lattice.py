"""Self-dual lattice functions through apartment coordinates.

A point of the apartment is a coordinate vector: one rational per
hyperbolic pair (the paired coordinate is its negative) and one per
anisotropic basis vector.  Everything the verifier consumes (jump sets,
graded dimensions, residue group shapes, valuation bounds) is a function
of these coordinates, so lattices are never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

HALF = Fraction(1, 2)

# residue shadows of the division algebra: base field, unramified quadratic,
# ramified quadratic (quaternions are out of scope and rejected)
DKINDS = ("base", "unramified", "ramified")


def dkind_nu(dkind: str) -> Fraction:
    if dkind not in DKINDS:
        raise ValueError(f"unsupported coefficient algebra kind {dkind!r}")
    return HALF if dkind == "ramified" else Fraction(1)


def dkind_residue_degree(dkind: str) -> int:
    """Degree of the residue field of D over the residue field of the base."""
    return 2 if dkind == "unramified" else 1


@dataclass(frozen=True)
class ApartmentPoint:
    """Coordinates of a lattice function split by a Witt basis.

    witt holds a_i for the positive half of the hyperbolic pairs; the
    paired coordinates default to -a_i and can be overridden (minus) to
    represent invalid, non-self-dual data.  aniso holds the coordinates of
    the anisotropic basis vectors, which for a self-dual point lie in
    {0, nu/2} modulo the period.
    """

    dkind: str
    witt: tuple
    aniso: tuple = ()
    minus: Optional[tuple] = None

    def __post_init__(self):
        if self.dkind not in DKINDS:
            raise ValueError(f"unsupported coefficient algebra kind {self.dkind!r}")
        object.__setattr__(self, "witt", tuple(Fraction(a) for a in self.witt))
        object.__setattr__(self, "aniso", tuple(Fraction(a) for a in self.aniso))
        if self.minus is not None:
            m = tuple(Fraction(a) for a in self.minus)
            if len(m) != len(self.witt):
                raise ValueError("minus coordinates must pair with witt coordinates")
            # normalize so that points with default pairing compare equal
            if m == tuple(-a for a in self.witt):
                m = None
            object.__setattr__(self, "minus", m)

    @property
    def nu(self) -> Fraction:
        return dkind_nu(self.dkind)

    @property
    def dim(self) -> int:
        """Dimension over D."""
        return 2 * len(self.witt) + len(self.aniso)

    def minus_coords(self) -> tuple:
        if self.minus is not None:
            return self.minus
        return tuple(-a for a in self.witt)

    def all_coords(self) -> tuple:
        """Coordinates in basis order (plus block, anisotropic, minus block)."""
        return self.witt + self.aniso + tuple(reversed(self.minus_coords()))


@dataclass(frozen=True)
class JumpSet:
    """Finite multiset of jump values modulo the period, with multiplicities
    counted over the residue field of K (the maximal unramified part)."""

    period: Fraction
    entries: tuple  # sorted tuple of (representative in [0, period), multiplicity)

    @classmethod
    def from_dict(cls, period, d: dict) -> "JumpSet":
        period = Fraction(period)
        acc: dict = {}
        for r, m in d.items():
            key = Fraction(r) % period
            acc[key] = acc.get(key, 0) + m
        items = tuple(sorted((r, m) for r, m in acc.items() if m))
        return cls(period, items)

    def as_dict(self) -> dict:
        return dict(self.entries)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def multiplicity(self, r) -> int:
        return self.as_dict().get(Fraction(r) % self.period, 0)

    def values(self):
        return tuple(r for r, _ in self.entries)

    def negated(self) -> "JumpSet":
        return JumpSet.from_dict(
            self.period, {(-r) % self.period: m for r, m in self.entries}
        )

    def expanded(self, new_period=Fraction(1)) -> "JumpSet":
        """Rewrite with a larger period by translating each entry."""
        new_period = Fraction(new_period)
        steps = new_period / self.period
        if steps.denominator != 1:
            raise ValueError("new period must be a multiple of the old one")
        d: dict = {}
        for r, m in self.entries:
            for t in range(int(steps)):
                key = (r + t * self.period) % new_period
                d[key] = d.get(key, 0) + m
        return JumpSet.from_dict(new_period, d)

    def contained_in_coset(self, offset, modulus) -> bool:
        offset, modulus = Fraction(offset), Fraction(modulus)
        return all((r - offset) % modulus == 0 for r, _ in self.entries)


def jumps(pt: ApartmentPoint) -> JumpSet:
    """Jump multiset of the lattice function, reduced modulo the period."""
    nu = pt.nu
    d: dict = {}
    for a in pt.all_coords():
        key = a % nu
        d[key] = d.get(key, 0) + 1
    return JumpSet.from_dict(nu, d)


def is_selfdual(pt: ApartmentPoint) -> bool:
    """True when the coordinates satisfy the self-duality constraints:
    paired coordinates negate each other and anisotropic coordinates sit in
    {0, nu/2} modulo the period."""
    if pt.minus is not None and pt.minus != tuple(-a for a in pt.witt):
        return False
    nu = pt.nu
    return all((2 * a) % nu == 0 for a in pt.aniso)


def dual_point(pt: ApartmentPoint) -> ApartmentPoint:
    """Coordinates of the dual lattice function (anisotropic vectors are
    self-paired, hyperbolic coordinates swap with a sign)."""
    minus = pt.minus_coords()
    dual_witt = tuple(-b for b in minus)
    dual_minus = tuple(-a for a in pt.witt)
    nu = pt.nu
    dual_aniso = []
    for a in pt.aniso:
        # the pairing partner of an anisotropic vector is itself, with the
        # form valuation in {0, nu} fixed by the coordinate class
        v = 2 * (a - (a % nu)) + (0 if (a % nu) < HALF * nu else nu)
        # self-dual anisotropic coordinates reproduce themselves; generic
        # ones reflect around the nearest admissible class
        dual_aniso.append(v - a)
    return ApartmentPoint(pt.dkind, dual_witt, tuple(dual_aniso), minus=dual_minus)


def tensor_jumps(J: JumpSet, Jp: JumpSet) -> JumpSet:
    """Jump multiset of the tensor lattice function: convolution at the
    common period, then expansion to period 1 (the base uniformizer)."""
    if J.period != Jp.period:
        raise ValueError("tensor of jump sets needs a common period")
    d: dict = {}
    for r, m in J.entries:
        for s, k in Jp.entries:
            key = (r + s) % J.period
            d[key] = d.get(key, 0) + m * k
    return JumpSet.from_dict(J.period, d).expanded(Fraction(1))


def epipelagic_dichotomy(J: JumpSet, Jp: JumpSet, m: int) -> str:
    """Classify a pair of jump sets against the order-m dichotomy.

    case_i:   J in (1/m)Z and J' in 1/(2m) + (1/m)Z
    case_ii:  the same with the roles swapped
    violation: anything else
    """
    if m < 2:
        raise ValueError("epipelagic order must be at least 2")
    om = Fraction(1, m)
    o2m = Fraction(1, 2 * m)
    a, b = J.expanded(), Jp.expanded()
    if a.contained_in_coset(0, om) and b.contained_in_coset(o2m, om):
        return "case_i"
    if a.contained_in_coset(o2m, om) and b.contained_in_coset(0, om):
        return "case_ii"
    return "violation"


@dataclass(frozen=True)
class GradedPiece:
    """One graded residue piece of a self-dual lattice function."""

    r: Fraction
    dim: int
    form_kind: str  # "form" | "twisted-form" | "pairing-only"
    eps_sign: Optional[int]  # sign of the induced form, when there is one
    partner: Fraction  # the level carrying the dual pairing


def _twisted_eps(dkind: str, eps: int) -> int:
    # twisting by the uniformizer flips the sign exactly when the
    # involution moves the uniformizer (ramified quadratic case)
    return -eps if dkind == "ramified" else eps


def graded_piece(pt: ApartmentPoint, r, eps: int = 1) -> GradedPiece:
    r = Fraction(r)
    J = jumps(pt)
    nu = pt.nu
    key = r % nu
    mult = J.multiplicity(key)
    if mult == 0:
        raise ValueError(f"{r} is not a jump of this point")
    if key == 0:
        kind, sign = "form", eps
    elif key == nu / 2:
        kind, sign = "twisted-form", _twisted_eps(pt.dkind, eps)
    else:
        kind, sign = "pairing-only", None
    return GradedPiece(key, mult, kind, sign, (-r) % nu)


def residue_group_shape(pt: ApartmentPoint, eps: int = 1):
    """Factor list of the reductive quotient at a self-dual point:
    a unitary factor at level 0, a unitary factor for the twisted form at
    level nu/2, and one general-linear factor per jump strictly between."""
    if not is_selfdual(pt):
        raise ValueError("residue group shape needs a self-dual point")
    J = jumps(pt)
    nu = pt.nu
    factors = []
    d0 = J.multiplicity(0)
    if d0:
        factors.append(("unitary", d0, eps))
    dh = J.multiplicity(nu / 2)
    if dh:
        factors.append(("unitary-twisted", dh, _twisted_eps(pt.dkind, eps)))
    for r, m in J.entries:
        if 0 < r < nu / 2:
            factors.append(("general-linear", m, None))
    return factors


def hom_entry_bounds(ptV: ApartmentPoint, ptVp: ApartmentPoint, r) -> tuple:
    """Minimal admissible valuations, entry by entry, for a map of level r.

    Entry (j, i) bounds the matrix coefficient sending the i-th basis
    vector of the source into the j-th basis line of the target:
    nu * ceil((r + a_i - a'_j) / nu).  Bounds compose tropically.
    """
    if ptV.dkind != ptVp.dkind:
        raise ValueError("bounds need a common coefficient algebra")
    r = Fraction(r)
    nu = ptV.nu
    src = ptV.all_coords()
    tgt = ptVp.all_coords()
    rows = []
    for aj in tgt:
        row = []
        for ai in src:
            need = (r + ai - aj) / nu
            n = need.numerator // need.denominator  # floor
            if n < need:
                n += 1
            row.append(nu * n)
        rows.append(tuple(row))
    return tuple(rows)


def trop_mul(A: tuple, B: tuple) -> tuple:
    """Min-plus matrix product."""
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            row.append(min(A[i][t] + B[t][j] for t in range(k)))
        out.append(tuple(row))
    return tuple(out)


def trop_le(A: tuple, B: tuple) -> bool:
    """Entrywise A >= B (A admits at least the valuations B demands)."""
    return all(a >= b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def class_dims(pt: ApartmentPoint) -> dict:
    """Dimensions over K of the congruence-class decomposition of the
    underlying space: class [t] collects basis lines with coordinate
    congruent to t mod 1, including uniformizer translates when the
    algebra is ramified."""
    d: dict = {}
    coords = pt.all_coords()
    for a in coords:
        d[a % 1] = d.get(a % 1, 0) + 1
        if pt.dkind == "ramified":
            key = (a + HALF) % 1
            d[key] = d.get(key, 0) + 1
    return d


def splitting_dims(ptV: ApartmentPoint, ptVp: ApartmentPoint, m: int) -> dict:
    """Dimension ledger of the residue symplectic space at level -1/(2m):
    the middle quotient, its image piece, the isotropic kernel piece, and
    the per-class decomposition of the full tensor space."""
    J = jumps(ptV)
    Jp = jumps(ptVp)
    if epipelagic_dichotomy(J, Jp, m) == "violation":
        raise ValueError("the pair fails the order-m jump dichotomy")
    JB = tensor_jumps(J, Jp)
    s = Fraction(1, 2 * m)
    dim_x = JB.multiplicity(-s)
    dim_y = JB.multiplicity(s)
    dv = class_dims(ptV)
    dvp = class_dims(ptVp)
    per_class: dict = {}
    for t, a in dv.items():
        for tp, b in dvp.items():
            key = (t + tp) % 1
            per_class[key] = per_class.get(key, 0) + a * b
    # over K every class pairs a source class with a target class once
    total = sum(dv.values()) * sum(dvp.values())
    if ptV.dkind == "ramified":
        # uniformizer translates identify classes in the tensor space
        per_class = {t: n // 2 for t, n in per_class.items()}
        total //= 2
    return {
        "dim_sfW": dim_x + dim_y,
        "dim_sfX": dim_x,
        "dim_sfY": dim_y,
        "per_class_dims": {str(t): n for t, n in sorted(per_class.items())},
        "dim_W": total,
    }
