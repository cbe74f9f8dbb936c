"""The bundled invariant suite: every module exercised at desk scale.

Runs under five minutes on commodity hardware; all sampling is seeded so
the emitted report is byte-stable for a fixed configuration.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import kernels
from . import linalg as la
from .algebra import DualAlgebra, make_field, make_split_algebra, root_of_unity


def _check(name, anchor, ok, **detail):
    return {
        "name": name,
        "anchor": anchor,
        "status": "pass" if ok else "fail",
        "detail": detail,
    }


def _section_numeric(seed: int):
    checks = []
    rng = random.Random(seed)
    for (p, k, inv) in ((3, 1, "identity"), (5, 2, "frobenius"), (3, 2, "frobenius")):
        F = make_field(p, k, inv)
        ok = True
        for _ in range(300):
            a, b, c = (rng.randrange(F.q) for _ in range(3))
            ok &= F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
            ok &= F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
            if a:
                ok &= F.mul(a, F.inv(a)) == F.one
            ok &= F.involute(F.involute(a)) == a
        checks.append(_check(f"field-axioms-GF({F.q})-{inv}", "numeric.axioms", ok))
    F25 = make_field(5, 2, "frobenius")
    fixed = sum(1 for a in F25.elements() if F25.involute(a) == a)
    checks.append(_check("frobenius-fixed-count", "numeric.fixed-field", fixed == 5, count=fixed))
    ok = True
    for _ in range(10**4):
        a = Fraction(rng.randrange(-50, 50), rng.randrange(1, 50))
        b = Fraction(rng.randrange(-50, 50), rng.randrange(1, 50))
        ok &= (a + b) - b == a
    checks.append(_check("rational-roundtrip", "numeric.rationals", ok))
    F = make_field(5)
    D = DualAlgebra(F)
    ok = True
    for x in range(F.q):
        X = D.encode(0, x)
        ok &= D.mul(D.add(D.one, X), D.sub(D.one, X)) == D.one
    checks.append(_check("dual-number-units", "numeric.duals", ok))
    z = root_of_unity(make_field(7), 3)
    checks.append(_check("root-of-unity", "numeric.roots", z == 2, value=z))
    return {"name": "numeric", "checks": checks}


def _section_lattice(seed: int):
    from .lattice import (
        ApartmentPoint,
        dual_point,
        epipelagic_dichotomy,
        is_selfdual,
        jumps,
        splitting_dims,
        tensor_jumps,
    )

    rng = random.Random(seed)
    checks = []
    denoms = (1, 2, 3, 4, 6, 12)

    def rand_point(dkind):
        nu = Fraction(1, 2) if dkind == "ramified" else Fraction(1)
        witt = tuple(
            Fraction(rng.randrange(-12, 12), rng.choice(denoms)) for _ in range(rng.randrange(0, 3))
        )
        aniso = tuple(
            rng.choice((Fraction(0), nu / 2)) for _ in range(rng.randrange(0, 2))
        )
        if not witt and not aniso:
            witt = (Fraction(1, 4),)
        return ApartmentPoint(dkind, witt, aniso)

    ok_sym = ok_dual = ok_total = True
    for _ in range(10**3):
        dkind = rng.choice(("base", "unramified", "ramified"))
        pt = rand_point(dkind)
        J = jumps(pt)
        ok_sym &= J == J.negated()
        ok_dual &= is_selfdual(pt) and dual_point(pt) == pt
        ok_total &= J.total == pt.dim
    checks.append(_check("self-dual-symmetry", "jumps.symmetry", ok_sym))
    checks.append(_check("dual-point-fixed", "jumps.duality", ok_dual))
    checks.append(_check("total-multiplicity", "jumps.total", ok_total))
    bad = ApartmentPoint("base", (Fraction(1, 4),), minus=(Fraction(1, 4),))
    checks.append(_check("constraint-breach-flagged", "jumps.duality", not is_selfdual(bad)))
    ok_comm = ok_tot = True
    for _ in range(200):
        dkind = rng.choice(("base", "ramified"))
        a, b = rand_point(dkind), rand_point(dkind)
        Ja, Jb = jumps(a), jumps(b)
        ok_comm &= tensor_jumps(Ja, Jb) == tensor_jumps(Jb, Ja)
        scale = 1 if dkind != "ramified" else 2
        ok_tot &= tensor_jumps(Ja, Jb).total == Ja.total * Jb.total * scale
    checks.append(_check("tensor-commutative", "jumps.tensor", ok_comm))
    checks.append(_check("tensor-total", "jumps.tensor", ok_tot))
    J1 = jumps(ApartmentPoint("base", (Fraction(0),), (Fraction(0),)))
    J2 = jumps(ApartmentPoint("base", (Fraction(1, 4),)))
    checks.append(
        _check(
            "dichotomy-cases",
            "jumps.dichotomy",
            epipelagic_dichotomy(J1, J2, 2) == "case_i"
            and epipelagic_dichotomy(J2, J1, 2) == "case_ii"
            and epipelagic_dichotomy(J1, J1, 2) == "violation",
        )
    )
    sd = splitting_dims(
        ApartmentPoint("base", (Fraction(1, 4),)),
        ApartmentPoint("base", (Fraction(1, 2),), (Fraction(0),)),
        2,
    )
    ok_split = (
        sd["dim_sfW"] == sd["dim_sfX"] + sd["dim_sfY"]
        and sd["dim_sfY"] * 2 == sd["dim_sfW"]
        and sum(sd["per_class_dims"].values()) == sd["dim_W"]
    )
    checks.append(_check("splitting-dims", "jumps.splitting", ok_split, **sd))
    return {"name": "lattice", "checks": checks}


def _section_moment(seed: int):
    from .moment import (
        MomentSetting,
        first_order_osc_check,
        pairing_identities_check,
        rs_agreement_batched,
        sampled_identity_check,
        sampled_osc_check,
    )
    from .spaces import lie_basis, split_orthogonal_space, symplectic_space

    checks = []
    F3 = make_field(3)
    st3 = MomentSetting(symplectic_space(F3, 2), split_orthogonal_space(F3, 3))
    rep = pairing_identities_check(st3)
    checks.append(
        _check(
            "pairing-identities-exhaustive",
            "moment.identities",
            rep["ok"],
            checked=rep["checked"],
        )
    )
    F5 = make_field(5)
    st5 = MomentSetting(symplectic_space(F5, 4), split_orthogonal_space(F5, 5))
    rep = sampled_identity_check(st5, 10**4, seed)
    checks.append(_check("pairing-identities-sampled", "moment.identities", rep["ok"], **{k: v for k, v in rep.items() if k != 'ok'}))
    ok = True
    count = 0
    basis = lie_basis(st3.V)
    for w in itertools.product(F3.elements(), repeat=6):
        wm = (w[0:2], w[2:4], w[4:6])
        for X in basis:
            ok &= first_order_osc_check(st3, X, wm)
            count += 1
        if not ok:
            break
    checks.append(_check("first-order-exhaustive", "moment.first-order", ok, checked=count))
    rep = sampled_osc_check(st5, 1000, seed + 1)
    checks.append(_check("first-order-sampled", "moment.first-order", rep["ok"], **{k: v for k, v in rep.items() if k != 'ok'}))
    for label, space in (
        ("sp4", st5.V),
        ("so5", st5.Vp),
        ("sp2", symplectic_space(F5, 2)),
        ("so4", split_orthogonal_space(F5, 4)),
    ):
        rep = rs_agreement_batched(space, 10**4, seed + 2)
        checks.append(
            _check(
                f"rs-oracle-agreement-{label}",
                "moment.rs-oracle",
                rep["ok"],
                mismatches=rep["mismatches"],
                rs_fraction=rep["regular_semisimple_count"],
            )
        )
    return {"name": "moment", "checks": checks}


def _section_grading(seed: int):
    from .grading import build_grading, stable_vector_search
    from .spaces import symplectic_space

    checks = []
    F3 = make_field(3)
    G = build_grading(symplectic_space(F3, 2), 2, [1], similitude_exponent=1)
    dims = G.lie_dims()
    checks.append(_check("graded-dims", "grading.dims", dims == (1, 2), dims=list(dims)))
    ok = True
    for j in range(G.m):
        for k in range(G.m):
            for A in G.component_basis(j):
                for B in G.component_basis(k):
                    C = la.commutator(F3, A, B)
                    if not la.is_zero(C):
                        ok &= G.degree_of(C) == (j + k) % G.m
    checks.append(_check("bracket-grading", "grading.bracket", ok))
    res = stable_vector_search(G, limit=10**4)
    checks.append(
        _check(
            "stable-search",
            "stability.search",
            res["stable_count"] > 0,
            stable=res["stable_count"],
            tested=res["tested"],
        )
    )
    return {"name": "grading", "checks": checks}


def _section_corresp(seed: int, workers: int):
    from .cli import _verify_one, parallel_map

    tasks = [
        ("sp-o-odd", 3, (1, 1, 1)),
        ("sp-o-even", 3, (1, 1, 1, 1)),
        ("o-sp", 3, (1, 1)),
        ("gl-gl", 3, (1, 1, 1, 1)),
        ("u-u-rank1", 3, (1,)),
        ("u-u", 3, (1, 1, 1, 2)),
        ("u-u", 3, (1, 1, 1, 1)),
    ]
    checks = []
    for rep in parallel_map(_verify_one, tasks, workers):
        checks.append(
            _check(
                f"verify-{rep['label']}",
                "matching.full-pipeline",
                rep["verdict"] == "pass",
                case_E=rep["case_E"],
            )
        )
    return {"name": "correspondence", "checks": checks}


def _section_classify(budget: int):
    from .algebra import make_field
    from .classify import classification_table

    tab = classification_table(2, make_field(5), budget=min(budget, 10**7))
    checks = [
        _check(
            "classification-rank2",
            "classify.rank-table",
            tab["all_match"],
            rows=len(tab["rows"]),
        )
    ]
    return {"name": "classification", "checks": checks}


def _section_kernels(seed: int):
    from .corresp import fiber
    from .instances import sp_o_odd

    checks = []
    inst = sp_o_odd(3, (1, 2, 1))
    hits_active = fiber(inst, use_kernel=True)
    pure_insts = sp_o_odd(3, (1, 2, 1))
    slow = []
    from .moment import moment_M, moment_Mp

    lam = pure_insts.lam()
    mpt = la.mneg(pure_insts.algebra, pure_insts.lam_prime())
    for w in pure_insts.rational_points():
        if moment_M(pure_insts.setting, w) == lam and moment_Mp(pure_insts.setting, w) == mpt:
            slow.append(w)
    checks.append(
        _check(
            "kernel-agrees-with-direct-scan",
            "kernels.parity",
            sorted(slow) == sorted(hits_active),
            backend=kernels.backend(),
            size=len(hits_active),
        )
    )
    return {"name": "kernels", "checks": checks}


def run_selftest(seed: int = 0, budget: int = 10**7, workers: int = 1) -> dict:
    sections = [
        _section_numeric(seed),
        _section_lattice(seed + 10),
        _section_moment(seed + 20),
        _section_grading(seed + 30),
        _section_corresp(seed + 40, workers),
        _section_classify(budget),
        _section_kernels(seed + 50),
    ]
    ok = all(c["status"] == "pass" for s in sections for c in s["checks"])
    return {"sections": sections, "verdict": "pass" if ok else "fail"}
