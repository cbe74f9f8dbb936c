"""Enumeration kernels with a compiled core and a pure fallback.

The compiled extension is optional: when it is missing (no build step has
run) every entry point silently routes to the numpy implementation in
kernels.pure.  ``backend()`` reports which core is active.
"""

from __future__ import annotations

import os

import numpy as np

from . import pure

try:  # pragma: no cover - depends on the build environment
    if os.environ.get("EPITHETA_FORCE_PURE"):
        _core = None
    else:
        from . import _core
except ImportError:  # pragma: no cover
    _core = None


def backend() -> str:
    return "compiled" if _core is not None else "pure"


_TYPE_CODES = {"gl": 0, "sp": 1, "so-even": 2, "so-odd": 3}

FIBER_LIMIT = 2 * 10**8


def enum_fiber(inst, lam, Mp_target):
    """Exhaustive fiber scan for a correspondence instance; returns the
    list of matrices, or None when the configuration is unsupported."""
    alg = inst.algebra
    if alg.order >= 2**16:
        return None
    F = alg.fixed_field
    basis = inst.rational_basis()
    N = len(basis)
    if N == 0:
        return []
    if F.q**N > FIBER_LIMIT:
        raise RuntimeError(
            f"fiber enumeration needs {F.q ** N} points; over the supported limit"
        )
    npr, n = inst.setting.Vp.dim, inst.setting.V.dim
    scaled = np.zeros((N, F.q, npr, n), dtype=np.uint16)
    from .. import linalg as la

    for k, B in enumerate(basis):
        for c in range(F.q):
            scaled[k, c] = np.array(la.mscale(alg, alg.embed_fixed(c), B), dtype=np.uint16)
    add, mul, invol = pure.algebra_tables(alg)
    GVinv = np.array(inst.setting.V.gram_inv, dtype=np.uint16)
    GVp = np.array(inst.setting.Vp.gram, dtype=np.uint16)
    lam_a = np.array(lam, dtype=np.uint16)
    mp_a = np.array(Mp_target, dtype=np.uint16)
    if _core is not None:
        hits = _core.enum_fiber_core(
            scaled, add, mul, invol, GVinv, GVp, lam_a, mp_a, F.q
        )
    else:
        hits = pure.enum_fiber(alg, F.q, scaled, GVinv, GVp, lam_a, mp_a)
    out = []
    for digits in hits:
        w = la.zeros(npr, n)
        for c, B in zip(digits, basis):
            if c:
                w = la.madd(alg, w, la.mscale(alg, alg.embed_fixed(c), B))
        out.append(w)
    return out


def search_rs_pair_formed(p, dimV, dimVp, GVinv, GVp, typeV, typeVp, limit=None):
    """First map with both moment images regular semisimple, scanning all
    of Hom(V, V') over F_p; returns (matrix digits or None, scanned)."""
    if max(dimV, dimVp) > 6:
        raise ValueError("search kernels support dimensions up to 6")
    needed = max(
        dimV if typeV == "gl" else dimV // 2,
        dimVp if typeVp == "gl" else dimVp // 2,
    )
    if p <= max(3, needed):
        raise ValueError("search kernels need p beyond the Newton degree")
    if limit is not None and p ** (dimV * dimVp) > limit:
        raise RuntimeError(
            f"search space {p ** (dimV * dimVp)} exceeds the limit {limit}"
        )
    if _core is not None:
        return _core.search_rs_core(
            p,
            dimV,
            dimVp,
            np.array(GVinv, dtype=np.int64),
            np.array(GVp, dtype=np.int64),
            _TYPE_CODES[typeV],
            _TYPE_CODES[typeVp],
            1,
        )
    return pure.search_rs_pair(p, dimV, dimVp, GVinv, GVp, typeV, typeVp, limit=limit)


def search_rs_pair_gl(p, n, npr, limit=None):
    return pure.search_rs_pair_gl(p, n, npr, limit=limit)


def rs_mask(p, M, lie_type):
    return pure.rs_mask(p, M, lie_type)
