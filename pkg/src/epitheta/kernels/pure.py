"""Pure-Python (numpy) implementations of the enumeration kernels.

Two hot loops live here: exhaustive enumeration of a moment fiber inside
the rational subspace, and exhaustive search for maps whose two moment
images are simultaneously regular semisimple.  The compiled core mirrors
these entry points; this module is the always-available fallback and the
reference the compiled core is tested against.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_TABLE_CACHE: dict = {}


def algebra_tables(alg):
    """(add, mul, invol) as numpy arrays for an int-encoded coefficient ring."""
    key = id(alg)
    if key not in _TABLE_CACHE:
        n = alg.order
        dtype = np.uint16 if n < 2**16 else np.uint32
        add = np.zeros((n, n), dtype=dtype)
        mul = np.zeros((n, n), dtype=dtype)
        for a in range(n):
            for b in range(n):
                add[a, b] = alg.add(a, b)
                mul[a, b] = alg.mul(a, b)
        invol = np.array([alg.involute(a) for a in range(n)], dtype=dtype)
        _TABLE_CACHE[key] = (add, mul, invol)
    return _TABLE_CACHE[key]


def _table_matmul(add, mul, A, B):
    """Batched table-driven matrix product: A (B?, n, k) x B (B?, k, m)."""
    n, k = A.shape[-2], A.shape[-1]
    m = B.shape[-1]
    batchshape = A.shape[:-2] if A.ndim > 2 else B.shape[:-2]
    out = np.zeros(batchshape + (n, m), dtype=add.dtype)
    for i in range(n):
        for j in range(m):
            acc = None
            for t in range(k):
                a = A[..., i, t]
                b = B[..., t, j]
                prod = mul[a, b]
                acc = prod if acc is None else add[acc, prod]
            out[..., i, j] = acc
    return out


def _batch_digits(start, count, q0, N):
    """Mixed-radix digits (count, N) of range(start, start+count), digit 0 last."""
    idx = np.arange(start, start + count, dtype=np.int64)
    digits = np.empty((count, N), dtype=np.int64)
    for k in range(N):
        digits[:, k] = idx % q0
        idx //= q0
    return digits


def enum_fiber(alg, q0, scaled, GVinv, GVp, lam, Mp_target, chunk=1 << 15):
    """All coefficient tuples c in F^N with M(w_c) = lam, M'(w_c) = Mp_target.

    scaled[k][c] is the (n' x n) matrix of the k-th rational basis element
    scaled by the c-th fixed-field element, A-encoded.
    """
    add, mul, invol = algebra_tables(alg)
    scaled = np.asarray(scaled, dtype=add.dtype)
    N = scaled.shape[0]
    npr, n = scaled.shape[2], scaled.shape[3]
    GVinv = np.asarray(GVinv, dtype=add.dtype)
    GVp = np.asarray(GVp, dtype=add.dtype)
    lam = np.asarray(lam, dtype=add.dtype)
    Mp_target = np.asarray(Mp_target, dtype=add.dtype)
    total = q0**N
    hits = []
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        digits = _batch_digits(start, count, q0, N)
        w = np.zeros((count, npr, n), dtype=add.dtype)
        for k in range(N):
            mats = scaled[k][digits[:, k]]
            w = add[w, mats]
        wct = invol[np.swapaxes(w, -1, -2)]
        S = _table_matmul(add, mul, _table_matmul(add, mul, GVinv, wct), GVp)
        M = _table_matmul(add, mul, S, w)
        ok = (M == lam).all(axis=(-2, -1))
        if ok.any():
            widx = np.nonzero(ok)[0]
            Mp = _table_matmul(add, mul, w[widx], S[widx])
            ok2 = (Mp == Mp_target).all(axis=(-2, -1))
            for i in widx[ok2]:
                hits.append(tuple(int(d) for d in digits[i]))
    return hits


# -- regular-semisimple pair search ------------------------------------


def _newton_elementary(p: int, power_sums):
    """Elementary symmetric functions from power sums over F_p (batched).

    power_sums: list of arrays p_1..p_k; valid while k < p.
    """
    k = len(power_sums)
    inv = [0] + [pow(t, p - 2, p) for t in range(1, k + 1)]
    es = []
    for i in range(1, k + 1):
        acc = np.zeros_like(power_sums[0])
        sign = 1
        for j in range(1, i):
            term = (es[i - j - 1] * power_sums[j - 1]) % p
            acc = (acc + sign * term) % p
            sign = -sign
        acc = (acc + sign * power_sums[i - 1]) % p
        es.append((acc * inv[i]) % p)
    return es


def _squarefree_mask(p: int, es):
    """Squarefree test for y^k - e1 y^{k-1} + ... via hardcoded discriminants."""
    k = len(es)
    if k == 0:
        return None
    if k == 1:
        return np.ones_like(es[0], dtype=bool)
    if k == 2:
        e1, e2 = es
        return (e1 * e1 - 4 * e2) % p != 0
    if k == 3:
        e1, e2, e3 = es
        disc = (
            18 * e1 * e2 * e3
            - 4 * e1**3 * e3
            + e1**2 * e2**2
            - 4 * e2**3
            - 27 * e3**2
        ) % p
        return disc != 0
    raise ValueError("squarefree test implemented for degree <= 3")


def rs_mask(p: int, M, lie_type: str):
    """Batched regular-semisimplicity test for M (B, d, d) over F_p.

    gl: distinct eigenvalues.  sp: distinct nonzero eigenvalue pairs.
    so-odd: distinct nonzero pairs beside the forced zero.  so-even:
    distinct pairs, a single zero pair allowed.
    """
    d = M.shape[-1]
    M = np.asarray(M, dtype=np.int64) % p
    if lie_type == "gl":
        if d == 1:
            return np.ones(M.shape[0], dtype=bool)
        ps = []
        P = M
        for _ in range(d):
            ps.append(np.einsum("bii->b", P) % p)
            P = np.einsum("bij,bjk->bik", P, M) % p
        es = _newton_elementary(p, ps)
        return _squarefree_mask(p, es)
    if lie_type in ("sp", "so-even", "so-odd"):
        k = d // 2
        if k == 0:
            return np.zeros(M.shape[0], dtype=bool)
        M2 = np.einsum("bij,bjk->bik", M, M) % p
        inv2 = pow(2, p - 2, p)
        ps = []
        P = M2
        for _ in range(k):
            ps.append((np.einsum("bii->b", P) * inv2) % p)
            P = np.einsum("bij,bjk->bik", P, M2) % p
        es = _newton_elementary(p, ps)
        mask = _squarefree_mask(p, es)
        if lie_type in ("sp", "so-odd"):
            mask = mask & (es[-1] % p != 0)
        return mask
    raise ValueError(f"unknown lie type {lie_type!r}")


def search_rs_pair(
    p: int,
    dimV: int,
    dimVp: int,
    GVinv,
    GVp,
    typeV: str,
    typeVp: str,
    limit: int | None = None,
    chunk: int = 1 << 16,
    collect_first: bool = True,
):
    """Exhaustive scan of Hom(V, V') over F_p for maps with both moment
    images regular semisimple.  Returns (witness digits or None, scanned).
    """
    N = dimV * dimVp
    total = p**N
    if limit is not None and total > limit:
        raise RuntimeError(f"search space {total} exceeds the limit {limit}")
    GVinv = np.asarray(GVinv, dtype=np.int64) % p
    GVp = np.asarray(GVp, dtype=np.int64) % p
    found = None
    scanned = 0
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        digits = _batch_digits(start, count, p, N)
        w = digits.reshape(count, dimVp, dimV)
        S = np.einsum("ij,bkj,kl->bil", GVinv, w, GVp) % p
        M = np.einsum("bij,bjk->bik", S, w) % p
        mask = rs_mask(p, M, typeV)
        scanned += count
        if mask.any():
            idx = np.nonzero(mask)[0]
            Mp = np.einsum("bij,bjk->bik", w[idx], S[idx]) % p
            mask2 = rs_mask(p, Mp, typeVp)
            if mask2.any():
                first = idx[np.nonzero(mask2)[0][0]]
                found = tuple(int(x) for x in digits[first])
                if collect_first:
                    return found, scanned
    return found, scanned


def search_rs_pair_gl(
    p: int,
    n: int,
    npr: int,
    limit: int | None = None,
    chunk: int = 1 << 16,
):
    """Exhaustive scan for the general-linear pair: w = (x, y) with
    M = x y^T and M' = y^T x, both required regular semisimple."""
    N = 2 * n * npr
    total = p**N
    if limit is not None and total > limit:
        raise RuntimeError(f"search space {total} exceeds the limit {limit}")
    found = None
    scanned = 0
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        digits = _batch_digits(start, count, p, N)
        x = digits[:, : n * npr].reshape(count, n, npr)
        y = digits[:, n * npr :].reshape(count, n, npr)
        M = np.einsum("bij,bkj->bik", x, y) % p
        mask = rs_mask(p, M, "gl")
        scanned += count
        if mask.any():
            idx = np.nonzero(mask)[0]
            Mp = np.einsum("bji,bjk->bik", y[idx], x[idx]) % p
            mask2 = rs_mask(p, Mp, "gl")
            if mask2.any():
                first = idx[np.nonzero(mask2)[0][0]]
                found = tuple(int(v) for v in digits[first])
                return found, scanned
    return found, scanned
