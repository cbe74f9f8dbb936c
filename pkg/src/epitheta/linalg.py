"""Small exact matrices over an int-encoded coefficient ring.

Matrices are tuples of tuples of ints (hashable, so they can serve as group
elements) with the ring passed explicitly.  Linear algebra that needs
division routes through unit pivots; over the split etale algebra it
decomposes into the two field components instead.
"""

from __future__ import annotations

from .algebra import SplitAlgebra

Mat = tuple  # tuple of row tuples


def mat(rows) -> Mat:
    return tuple(tuple(r) for r in rows)


def zeros(n: int, m: int | None = None) -> Mat:
    m = n if m is None else m
    return tuple((0,) * m for _ in range(n))


def identity(alg, n: int) -> Mat:
    one = alg.one
    return tuple(tuple(one if i == j else 0 for j in range(n)) for i in range(n))


def scalar(alg, n: int, c) -> Mat:
    return tuple(tuple(c if i == j else 0 for j in range(n)) for i in range(n))


def shape(A: Mat):
    return len(A), len(A[0]) if A else 0


def madd(alg, A: Mat, B: Mat) -> Mat:
    return tuple(tuple(alg.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def msub(alg, A: Mat, B: Mat) -> Mat:
    return tuple(tuple(alg.sub(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mneg(alg, A: Mat) -> Mat:
    return tuple(tuple(alg.neg(a) for a in row) for row in A)


def mscale(alg, c, A: Mat) -> Mat:
    return tuple(tuple(alg.mul(c, a) for a in row) for row in A)


def mmul(alg, A: Mat, B: Mat) -> Mat:
    n, k = len(A), len(B)
    m = len(B[0]) if B else 0
    add, mul = alg.add, alg.mul
    Bcols = list(zip(*B))
    out = []
    for i in range(n):
        Ai = A[i]
        row = []
        for j in range(m):
            col = Bcols[j]
            s = 0
            for t in range(k):
                s = add(s, mul(Ai[t], col[t]))
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mmul_many(alg, *Ms: Mat) -> Mat:
    out = Ms[0]
    for M in Ms[1:]:
        out = mmul(alg, out, M)
    return out


def transpose(A: Mat) -> Mat:
    return tuple(zip(*A))


def conj_entries(alg, A: Mat) -> Mat:
    return tuple(tuple(alg.involute(a) for a in row) for row in A)


def conj_transpose(alg, A: Mat) -> Mat:
    return conj_entries(alg, transpose(A))


def trace(alg, A: Mat):
    t = 0
    for i in range(len(A)):
        t = alg.add(t, A[i][i])
    return t


def commutator(alg, A: Mat, B: Mat) -> Mat:
    return msub(alg, mmul(alg, A, B), mmul(alg, B, A))


def is_zero(A: Mat) -> bool:
    return all(a == 0 for row in A for a in row)


def vec_matmul(alg, A: Mat, v) -> tuple:
    add, mul = alg.add, alg.mul
    out = []
    for row in A:
        s = 0
        for a, x in zip(row, v):
            s = add(s, mul(a, x))
        out.append(s)
    return tuple(out)


# -- elimination over a ring with unit pivots -------------------------


def _split_apply(alg, A, fn):
    """Apply fn componentwise over the two field factors of a split algebra."""
    base = alg.base
    comp1 = tuple(tuple(alg.decode(a)[0] for a in row) for row in A)
    comp2 = tuple(tuple(alg.decode(a)[1] for a in row) for row in A)
    r1 = fn(base, comp1)
    r2 = fn(base, comp2)
    return r1, r2


def mat_inv(alg, A: Mat) -> Mat:
    """Inverse via Gauss-Jordan with unit pivots; split algebras go
    componentwise (they have invertible matrices with no unit entries)."""
    if isinstance(alg, SplitAlgebra):
        i1, i2 = _split_apply(alg, A, mat_inv)
        return tuple(
            tuple(alg.encode(a, b) for a, b in zip(r1, r2)) for r1, r2 in zip(i1, i2)
        )
    n = len(A)
    aug = [list(row) + [alg.one if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if alg.is_unit(aug[r][col]):
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("matrix is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        pinv = alg.inv(aug[col][col])
        aug[col] = [alg.mul(pinv, a) for a in aug[col]]
        for r in range(n):
            if r == col or aug[r][col] == 0:
                continue
            f = aug[r][col]
            aug[r] = [alg.sub(a, alg.mul(f, b)) for a, b in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def rref(field, A: Mat):
    """Reduced row echelon form over a field; returns (R, pivot columns)."""
    R = [list(row) for row in A]
    n = len(R)
    m = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(m):
        piv = None
        for i in range(r, n):
            if R[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        f = field.inv(R[r][c])
        R[r] = [field.mul(f, a) for a in R[r]]
        for i in range(n):
            if i != r and R[i][c] != 0:
                g = R[i][c]
                R[i] = [field.sub(a, field.mul(g, b)) for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return tuple(tuple(row) for row in R), pivots


def rank(field, A: Mat) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(field, A)[1])


def kernel_basis(field, A: Mat):
    """Basis of the right kernel {v : A v = 0} over a field."""
    n, m = shape(A)
    if m == 0:
        return []
    R, pivots = rref(field, A)
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * m
        v[fc] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = field.neg(R[r][fc])
        basis.append(tuple(v))
    return basis


def solve(field, A: Mat, b) -> tuple | None:
    """One solution of A x = b over a field, or None."""
    n, m = shape(A)
    aug = mat([list(row) + [bv] for row, bv in zip(A, b)])
    R, pivots = rref(field, aug)
    for row in R:
        if all(a == 0 for a in row[:m]) and row[m] != 0:
            return None
    x = [0] * m
    for r, pc in enumerate(pivots):
        if pc < m:
            x[pc] = R[r][m]
    return tuple(x)


def split_rank(alg, A: Mat):
    """Componentwise ranks for a split algebra matrix."""
    return _split_apply(alg, A, rank)


def matrix_rank(alg, A: Mat):
    """Rank over a field; over a split algebra, the pair of component ranks
    collapses to their common value when equal, else the tuple."""
    if isinstance(alg, SplitAlgebra):
        r1, r2 = split_rank(alg, A)
        return r1 if r1 == r2 else (r1, r2)
    return rank(alg, A)


# -- F_p-linear views --------------------------------------------------


def entry_coords(alg, A: Mat):
    """Flatten a matrix into fixed-field coordinates (row-major, then
    coordinate index).  The fixed field is the subfield fixed by the
    involution; every coefficient ring is free of rank fixed_dim over it."""
    out = []
    for row in A:
        for a in row:
            out.extend(alg.fixed_coords(a))
    return tuple(out)


def from_entry_coords(alg, coords, n: int, m: int) -> Mat:
    d = alg.fixed_dim
    it = iter(range(0, n * m * d, d))
    rows = []
    for i in range(n):
        row = []
        for j in range(m):
            k = next(it)
            row.append(alg.from_fixed_coords(tuple(coords[k : k + d])))
        rows.append(tuple(row))
    return tuple(rows)


def operator_matrix(alg, op, n: int, m: int):
    """Matrix over the fixed field of a linear operator on n x m matrices.

    ``op`` maps a matrix to a matrix; it must be linear over the fixed
    field (semilinear conjugations qualify).  Returns (matrix, dim).
    """
    F = alg.fixed_field
    d = alg.fixed_dim
    dim = n * m * d
    cols = []
    for k in range(dim):
        coords = [0] * dim
        coords[k] = F.one
        E = from_entry_coords(alg, coords, n, m)
        cols.append(entry_coords(alg, op(E)))
    return tuple(zip(*cols)), dim


def operator_eigenspace(alg, op, n: int, m: int, eigenvalue):
    """Basis (as matrices) of {X : op(X) = eigenvalue * X} over the fixed field.

    The eigenvalue multiplies in the ambient ring, so it may live outside
    the fixed field; the equation is still fixed-field linear.
    """
    M, dim = operator_matrix(alg, op, n, m)
    S, _ = operator_matrix(alg, lambda X: mscale(alg, eigenvalue, X), n, m)
    F = alg.fixed_field
    D = tuple(tuple(F.sub(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(M, S))
    return [from_entry_coords(alg, v, n, m) for v in kernel_basis(F, D)]


# -- characteristic polynomials ----------------------------------------


def charpoly(field, A: Mat):
    """Coefficients of det(zI - A), leading first, by the division-free
    Berkowitz scheme (valid in any characteristic)."""
    n = len(A)
    C = [field.one]
    for i in range(1, n + 1):
        a = A[i - 1][i - 1]
        R = A[i - 1][: i - 1]
        S = [A[t][i - 1] for t in range(i - 1)]
        M = [row[: i - 1] for row in A[: i - 1]]
        T = [field.one, field.neg(a)]
        v = list(S)
        for j in range(2, i + 1):
            if j > 2:
                v = [
                    _dot(field, Mrow, v) for Mrow in M
                ]
            T.append(field.neg(_dot(field, R, v)))
        newC = []
        for k in range(i + 1):
            s = 0
            for j in range(max(0, k - i + 1), min(k, i) + 1):
                if k - j < len(C):
                    s = field.add(s, field.mul(T[j], C[k - j]))
            newC.append(s)
        C = newC
    return tuple(C)


def _dot(field, u, v):
    s = 0
    for a, b in zip(u, v):
        s = field.add(s, field.mul(a, b))
    return s


def det(field, A: Mat):
    """Determinant via the constant charpoly coefficient."""
    n = len(A)
    c = charpoly(field, A)[-1]
    return c if n % 2 == 0 else field.neg(c)


def generalized_null_dim(field, A: Mat) -> int:
    """Dimension of the generalized 0-eigenspace: d - rank(A^d)."""
    d = len(A)
    P = A
    e = 1
    while e < d:
        P = mmul(field, P, P)
        e *= 2
    return d - rank(field, P)


# -- numpy-accelerated prime-field batch helpers -----------------------


def _require_numpy():
    import numpy as np

    return np


def charpoly_batched_fp(p: int, mats) -> "object":
    """Batched Berkowitz over F_p: mats is an int array (B, n, n); returns
    (B, n+1) coefficient arrays of det(zI - A), leading coefficient first."""
    np = _require_numpy()
    A = np.asarray(mats, dtype=np.int64) % p
    B, n, _ = A.shape
    C = np.ones((B, 1), dtype=np.int64)
    for i in range(1, n + 1):
        a = A[:, i - 1, i - 1]
        R = A[:, i - 1, : i - 1]
        S = A[:, : i - 1, i - 1]
        M = A[:, : i - 1, : i - 1]
        T = np.zeros((B, i + 1), dtype=np.int64)
        T[:, 0] = 1
        T[:, 1] = (-a) % p
        v = S
        for j in range(2, i + 1):
            if j > 2:
                v = np.einsum("bij,bj->bi", M, v) % p
            T[:, j] = (-np.einsum("bi,bi->b", R, v)) % p
        newC = np.zeros((B, i + 1), dtype=np.int64)
        for k in range(i + 1):
            lo = max(0, k - C.shape[1] + 1)
            for j in range(lo, min(k, i) + 1):
                newC[:, k] = (newC[:, k] + T[:, j] * C[:, k - j]) % p
        C = newC
    return C


def rank_batched_fp(p: int, mats) -> "object":
    """Batched matrix rank over F_p by fraction-free elimination."""
    np = _require_numpy()
    A = np.asarray(mats, dtype=np.int64).copy() % p
    B, n, m = A.shape
    inv_table = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv_table[x] = pow(x, p - 2, p)
    ranks = np.zeros(B, dtype=np.int64)
    rowpos = np.zeros(B, dtype=np.int64)
    for c in range(m):
        col = A[:, :, c]
        live = np.arange(n)[None, :] >= rowpos[:, None]
        nz = (col != 0) & live
        has = nz.any(axis=1)
        piv = np.where(has, nz.argmax(axis=1), 0)
        bidx = np.nonzero(has)[0]
        if bidx.size == 0:
            continue
        r = rowpos[bidx]
        pv = piv[bidx]
        tmp = A[bidx, r, :].copy()
        A[bidx, r, :] = A[bidx, pv, :]
        A[bidx, pv, :] = tmp
        pivvals = A[bidx, r, c]
        A[bidx, r, :] = (A[bidx, r, :] * inv_table[pivvals][:, None]) % p
        factors = A[bidx, :, c].copy()
        factors[np.arange(bidx.size), r] = 0
        A[bidx] = (A[bidx] - factors[:, :, None] * A[bidx, r, :][:, None, :]) % p
        rowpos[bidx] += 1
        ranks[bidx] += 1
        if (rowpos >= n).all():
            break
    return ranks


def matpow_batched_fp(p: int, mats, e: int) -> "object":
    np = _require_numpy()
    A = np.asarray(mats, dtype=np.int64) % p
    B, n, _ = A.shape
    out = np.broadcast_to(np.eye(n, dtype=np.int64), A.shape).copy()
    base = A
    while e:
        if e & 1:
            out = np.einsum("bij,bjk->bik", out, base) % p
        base = np.einsum("bij,bjk->bik", base, base) % p
        e >>= 1
    return out
