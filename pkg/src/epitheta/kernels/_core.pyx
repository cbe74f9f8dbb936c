# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels: moment-fiber scan and the exhaustive
regular-semisimple pair search.  Mirrors kernels.pure entry points."""

import numpy as np
cimport numpy as cnp
cimport cython

ctypedef cnp.uint16_t U16
ctypedef cnp.int64_t I64

BACKEND = "compiled"


def enum_fiber_core(scaled_in, add_in, mul_in, invol_in, GVinv_in, GVp_in,
                    lam_in, Mp_in, int q0):
    """Scan all F^N coefficient tuples; return those whose map hits the
    target pair of moment values.  scaled has shape (N, q0, npr, n)."""
    cdef U16[:, :, :, :] sc = np.ascontiguousarray(scaled_in, dtype=np.uint16)
    cdef U16[:, :] addv = np.ascontiguousarray(add_in, dtype=np.uint16)
    cdef U16[:, :] mulv = np.ascontiguousarray(mul_in, dtype=np.uint16)
    cdef U16[:] invv = np.ascontiguousarray(invol_in, dtype=np.uint16)
    cdef U16[:, :] gvi = np.ascontiguousarray(GVinv_in, dtype=np.uint16)
    cdef U16[:, :] gvp = np.ascontiguousarray(GVp_in, dtype=np.uint16)
    cdef U16[:, :] lamv = np.ascontiguousarray(lam_in, dtype=np.uint16)
    cdef U16[:, :] mpv = np.ascontiguousarray(Mp_in, dtype=np.uint16)
    cdef int N = sc.shape[0]
    cdef int npr = sc.shape[2]
    cdef int n = sc.shape[3]
    cdef long long total = 1
    cdef int k, i, j, t, pos, c, ok
    cdef int acc
    cdef long long it
    for k in range(N):
        total *= q0
    ws_np = np.zeros((N + 1, npr * n), dtype=np.uint16)
    dig_np = np.zeros(N, dtype=np.int32)
    S_np = np.zeros((n, npr), dtype=np.uint16)
    wct_np = np.zeros((n, npr), dtype=np.uint16)
    tmp_np = np.zeros((n, npr), dtype=np.uint16)
    cdef U16[:, :] wsv = ws_np
    cdef cnp.int32_t[:] digits = dig_np
    cdef U16[:, :] Sv = S_np
    cdef U16[:, :] wctv = wct_np
    cdef U16[:, :] tmpv = tmp_np
    hits = []
    for k in range(N - 1, -1, -1):
        for i in range(npr * n):
            wsv[k, i] = addv[wsv[k + 1, i], sc[k, 0, i // n, i % n]]
    it = 0
    while True:
        ok = 1
        for i in range(n):
            for j in range(npr):
                wctv[i, j] = invv[wsv[0, j * n + i]]
        for i in range(n):
            for j in range(npr):
                acc = 0
                for t in range(n):
                    acc = addv[acc, mulv[gvi[i, t], wctv[t, j]]]
                tmpv[i, j] = acc
        for i in range(n):
            for j in range(npr):
                acc = 0
                for t in range(npr):
                    acc = addv[acc, mulv[tmpv[i, t], gvp[t, j]]]
                Sv[i, j] = acc
        for i in range(n):
            if not ok:
                break
            for j in range(n):
                acc = 0
                for t in range(npr):
                    acc = addv[acc, mulv[Sv[i, t], wsv[0, t * n + j]]]
                if acc != lamv[i, j]:
                    ok = 0
                    break
        if ok:
            for i in range(npr):
                if not ok:
                    break
                for j in range(npr):
                    acc = 0
                    for t in range(n):
                        acc = addv[acc, mulv[wsv[0, i * n + t], Sv[t, j]]]
                    if acc != mpv[i, j]:
                        ok = 0
                        break
            if ok:
                hits.append(tuple([digits[k] for k in range(N)]))
        it += 1
        if it >= total:
            break
        pos = 0
        while digits[pos] == q0 - 1:
            digits[pos] = 0
            pos += 1
        digits[pos] += 1
        for k in range(pos, -1, -1):
            c = digits[k]
            for i in range(npr * n):
                wsv[k, i] = addv[wsv[k + 1, i], sc[k, c, i // n, i % n]]
    return hits


cdef inline I64 _mod(I64 a, I64 p) nogil:
    a %= p
    if a < 0:
        a += p
    return a


cdef I64 _pow_mod(I64 b, I64 e, I64 p) nogil:
    cdef I64 out = 1
    b %= p
    while e:
        if e & 1:
            out = (out * b) % p
        b = (b * b) % p
        e >>= 1
    return out


cdef int _rs_test(I64* M, int d, I64 p, int type_code, I64* work) nogil:
    """Regular-semisimple test; type_code 0=gl 1=sp 2=so-even 3=so-odd.
    work must hold at least 3*d*d entries."""
    cdef I64* P = work
    cdef I64* Q = work + d * d
    cdef I64* B = work + 2 * d * d
    cdef int i, j, t, k, steps
    cdef I64 acc, inv2, disc
    cdef I64 ps[8]
    cdef I64 es[8]
    if type_code == 0:
        steps = d
        for i in range(d * d):
            B[i] = M[i]
    else:
        steps = d // 2
        for i in range(d):
            for j in range(d):
                acc = 0
                for t in range(d):
                    acc += M[i * d + t] * M[t * d + j]
                B[i * d + j] = acc % p
    if steps == 0:
        return 0
    if steps > 7:
        return -1
    for i in range(d * d):
        P[i] = B[i]
    inv2 = _pow_mod(2, p - 2, p)
    for k in range(steps):
        acc = 0
        for i in range(d):
            acc += P[i * d + i]
        acc = _mod(acc, p)
        if type_code != 0:
            acc = (acc * inv2) % p
        ps[k] = acc
        if k + 1 < steps:
            for i in range(d):
                for j in range(d):
                    acc = 0
                    for t in range(d):
                        acc += P[i * d + t] * B[t * d + j]
                    Q[i * d + j] = acc % p
            for i in range(d * d):
                P[i] = Q[i]
    for i in range(1, steps + 1):
        acc = 0
        for j in range(1, i):
            if j % 2 == 1:
                acc += es[i - j - 1] * ps[j - 1]
            else:
                acc -= es[i - j - 1] * ps[j - 1]
        if i % 2 == 1:
            acc += ps[i - 1]
        else:
            acc -= ps[i - 1]
        acc = _mod(acc, p)
        es[i - 1] = (acc * _pow_mod(i, p - 2, p)) % p
    if steps == 1:
        disc = 1
    elif steps == 2:
        disc = _mod(es[0] * es[0] - 4 * es[1], p)
    elif steps == 3:
        disc = _mod(
            18 * es[0] * es[1] * es[2]
            - 4 * es[0] * es[0] * es[0] * es[2]
            + es[0] * es[0] * es[1] * es[1]
            - 4 * es[1] * es[1] * es[1]
            - 27 * es[2] * es[2],
            p,
        )
    else:
        return -1
    if disc == 0:
        return 0
    if type_code == 1 or type_code == 3:
        if es[steps - 1] == 0:
            return 0
    return 1


def search_rs_core(long long p_in, int dimV, int dimVp, GVinv_in, GVp_in,
                   int typeV, int typeVp, int stop_on_first):
    """Exhaustive scan of Hom(V, V') over F_p with a digit odometer;
    returns (first witness digits or None, number scanned)."""
    cdef I64 p = p_in
    cdef int n = dimV
    cdef int npr = dimVp
    cdef int N = n * npr
    cdef long long total = 1
    cdef int i, j, t, pos, okV, okVp
    cdef I64 acc
    cdef long long it = 0
    cdef long long scanned = 0
    for i in range(N):
        total *= p
    w_np = np.zeros(N, dtype=np.int64)
    gvi_np = np.ascontiguousarray(np.asarray(GVinv_in, dtype=np.int64) % p)
    gvp_np = np.ascontiguousarray(np.asarray(GVp_in, dtype=np.int64) % p)
    buf_np = np.zeros(
        2 * n * npr + n * n + npr * npr + 3 * (n + npr) * (n + npr),
        dtype=np.int64,
    )
    cdef I64[:] wv = w_np
    cdef I64[:, :] gviv = gvi_np
    cdef I64[:, :] gvpv = gvp_np
    cdef I64[:] bufv = buf_np
    cdef I64* tmp
    cdef I64* S
    cdef I64* M
    cdef I64* work
    cdef bint hit = 0
    with nogil:
        tmp = &bufv[0]
        S = tmp + n * npr
        M = S + n * npr
        work = M + n * n + npr * npr
        while True:
            scanned += 1
            for i in range(n):
                for j in range(npr):
                    acc = 0
                    for t in range(n):
                        acc += gviv[i, t] * wv[j * n + t]
                    tmp[i * npr + j] = acc % p
            for i in range(n):
                for j in range(npr):
                    acc = 0
                    for t in range(npr):
                        acc += tmp[i * npr + t] * gvpv[t, j]
                    S[i * npr + j] = acc % p
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for t in range(npr):
                        acc += S[i * npr + t] * wv[t * n + j]
                    M[i * n + j] = acc % p
            okV = _rs_test(M, n, p, typeV, work)
            if okV == 1:
                for i in range(npr):
                    for j in range(npr):
                        acc = 0
                        for t in range(n):
                            acc += wv[i * n + t] * S[t * npr + j]
                        M[n * n + i * npr + j] = acc % p
                okVp = _rs_test(M + n * n, npr, p, typeVp, work)
                if okVp == 1:
                    hit = 1
                    break
            it += 1
            if it >= total:
                break
            pos = 0
            while wv[pos] == p - 1:
                wv[pos] = 0
                pos += 1
            wv[pos] += 1
    found = None
    if hit:
        found = tuple(int(w_np[i]) for i in range(N))
    return found, int(scanned)
