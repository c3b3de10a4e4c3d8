# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled row reduction over a prime field."""

from libc.stdlib cimport malloc, free


cdef long long _inv(long long a, long long p) nogil:
    cdef long long t = 0, nt = 1, r = p, nr = a, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


def rank_mod_p_dense(long long[:, ::1] a, long long p):
    """Rank of ``a`` over F_p; ``a`` holds residues in ``[0, p)`` and is overwritten."""
    cdef Py_ssize_t nr = a.shape[0], nc = a.shape[1]
    cdef Py_ssize_t row = 0, col, i, k, piv, cnt
    cdef long long inv, f, tmp
    cdef Py_ssize_t* nz = <Py_ssize_t*> malloc((nc + 1) * sizeof(Py_ssize_t))
    if nz == NULL:
        raise MemoryError()
    try:
        with nogil:
            for col in range(nc):
                if row == nr:
                    break
                piv = -1
                for i in range(row, nr):
                    if a[i, col] != 0:
                        piv = i
                        break
                if piv < 0:
                    continue
                if piv != row:
                    for k in range(col, nc):
                        tmp = a[row, k]
                        a[row, k] = a[piv, k]
                        a[piv, k] = tmp
                inv = _inv(a[row, col], p)
                cnt = 0
                for k in range(col, nc):
                    if a[row, k] != 0:
                        a[row, k] = (a[row, k] * inv) % p
                        nz[cnt] = k
                        cnt += 1
                for i in range(row + 1, nr):
                    f = a[i, col]
                    if f == 0:
                        continue
                    f = p - f
                    for k in range(cnt):
                        a[i, nz[k]] = (a[i, nz[k]] + f * a[row, nz[k]]) % p
                row += 1
    finally:
        free(nz)
    return row
