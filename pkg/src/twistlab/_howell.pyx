# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Howell-form kernel; mirrors the NumPy implementation in zn_linalg."""

cimport cython


cdef inline long _gcd(long a, long b):
    while b:
        a, b = b, a % b
    return a


cdef inline long _mod(long a, long n):
    a = a % n
    if a < 0:
        a += n
    return a


cdef void _xgcd(long a, long b, long* g, long* s, long* t):
    cdef long s0 = 1, s1 = 0, t0 = 0, t1 = 1, q, r, tmp
    while b:
        q = a // b
        r = a - q * b
        a = b
        b = r
        tmp = s0 - q * s1
        s0 = s1
        s1 = tmp
        tmp = t0 - q * t1
        t0 = t1
        t1 = tmp
    g[0] = a
    s[0] = s0
    t[0] = t0


cdef long _unit(long d, long N):
    cdef long g = _gcd(d, N)
    cdef long m = N // g
    cdef long u = 1, gg, s, t
    if m > 1:
        _xgcd(_mod(d // g, m), m, &gg, &s, &t)
        u = _mod(s, m)
    while _gcd(u, N) != 1:
        u += m
    return u % N


def howell_inplace(long[:, ::1] A, long nrows, long N):
    """Howell form of the first ``nrows`` rows of A in place; returns the rank.

    A must have ``nrows + ncols`` rows; the spare rows hold annihilators.
    """
    cdef Py_ssize_t ncols = A.shape[1]
    cdef long used = nrows
    cdef long row = 0
    cdef Py_ssize_t col, i, j, k
    cdef long a, b, g, s, t, x, y, u, d, q, m
    for col in range(ncols):
        if row >= used:
            break
        k = -1
        for i in range(row, used):
            if A[i, col] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != row:
            for j in range(ncols):
                x = A[row, j]
                A[row, j] = A[k, j]
                A[k, j] = x
        for i in range(row + 1, used):
            b = A[i, col]
            if b == 0:
                continue
            a = A[row, col]
            _xgcd(a, b, &g, &s, &t)
            for j in range(col, ncols):
                x = A[row, j]
                y = A[i, j]
                A[row, j] = _mod(s * x + t * y, N)
                A[i, j] = _mod((b // g) * x - (a // g) * y, N)
        u = _unit(A[row, col], N)
        if u != 1:
            for j in range(col, ncols):
                A[row, j] = (A[row, j] * u) % N
        d = A[row, col]
        for i in range(row):
            q = A[i, col] // d
            if q:
                for j in range(col, ncols):
                    A[i, j] = _mod(A[i, j] - q * A[row, j], N)
        if d != 1:
            m = N // d
            k = 0
            for j in range(col, ncols):
                x = (A[row, j] * m) % N
                A[used, j] = x
                if x:
                    k = 1
            if k:
                used += 1
            else:
                for j in range(col, ncols):
                    A[used, j] = 0
        row += 1
    return row
