"""Linear algebra over the ring Z_N.

Row spans of integer matrices modulo N are brought to Howell form: an
echelon form whose pivots divide N and whose row set is saturated, so
that every vector of the span with zeros in the first c columns is a
combination of the rows pivoting at or after column c.  That property
is what makes reduction-based membership tests and kernel extraction
exact.  The hot loop lives in a compiled extension when available.
"""

from __future__ import annotations

from math import gcd

import numpy as np

try:
    from twistlab._howell import howell_inplace as _compiled_howell
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build
    _compiled_howell = None
    BACKEND = "python"


def xgcd(a: int, b: int) -> tuple:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b)."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def unit_normalizer(d: int, N: int) -> int:
    """A unit u of Z_N with u*d = gcd(d, N) mod N."""
    g = gcd(d, N)
    m = N // g
    u = pow(d // g, -1, m) if m > 1 else 1
    while gcd(u, N) != 1:
        u += m
    return u % N


def _howell_python(A: np.ndarray, N: int) -> int:
    nrows, ncols = A.shape
    used = nrows
    # spare rows for annihilator vectors, one per pivot column at most
    A.resize((nrows + ncols, ncols), refcheck=False)
    A[nrows:] = 0
    row = 0
    for col in range(ncols):
        if row >= used:
            break
        nz = np.flatnonzero(A[row:used, col]) + row
        if nz.size == 0:
            continue
        if nz[0] != row:
            A[[row, nz[0]]] = A[[nz[0], row]]
        for i in np.flatnonzero(A[row + 1:used, col]) + row + 1:
            a, b = int(A[row, col]), int(A[i, col])
            g, s, t = xgcd(a, b)
            top = (s * A[row] + t * A[i]) % N
            A[i] = ((b // g) * A[row] - (a // g) * A[i]) % N
            A[row] = top
        u = unit_normalizer(int(A[row, col]), N)
        if u != 1:
            A[row] = (A[row] * u) % N
        d = int(A[row, col])
        for i in range(row):
            q = int(A[i, col]) // d
            if q:
                A[i] = (A[i] - q * A[row]) % N
        if d != 1:
            ann = (A[row] * (N // d)) % N
            if ann.any():
                A[used] = ann
                used += 1
        row += 1
    return row


def howell_form(rows, N: int, ncols: int | None = None, backend: str | None = None) -> np.ndarray:
    """Howell form of the row span of ``rows`` modulo N (zero rows dropped)."""
    A = np.array(rows, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(0 if A.size == 0 else 1, -1) if ncols is None else A.reshape(-1, ncols)
    if A.size == 0:
        return np.zeros((0, ncols or (A.shape[1] if A.ndim == 2 else 0)), dtype=np.int64)
    A = np.ascontiguousarray(A % N)
    use = backend or BACKEND
    if use == "compiled" and _compiled_howell is not None:
        nrows, n = A.shape
        buf = np.zeros((nrows + n, n), dtype=np.int64)
        buf[:nrows] = A
        rank = _compiled_howell(buf, nrows, N)
        return buf[:rank].copy()
    A = A.copy()
    rank = _howell_python(A, N)
    return A[:rank].copy()


def pivots(H: np.ndarray) -> list:
    """(column, pivot value) for each Howell row."""
    out = []
    for r in H:
        nz = np.flatnonzero(r)
        out.append((int(nz[0]), int(r[nz[0]])))
    return out


def span_order(H: np.ndarray, N: int) -> int:
    """Number of elements in the span of a Howell form."""
    order = 1
    for _, d in pivots(H):
        order *= N // d
    return order


def reduce(vec, H: np.ndarray, N: int, upto: int | None = None) -> tuple:
    """Reduce ``vec`` by the Howell rows pivoting before column ``upto``.

    Returns (residual, coefficients) with ``vec = coeffs @ H + residual``.
    """
    v = np.array(vec, dtype=np.int64) % N
    coeffs = np.zeros(len(H), dtype=np.int64)
    for i, (c, d) in enumerate(pivots(H)):
        if upto is not None and c >= upto:
            break
        q = int(v[c]) // d
        if q:
            v = (v - q * H[i]) % N
            coeffs[i] = q
    return v, coeffs


def kernel(A, N: int) -> np.ndarray:
    """Howell generators of {x : x A = 0 mod N}."""
    A = np.array(A, dtype=np.int64) % N
    m, n = A.shape
    aug = np.concatenate([A, np.eye(m, dtype=np.int64)], axis=1)
    H = howell_form(aug, N)
    keep = [r[n:] for r in H if not r[:n].any()]
    if not keep:
        return np.zeros((0, m), dtype=np.int64)
    return howell_form(keep, N)


def solve(A, b, N: int):
    """Some x with x A = b mod N, or None."""
    A = np.array(A, dtype=np.int64) % N
    m, n = A.shape
    aug = np.concatenate([A, np.eye(m, dtype=np.int64)], axis=1)
    H = howell_form(aug, N)
    target = np.concatenate([np.array(b, dtype=np.int64) % N, np.zeros(m, dtype=np.int64)])
    res, _ = reduce(target, H, N, upto=n)
    if res[:n].any():
        return None
    return (-res[n:]) % N
