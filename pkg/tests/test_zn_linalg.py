import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab import zn_linalg as z


def brute_span(rows, N, n):
    span = {(0,) * n}
    for r in rows:
        span = {tuple((s[j] + c * r[j]) % N for j in range(n)) for s in span for c in range(N)}
    return span


@st.composite
def matrices(draw):
    N = draw(st.sampled_from([2, 4, 6, 8, 12, 16]))
    m = draw(st.integers(1, 4))
    n = draw(st.integers(1, 3))
    rows = draw(st.lists(st.lists(st.integers(0, N - 1), min_size=n, max_size=n), min_size=m, max_size=m))
    return N, rows, n


def test_xgcd_and_units():
    g, s, t = z.xgcd(12, 18)
    assert g == 6 and s * 12 + t * 18 == 6
    for N in (8, 12):
        for d in range(N):
            u = z.unit_normalizer(d, N)
            assert np.gcd(u, N) == 1 and (u * d) % N == np.gcd(d, N) % N


def test_known_howell_form():
    # over Z_4 the row (2, 1) spans (0, 2) as well; Howell form makes that explicit
    H = z.howell_form([[2, 1]], 4)
    assert H.tolist() == [[2, 1], [0, 2]]
    assert z.span_order(H, 4) == 4


@pytest.mark.parametrize("backend", ["python", z.BACKEND])
@settings(max_examples=60, deadline=None)
@given(matrices())
def test_howell_span_and_membership(backend, mat):
    N, rows, n = mat
    H = z.howell_form(rows, N, backend=backend)
    span = brute_span(rows, N, n)
    assert brute_span(H.tolist(), N, n) == span
    assert z.span_order(H, N) == len(span)
    for v in itertools.product(range(N), repeat=n):
        rest, _ = z.reduce(v, H, N)
        assert (not rest.any()) == (v in span)


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_backends_agree(mat):
    N, rows, _ = mat
    assert np.array_equal(z.howell_form(rows, N, backend="python"), z.howell_form(rows, N, backend=z.BACKEND))


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_kernel_and_solve(mat):
    N, rows, n = mat
    A = np.array(rows)
    K = z.kernel(rows, N)
    brute = {x for x in itertools.product(range(N), repeat=len(rows)) if not (np.array(x) @ A % N).any()}
    assert brute_span(K.tolist(), N, len(rows)) == brute
    b = (np.arange(len(rows)) @ A) % N
    x = z.solve(rows, b, N)
    assert x is not None and np.array_equal(np.array(x) @ A % N, b)
