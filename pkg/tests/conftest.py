"""Dense brute-force oracles shared by the test modules.

These never call the sparse builders: every oracle works from basis-index
arithmetic on plain numpy arrays.
"""
import itertools

import numpy as np
import pytest


def digits_of(k, levels):
    out = []
    for d in reversed(levels):
        k, r = divmod(k, d)
        out.append(r)
    return tuple(reversed(out))


def index_of(digits, levels):
    k = 0
    for x, d in zip(digits, levels):
        k = k * d + x
    return k


def dense_cug_oracle(levels, conditionals, ublocks):
    """Gate matrix from its basis action: when every conditional holds, each
    U-block acts on its own wires' digits; otherwise the basis ket is fixed."""
    levels = tuple(levels)
    dim = int(np.prod(levels))
    out = np.zeros((dim, dim), dtype=complex)
    spans = []
    for start, u in ublocks:
        u = np.asarray(u, dtype=complex)
        width, prod = 0, 1
        while prod < u.shape[0]:
            prod *= levels[start + width]
            width += 1
        assert prod == u.shape[0]
        spans.append((start, start + width, u))
    for col in range(dim):
        d = digits_of(col, levels)
        if not all(d[w] == s for w, s in conditionals):
            out[col, col] = 1
            continue
        # amplitudes over output digit tuples; each U-block acts independently
        terms = {d: 1.0 + 0j}
        for start, stop, u in spans:
            sub_levels = levels[start:stop]
            new = {}
            for digs, amp in terms.items():
                j = index_of(digs[start:stop], sub_levels)
                for i in range(u.shape[0]):
                    if u[i, j] != 0:
                        nd = digs[:start] + digits_of(i, sub_levels) + digs[stop:]
                        new[nd] = new.get(nd, 0) + amp * u[i, j]
            terms = new
        for digs, amp in terms.items():
            out[index_of(digs, levels), col] += amp
    return out


def dense_permutation(levels, f):
    """Matrix sending basis index k to f(k)."""
    dim = int(np.prod(levels))
    m = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        m[f(k), k] = 1
    return m


def random_unitary_dense(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def all_digit_tuples(levels):
    return list(itertools.product(*(range(d) for d in levels)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
