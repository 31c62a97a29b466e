import itertools
import sys

import numpy as np
import pytest


def dense_polar_matrix(m):
    """G_n built from its definition: bit-reversal rows of the m-fold Kronecker power."""
    g = np.array([[1, 0], [1, 1]], dtype=np.int64)
    k = np.ones((1, 1), dtype=np.int64)
    for _ in range(m):
        k = np.kron(k, g)
    n = 1 << m
    rev = [int(format(i, f"0{m}b")[::-1], 2) if m else 0 for i in range(n)]
    return k[rev]


def bitchannel_by_definition(T, n, i):
    """W_i(y, u_0..u_{i-1} | u_i) by looping over every input vector.

    ``T`` is the 2 x |Z| transition table; outputs of the result are indexed
    by (u_prefix, y) with y in mixed radix, first coordinate most significant.
    """
    m = n.bit_length() - 1
    G = dense_polar_matrix(m)
    q = T.shape[1]
    out = np.zeros((2, (2 ** i) * q ** n))
    for u in itertools.product((0, 1), repeat=n):
        x = np.array(u) @ G % 2
        prefix = int("".join(map(str, u[:i])) or "0", 2)
        for y in itertools.product(range(q), repeat=n):
            p = np.prod([T[x[j], y[j]] for j in range(n)])
            yi = 0
            for s in y:
                yi = yi * q + s
            out[u[i], prefix * q ** n + yi] += p / 2 ** (n - 1)
    return out


def capacity_by_definition(T):
    T = np.asarray(T, dtype=float)
    py = T.mean(axis=0)
    total = 0.0
    for x in range(T.shape[0]):
        for z in range(T.shape[1]):
            if T[x, z] > 0:
                total += 0.5 * T[x, z] * np.log2(T[x, z] / py[z])
    return total


def bhattacharyya_by_definition(T):
    return float(np.sum(np.sqrt(T[0] * T[1])))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.report_line(number))
