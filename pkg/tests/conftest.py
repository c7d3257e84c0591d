import numpy as np
import pytest

from polarwiretap.gf2 import BinMatrix


def dense_rank(a) -> int:
    """Plain row reduction on a dense uint8 copy; independent of the packed kernels."""
    a = np.array(a, dtype=np.uint8) % 2
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def naive_undecodable(g_dense, erased) -> np.ndarray:
    """Two-rank test per input: column i independent of columns > i on unerased rows."""
    g = np.asarray(g_dense, dtype=np.uint8)[~np.asarray(erased, dtype=bool)]
    n = g.shape[1]
    out = np.zeros(n, dtype=bool)
    for i in range(n):
        out[i] = dense_rank(g[:, i:]) == dense_rank(g[:, i + 1:])
    return out


def random_invertible_dense(n, rng):
    while True:
        a = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        if dense_rank(a) == n:
            return a


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def kernel16_file(tmp_path):
    """A random invertible 16x16 kernel in the text format."""
    a = random_invertible_dense(16, np.random.default_rng(16))
    path = tmp_path / "k16.txt"
    path.write_text("16\n" + "\n".join("".join(map(str, r)) for r in a) + "\n")
    return path


G2T = BinMatrix.from_dense([[1, 1], [0, 1]])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in RESULTS:
        terminalreporter.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {detail}")
