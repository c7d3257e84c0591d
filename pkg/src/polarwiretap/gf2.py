"""Bit-packed GF(2) matrices and the erasure decodability engine.

Matrices are stored row-major, 64 entries per ``uint64`` word, with entry
``(i, j)`` at bit ``j % 64`` of word ``j // 64`` in row ``i``.

The decodability engine answers, for an invertible ``g`` and a set of
unerased output positions ``U``, which inputs ``u_i`` of ``x = g u`` can be
solved for once ``u_1 .. u_{i-1}`` are known: exactly those ``i`` whose column
``g[U, i]`` is not in the span of ``g[U, i+1:]``.  Two equivalent routes are
implemented:

* primal: row-reduce ``g[U, :]`` scanning columns right to left; pivot
  columns are the decodable inputs.
* dual: row-reduce the rows of ``inv(g).T`` indexed by the erased set ``E``
  scanning left to right; pivot columns are the undecodable inputs.  The
  kernel of ``g[U, :]`` is spanned by the columns of ``inv(g)`` indexed by
  ``E``, and ``i`` is undecodable iff that kernel holds a vector whose lowest
  nonzero coordinate is ``i``.

The batch engine picks whichever side has fewer rows per pattern.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

__all__ = [
    "BinMatrix",
    "kron",
    "rank",
    "is_invertible",
    "inverse",
    "random_invertible",
    "suffix_decodable_profile",
    "undecodable_batch",
    "undecodable_batch_subset",
    "all_erasure_patterns",
]

_WORD = 64


def _nwords(cols: int) -> int:
    return max(1, (cols + _WORD - 1) // _WORD)


def _pack(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    w = _nwords(cols)
    padded = np.zeros((rows, w * _WORD), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


class BinMatrix:
    """Dense binary matrix over GF(2) with bit-packed rows.

    Instances are immutable; every operation returns a new matrix.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, words: np.ndarray, rows: int, cols: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.shape != (rows, _nwords(cols)):
            raise ValueError(f"packed storage shape {words.shape} does not fit {rows}x{cols}")
        words.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.words = words

    @classmethod
    def from_dense(cls, a) -> "BinMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        return cls(_pack(a.astype(np.uint8)), a.shape[0], a.shape[1])

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinMatrix":
        return cls(np.zeros((rows, _nwords(cols)), dtype=np.uint64), rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    @property
    def T(self) -> "BinMatrix":
        return BinMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other):
        """GF(2) product with another matrix, or with a 0/1 vector."""
        a = self.to_dense().astype(np.float64)
        if isinstance(other, BinMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            prod = a @ other.to_dense().astype(np.float64)
            return BinMatrix.from_dense(np.rint(prod).astype(np.int64) % 2)
        v = np.asarray(other)
        if v.shape[0] != self.cols:
            raise ValueError(f"shape mismatch {self.shape} @ {v.shape}")
        return (np.rint(a @ v.astype(np.float64)).astype(np.int64) % 2).astype(np.uint8)

    def permute_columns(self, order) -> "BinMatrix":
        """Matrix whose j-th column is column ``order[j]`` of this one."""
        order = np.asarray(order)
        if sorted(order.tolist()) != list(range(self.cols)):
            raise ValueError("order is not a permutation of the columns")
        return BinMatrix.from_dense(self.to_dense()[:, order])

    def row_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=1).astype(np.int64)

    def column_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0).astype(np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        if self.rows <= 8 and self.cols <= 32:
            body = "; ".join("".join(map(str, r)) for r in self.to_dense())
            return f"BinMatrix({self.rows}x{self.cols}: {body})"
        return f"BinMatrix({self.rows}x{self.cols})"

    def to_text(self) -> str:
        return "\n".join("".join(map(str, r)) for r in self.to_dense())


# ---------------------------------------------------------------- kernels


@njit(cache=True, nogil=True)
def _pivot_columns(rows, ncols, descending, out):
    """Row-reduce ``rows`` in place, marking pivot columns in ``out``.

    Columns are scanned right to left when ``descending``; a column is a
    pivot iff it is independent of the columns scanned before it.
    Returns the rank.
    """
    r = rows.shape[0]
    nw = rows.shape[1]
    top = 0
    for step in range(ncols):
        if top == r:
            break
        c = ncols - 1 - step if descending else step
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for k in range(top, r):
            if rows[k, w] & bit:
                piv = k
                break
        if piv < 0:
            continue
        if piv != top:
            for j in range(nw):
                tmp = rows[top, j]
                rows[top, j] = rows[piv, j]
                rows[piv, j] = tmp
        out[c] = True
        if descending:
            lo, hi = 0, w + 1
        else:
            lo, hi = w, nw
        for k in range(top + 1, r):
            if rows[k, w] & bit:
                for j in range(lo, hi):
                    rows[k, j] ^= rows[top, j]
        top += 1
    return top


@njit(cache=True, nogil=True)
def _rank_words(words, ncols):
    rows = words.copy()
    out = np.zeros(ncols, dtype=np.bool_)
    return _pivot_columns(rows, ncols, False, out)


@njit(cache=True, nogil=True)
def _inverse_words(words, n):
    """Gauss-Jordan inversion; returns (ok, inverse words)."""
    nw = words.shape[1]
    a = words.copy()
    b = np.zeros_like(a)
    for i in range(n):
        b[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
    for c in range(n):
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for k in range(c, n):
            if a[k, w] & bit:
                piv = k
                break
        if piv < 0:
            return False, b
        if piv != c:
            for j in range(nw):
                t = a[c, j]
                a[c, j] = a[piv, j]
                a[piv, j] = t
                t = b[c, j]
                b[c, j] = b[piv, j]
                b[piv, j] = t
        for k in range(n):
            if k != c and (a[k, w] & bit):
                for j in range(nw):
                    a[k, j] ^= a[c, j]
                    b[k, j] ^= b[c, j]
    return True, b


@njit(cache=True, nogil=True)
def _batch_undecodable(g_rows, ht_rows, n, erased, out):
    """Undecodable inputs of a square invertible transform, per pattern."""
    nw = g_rows.shape[1]
    piv = np.zeros(n, dtype=np.bool_)
    for s in range(erased.shape[0]):
        e = 0
        for k in range(n):
            if erased[s, k]:
                e += 1
        piv[:] = False
        if e <= n - e:
            rows = np.empty((e, nw), dtype=np.uint64)
            t = 0
            for k in range(n):
                if erased[s, k]:
                    rows[t] = ht_rows[k]
                    t += 1
            _pivot_columns(rows, n, False, piv)
            for i in range(n):
                out[s, i] = piv[i]
        else:
            rows = np.empty((n - e, nw), dtype=np.uint64)
            t = 0
            for k in range(n):
                if not erased[s, k]:
                    rows[t] = g_rows[k]
                    t += 1
            _pivot_columns(rows, n, True, piv)
            for i in range(n):
                out[s, i] = not piv[i]


@njit(cache=True, nogil=True)
def _batch_undecodable_primal(g_rows, ncols, erased, out):
    """Primal route only; ``g_rows`` may be any (non-square) matrix."""
    nrows = g_rows.shape[0]
    nw = g_rows.shape[1]
    piv = np.zeros(ncols, dtype=np.bool_)
    for s in range(erased.shape[0]):
        u = 0
        for k in range(nrows):
            if not erased[s, k]:
                u += 1
        rows = np.empty((u, nw), dtype=np.uint64)
        t = 0
        for k in range(nrows):
            if not erased[s, k]:
                rows[t] = g_rows[k]
                t += 1
        piv[:] = False
        _pivot_columns(rows, ncols, True, piv)
        for i in range(ncols):
            out[s, i] = not piv[i]


# ------------------------------------------------------------- operations


def kron(a: BinMatrix, b: BinMatrix) -> BinMatrix:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return BinMatrix.from_dense(np.kron(a.to_dense(), b.to_dense()))


def rank(a: BinMatrix) -> int:
    return int(_rank_words(np.array(a.words), a.cols))


def _require_square(a: BinMatrix):
    if a.rows != a.cols:
        raise ValueError(f"expected a square matrix, got {a.rows}x{a.cols}")


def is_invertible(a: BinMatrix) -> bool:
    _require_square(a)
    return rank(a) == a.rows


def inverse(a: BinMatrix) -> BinMatrix:
    _require_square(a)
    ok, inv = _inverse_words(np.array(a.words), a.rows)
    if not ok:
        raise ValueError("matrix is singular over GF(2)")
    return BinMatrix(inv, a.rows, a.cols)


def random_invertible(n: int, seed: int) -> BinMatrix:
    """Uniform Bernoulli(1/2) matrix, resampled until invertible.

    Attempt ``t`` draws from a generator keyed by ``(seed, t)``, so the
    result depends only on ``(n, seed)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    attempt = 0
    while True:
        rng = np.random.default_rng([seed, attempt])
        m = BinMatrix.from_dense(rng.integers(0, 2, size=(n, n), dtype=np.uint8))
        if is_invertible(m):
            return m
        attempt += 1


def suffix_decodable_profile(g: BinMatrix, unerased) -> np.ndarray:
    """Which inputs of ``x = g u`` are recoverable given the earlier ones.

    Entry ``i`` is True iff column ``i`` of ``g`` restricted to the unerased
    rows is independent of columns ``i+1 .. n-1`` on the same rows.  Columns
    are inserted into an incremental basis from last to first and entry
    ``i`` records whether inserting column ``i`` raised the rank.

    Parameters
    ----------
    g : BinMatrix
        Square invertible transform.
    unerased : array_like of bool, length n
        True where the output position is observed.
    """
    _require_square(g)
    if not is_invertible(g):
        raise ValueError("transform must be invertible over GF(2)")
    mask = np.asarray(unerased, dtype=bool)
    if mask.shape != (g.rows,):
        raise ValueError(f"mask length {mask.shape} does not match n={g.rows}")
    rows = np.array(g.words[mask])
    out = np.zeros(g.cols, dtype=np.bool_)
    _pivot_columns(rows, g.cols, True, out)
    return out


def _chunks(total: int, size: int):
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def undecodable_batch(g: BinMatrix, erased: np.ndarray, g_inv: BinMatrix | None = None,
                      workers: int = 1, chunk: int = 2048) -> np.ndarray:
    """Undecodable-input indicators for many erasure patterns at once.

    ``erased`` has shape ``(S, n)``; row ``s`` of the result is the logical
    negation of ``suffix_decodable_profile`` for pattern ``s``.  The work is
    split into fixed chunks that may run on ``workers`` threads; the result
    does not depend on ``workers``.
    """
    _require_square(g)
    n = g.rows
    erased = np.ascontiguousarray(erased, dtype=np.bool_)
    if erased.ndim != 2 or erased.shape[1] != n:
        raise ValueError(f"patterns must have shape (S, {n})")
    if g_inv is None:
        g_inv = inverse(g)
    g_rows = np.array(g.words)
    ht_rows = _pack(g_inv.to_dense().T.copy())
    out = np.zeros(erased.shape, dtype=np.bool_)

    def run(span):
        lo, hi = span
        _batch_undecodable(g_rows, ht_rows, n, erased[lo:hi], out[lo:hi])

    spans = _chunks(erased.shape[0], chunk)
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, spans))
    else:
        for span in spans:
            run(span)
    return out


def undecodable_batch_subset(g: BinMatrix, erased: np.ndarray) -> np.ndarray:
    """Primal-route batch for an arbitrary (possibly non-square) matrix.

    Column ``i`` is undecodable for a pattern iff it lies in the span of
    columns ``i+1 ..`` restricted to the unerased rows.
    """
    erased = np.ascontiguousarray(erased, dtype=np.bool_)
    if erased.ndim != 2 or erased.shape[1] != g.rows:
        raise ValueError(f"patterns must have shape (S, {g.rows})")
    out = np.zeros((erased.shape[0], g.cols), dtype=np.bool_)
    _batch_undecodable_primal(np.array(g.words), g.cols, erased, out)
    return out


def all_erasure_patterns(n: int) -> np.ndarray:
    """All ``2**n`` patterns; row ``p`` has position ``k`` erased iff bit ``k`` of ``p`` is set."""
    if n > 24:
        raise ValueError("enumeration limited to n <= 24")
    idx = np.arange(1 << n, dtype=np.int64)[:, None]
    return ((idx >> np.arange(n, dtype=np.int64)) & 1).astype(np.bool_)
