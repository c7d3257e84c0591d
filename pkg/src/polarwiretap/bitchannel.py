"""Erasure probabilities of synthesized bit-channels over a BEC.

Over a BEC every bit-channel of a linear transform is again a BEC, so a
profile is just the vector of per-index erasure probabilities ``eps_i``;
the TVD and capacity of index ``i`` are ``1 - eps_i`` and its Bhattacharyya
parameter is ``eps_i``.  Three estimators are provided:

* ``arikan_recursion`` / ``kernel_recursion``: exact, Kronecker structure only.
* ``exhaustive_profile``: exact, any invertible transform with n <= 20.
* ``mc_profile`` / ``permuted_profile``: Monte-Carlo rank estimates, any n.

Indices are 0-based and follow the decode order of the transform columns.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel_metrics import Bec
from .gf2 import (
    BinMatrix,
    all_erasure_patterns,
    inverse,
    is_invertible,
    undecodable_batch,
)

__all__ = [
    "BitChannelProfile",
    "DEFAULT_SAMPLES",
    "EXHAUSTIVE_MAX_N",
    "arikan_recursion",
    "kernel_recursion",
    "erasure_polynomial",
    "undecodable_weight_counts",
    "exhaustive_profile",
    "mc_profile",
    "permuted_profile",
]

DEFAULT_SAMPLES = 100_000
EXHAUSTIVE_MAX_N = 20
MAX_KERNEL_SIZE = 20
# Patterns per RNG key; sample j always comes from key (seed, j // _MC_CHUNK).
_MC_CHUNK = 4096


def _bec(eps) -> Bec:
    return eps if isinstance(eps, Bec) else Bec(float(eps))


def _transform(code) -> BinMatrix:
    return code if isinstance(code, BinMatrix) else code.transform


@dataclass(frozen=True)
class BitChannelProfile:
    """Per-index erasure probabilities of the n bit-channels of one BEC."""

    erasure: np.ndarray
    method: str
    channel: Bec
    samples: int = 0
    std_err: np.ndarray | None = None
    order: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        e = np.asarray(self.erasure, dtype=float)
        if e.ndim != 1:
            raise ValueError("erasure vector must be 1-D")
        if (e < 0).any() or (e > 1).any():
            raise ValueError("erasure probabilities must lie in [0, 1]")
        e.setflags(write=False)
        object.__setattr__(self, "erasure", e)

    @property
    def n(self) -> int:
        return self.erasure.shape[0]

    @property
    def tvd(self) -> np.ndarray:
        return 1.0 - self.erasure

    @property
    def capacity(self) -> np.ndarray:
        return 1.0 - self.erasure

    @property
    def bhattacharyya(self) -> np.ndarray:
        return self.erasure

    def shifted(self, z: float) -> "BitChannelProfile":
        """Erasures moved by ``z`` standard errors, clipped to [0, 1].

        Positive ``z`` makes every channel look worse (safe for the
        legitimate receiver's reliability), negative ``z`` makes it look
        better (safe for the eavesdropper's leakage).
        """
        if z == 0 or self.std_err is None:
            return self
        e = np.clip(self.erasure + z * self.std_err, 0.0, 1.0)
        return BitChannelProfile(e, self.method, self.channel, self.samples,
                                 self.std_err, self.order)


# -------------------------------------------------------------- recursions


def arikan_recursion(eps, m: int) -> BitChannelProfile:
    """Exact polar profile: ``m`` rounds of ``e -> (2e - e**2, e**2)``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    ch = _bec(eps)
    e = np.array([ch.erasure_prob])
    for _ in range(m):
        e = np.stack([2 * e - e * e, e * e], axis=1).ravel()
    return BitChannelProfile(e, "recursion", ch)


def erasure_polynomial(weight_counts: np.ndarray, q) -> np.ndarray:
    """Evaluate ``f_i(q) = sum_w counts[i, w] q**w (1-q)**(l-w)``.

    ``weight_counts[i, w]`` is the number of erasure patterns of weight
    ``w`` that leave input ``i`` undecodable.  ``q`` may be a scalar or an
    array; the result has shape ``q.shape + (l,)``.
    """
    counts = np.asarray(weight_counts, dtype=float)
    ell = counts.shape[1] - 1
    q = np.asarray(q, dtype=float)[..., None]
    w = np.arange(ell + 1)
    basis = q**w * (1.0 - q) ** (ell - w)
    return basis @ counts.T


def kernel_recursion(kernels, eps) -> BitChannelProfile:
    """Exact profile of the Kronecker product of ``kernels``.

    The first kernel sits next to the channel: each stage maps every current
    erasure value ``q`` to ``(f_1(q), .., f_l(q))`` in place.
    """
    kernels = list(kernels)
    if not kernels:
        raise ValueError("kernel list is empty")
    ch = _bec(eps)
    e = np.array([ch.erasure_prob])
    for k in kernels:
        if k.size > MAX_KERNEL_SIZE:
            raise ValueError(f"kernel size {k.size} exceeds {MAX_KERNEL_SIZE}")
        e = erasure_polynomial(k.weight_counts, e).ravel()
    return BitChannelProfile(np.clip(e, 0.0, 1.0), "recursion", ch)


# ------------------------------------------------------------- exhaustive


@lru_cache(maxsize=64)
def _weight_counts_cached(g: BinMatrix) -> np.ndarray:
    n = g.rows
    pats = all_erasure_patterns(n)
    und = undecodable_batch(g, pats)
    weights = pats.sum(axis=1)
    counts = np.zeros((n, n + 1), dtype=np.int64)
    for w in range(n + 1):
        counts[:, w] = und[weights == w].sum(axis=0)
    counts.setflags(write=False)
    return counts


def undecodable_weight_counts(code) -> np.ndarray:
    """``counts[i, w]``: erasure patterns of weight ``w`` leaving input ``i`` undecodable."""
    g = _transform(code)
    if g.rows != g.cols:
        raise ValueError("transform must be square")
    if g.rows > EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive enumeration limited to n <= {EXHAUSTIVE_MAX_N}, got {g.rows}")
    if not is_invertible(g):
        raise ValueError("transform must be invertible over GF(2)")
    return _weight_counts_cached(g)


def exhaustive_profile(code, eps) -> BitChannelProfile:
    """Exact profile by summing over all ``2**n`` erasure patterns."""
    ch = _bec(eps)
    counts = undecodable_weight_counts(code)
    e = erasure_polynomial(counts, ch.erasure_prob)
    return BitChannelProfile(np.clip(e, 0.0, 1.0), "exhaustive", ch)


# ------------------------------------------------------------ monte carlo


def _mc_counts(g: BinMatrix, p: float, samples: int, seed: int, workers: int) -> np.ndarray:
    n = g.rows
    g_inv = inverse(g)
    spans = [(c, min(_MC_CHUNK, samples - c * _MC_CHUNK))
             for c in range((samples + _MC_CHUNK - 1) // _MC_CHUNK)]

    def run(span):
        c, size = span
        rng = np.random.default_rng([seed, c])
        pats = rng.random((_MC_CHUNK, n))[:size] < p
        return undecodable_batch(g, pats, g_inv).sum(axis=0, dtype=np.int64)

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    else:
        parts = [run(s) for s in spans]
    return np.sum(parts, axis=0, dtype=np.int64)


def mc_profile(code, eps, samples: int = DEFAULT_SAMPLES, seed: int = 0,
               workers: int = 1) -> BitChannelProfile:
    """Monte-Carlo profile from ``samples`` i.i.d. erasure patterns.

    One rank pass per pattern yields all n undecodability indicators.  The
    estimate is a pure function of ``(code, eps, samples, seed)``; ``workers``
    only changes how chunks are scheduled.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    ch = _bec(eps)
    g = _transform(code)
    counts = _mc_counts(g, ch.erasure_prob, samples, seed, workers)
    e = counts / samples
    se = np.sqrt(e * (1.0 - e) / samples)
    return BitChannelProfile(e, "monte-carlo", ch, samples, se)


def _check_order(order, n: int) -> np.ndarray:
    order = np.asarray(order, dtype=np.int64)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError("order must be a permutation of 0..n-1")
    return order


def permuted_profile(code, order, eps, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                     method: str = "monte-carlo", workers: int = 1) -> BitChannelProfile:
    """Profile of the transform decoded in ``order`` instead of natural order.

    Entry ``j`` is the erasure probability of input ``order[j]`` given the
    inputs ``order[:j]`` and the channel output, with ``order[j+1:]``
    unknown.  ``method`` is ``"monte-carlo"`` or ``"exhaustive"`` (n <= 20).
    """
    g = _transform(code)
    order = _check_order(order, g.cols)
    gp = g.permute_columns(order)
    if method == "monte-carlo":
        prof = mc_profile(gp, eps, samples, seed, workers)
    elif method == "exhaustive":
        prof = exhaustive_profile(gp, eps)
    else:
        raise ValueError(f"unknown method {method!r}")
    return BitChannelProfile(prof.erasure, prof.method, prof.channel, prof.samples,
                             prof.std_err, order)
