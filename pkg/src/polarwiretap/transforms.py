"""Polarizing transforms: polar, Reed-Muller order, multi-kernel, ABS, random.

Orientation: a transform ``g`` maps inputs to codewords as ``x = g u`` and
inputs are decoded in natural index order.  Arikan's kernel is used as
``[[1, 1], [0, 1]]`` so that, over BEC(p), input 0 sees ``2p - p**2`` and
input 1 sees ``p**2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from importlib import resources
from math import comb
from pathlib import Path

import numpy as np

from . import gf2
from .bitchannel import MAX_KERNEL_SIZE, exhaustive_profile, mc_profile
from .gf2 import BinMatrix

__all__ = [
    "FAMILIES",
    "KernelSpec",
    "CodeConstruction",
    "arikan_kernel",
    "parse_kernel",
    "load_kernel",
    "format_kernel",
    "polar_transform",
    "rm_transform",
    "mk_transform",
    "abs_transform",
    "rl_transform",
]

FAMILIES = ("polar", "rm", "mk", "abs", "rl")

ABS_EXHAUSTIVE_MAX_N = 16
ABS_SAMPLES = 20_000


@dataclass(frozen=True)
class KernelSpec:
    """A square invertible kernel with its erasure decodability table.

    ``erasure_table[p, i]`` is True iff input ``i`` is decodable under
    erasure pattern ``p`` (bit ``k`` of ``p`` set means output ``k`` erased).
    """

    matrix: BinMatrix
    erasure_table: np.ndarray = field(repr=False, compare=False)
    name: str = ""

    @classmethod
    def from_matrix(cls, matrix, name: str = "") -> "KernelSpec":
        m = matrix if isinstance(matrix, BinMatrix) else BinMatrix.from_dense(matrix)
        if m.rows != m.cols:
            raise ValueError(f"kernel must be square, got {m.rows}x{m.cols}")
        if m.rows > MAX_KERNEL_SIZE:
            raise ValueError(f"kernel size {m.rows} exceeds {MAX_KERNEL_SIZE}")
        if not gf2.is_invertible(m):
            raise ValueError("kernel is singular over GF(2)")
        pats = gf2.all_erasure_patterns(m.rows)
        table = ~gf2.undecodable_batch(m, pats)
        table.setflags(write=False)
        return cls(m, table, name)

    @property
    def size(self) -> int:
        return self.matrix.rows

    @property
    def weight_counts(self) -> np.ndarray:
        """``[i, w]``: number of weight-``w`` patterns leaving input ``i`` undecodable."""
        return _kernel_weight_counts(self.erasure_table.tobytes(), self.size)

    def polynomial_coefficients(self) -> np.ndarray:
        """Monomial coefficients ``[i, d]`` of ``f_i(q) = sum_d c[i, d] q**d``."""
        ell = self.size
        counts = self.weight_counts
        coef = np.zeros((ell, ell + 1), dtype=np.int64)
        for w in range(ell + 1):
            # q**w (1-q)**(l-w) = sum_j C(l-w, j) (-1)**j q**(w+j)
            for j in range(ell - w + 1):
                coef[:, w + j] += counts[:, w] * comb(ell - w, j) * (-1) ** j
        return coef


@lru_cache(maxsize=32)
def _kernel_weight_counts(table_bytes: bytes, ell: int) -> np.ndarray:
    table = np.frombuffer(table_bytes, dtype=np.bool_).reshape(1 << ell, ell)
    weights = gf2.all_erasure_patterns(ell).sum(axis=1)
    counts = np.zeros((ell, ell + 1), dtype=np.int64)
    for w in range(ell + 1):
        counts[:, w] = (~table[weights == w]).sum(axis=0)
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=1)
def arikan_kernel() -> KernelSpec:
    return KernelSpec.from_matrix([[1, 1], [0, 1]], "G2")


def parse_kernel(text: str, name: str = "") -> KernelSpec:
    """Parse the kernel text format: a size line, then one 0/1 string per row."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty kernel file")
    try:
        ell = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the kernel size, got {lines[0]!r}") from None
    rows = lines[1:]
    if len(rows) != ell or any(len(r) != ell or set(r) - {"0", "1"} for r in rows):
        raise ValueError(f"expected {ell} rows of {ell} characters from {{0,1}}")
    dense = np.array([[int(c) for c in r] for r in rows], dtype=np.uint8)
    return KernelSpec.from_matrix(dense, name)


def load_kernel(path) -> KernelSpec:
    if str(path) == "builtin:g2":
        text = resources.files("polarwiretap").joinpath("kernels/g2.txt").read_text()
        return parse_kernel(text, "G2")
    path = Path(path)
    return parse_kernel(path.read_text(), path.stem)


def format_kernel(k: KernelSpec) -> str:
    return f"{k.size}\n{k.matrix.to_text()}\n"


@dataclass(frozen=True)
class CodeConstruction:
    """An invertible transform decoded in natural column order, plus provenance."""

    family: str
    transform: BinMatrix
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.transform.rows != self.transform.cols:
            raise ValueError("transform must be square")

    @property
    def n(self) -> int:
        return self.transform.rows

    def encode(self, u) -> np.ndarray:
        return self.transform @ np.asarray(u, dtype=np.uint8)

    def unencode(self, x) -> np.ndarray:
        return gf2.inverse(self.transform) @ np.asarray(x, dtype=np.uint8)


def _polar_matrix(m: int) -> BinMatrix:
    g2 = arikan_kernel().matrix
    return reduce(gf2.kron, [g2] * m)


def polar_transform(m: int) -> CodeConstruction:
    if m < 1:
        raise ValueError("m must be >= 1")
    return CodeConstruction("polar", _polar_matrix(m),
                            {"m": m, "kernels": ["G2"] * m})


def rm_transform(m: int) -> CodeConstruction:
    """Polar matrix with inputs reordered by increasing generator weight.

    Ties keep natural order.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    g = _polar_matrix(m)
    order = np.argsort(g.column_weights(), kind="stable")
    return CodeConstruction("rm", g.permute_columns(order),
                            {"m": m, "column_order": order.tolist(), "weight_ordered": True})


def mk_transform(kernels) -> CodeConstruction:
    """Kronecker product of ``kernels``; the first one acts next to the channel."""
    kernels = list(kernels)
    if not kernels:
        raise ValueError("kernel list is empty")
    g = reduce(gf2.kron, [k.matrix for k in kernels])
    return CodeConstruction("mk", g, {"kernels": [k.name or f"K{k.size}" for k in kernels],
                                      "kernel_sizes": [k.size for k in kernels]})


def _swap_pair(g: BinMatrix, pos: int) -> BinMatrix:
    order = np.arange(g.cols)
    order[[pos, pos + 1]] = order[[pos + 1, pos]]
    return g.permute_columns(order)


def abs_transform(m: int, p_b, p_e, exhaustive_max_n: int = ABS_EXHAUSTIVE_MAX_N,
                  samples: int = ABS_SAMPLES, seed: int = 0,
                  allow_swaps: bool = True) -> CodeConstruction:
    """Polar construction with adjacent input swaps between layers.

    After ``t`` butterfly layers (``1 <= t < m``) the partial transform has
    ``2**t`` inputs.  Candidate swaps are the pairs ``(2j+1, 2j+2)`` that
    straddle two butterfly pairs; a candidate is swapped when the earlier
    input is at least as good as the later one for both channels, i.e.
    ``eps_b[i] <= eps_b[i+1]`` and ``eps_e[i] <= eps_e[i+1]``, unless both
    pairs are exactly tied.  Erasures come from exhaustive enumeration while
    ``2**t <= exhaustive_max_n`` and from Monte-Carlo with ``samples``
    patterns (seeded from ``(seed, t)``) beyond that.  The next layer is
    ``kron(partial, G2)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    p_b = getattr(p_b, "erasure_prob", p_b)
    p_e = getattr(p_e, "erasure_prob", p_e)
    g2 = arikan_kernel().matrix
    g = g2
    schedule: list[tuple[int, int]] = []
    evaluations: dict[int, dict] = {}
    for t in range(1, m):
        nt = g.rows
        if allow_swaps:
            if nt <= exhaustive_max_n:
                bob = exhaustive_profile(g, p_b).erasure
                eve = exhaustive_profile(g, p_e).erasure
                method = "exhaustive"
            else:
                sb, se = np.random.SeedSequence([seed, t]).generate_state(2)
                bob = mc_profile(g, p_b, samples, int(sb)).erasure
                eve = mc_profile(g, p_e, samples, int(se)).erasure
                method = "monte-carlo"
            evaluations[t] = {"bob": bob, "eve": eve, "method": method}
            for pos in range(1, nt - 1, 2):
                tied = bob[pos] == bob[pos + 1] and eve[pos] == eve[pos + 1]
                if bob[pos] <= bob[pos + 1] and eve[pos] <= eve[pos + 1] and not tied:
                    g = _swap_pair(g, pos)
                    schedule.append((t, pos))
        g = gf2.kron(g, g2)
    return CodeConstruction("abs", g, {
        "m": m, "p_b": p_b, "p_e": p_e, "seed": seed, "samples": samples,
        "exhaustive_max_n": exhaustive_max_n, "swap_schedule": schedule,
        "evaluations": evaluations,
    })


def rl_transform(n: int, seed: int) -> CodeConstruction:
    return CodeConstruction("rl", gf2.random_invertible(n, seed), {"n": n, "seed": seed})
