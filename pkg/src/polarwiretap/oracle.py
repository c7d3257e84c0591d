"""Exhaustive ground truth at small blocklengths.

Everything here enumerates: messages, random bits and erasure patterns for
the leakage, all erasure patterns for the block error.  Budgets keep the
enumeration tractable: ``n <= 12`` and ``k + r <= 16`` for the leakage,
``n <= 20`` for the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .bitchannel import EXHAUSTIVE_MAX_N, BitChannelProfile, exhaustive_profile, permuted_profile
from .wiretap import WiretapDesign, bound1_order, bound2_value, pe_bound

__all__ = [
    "LEAKAGE_MAX_N",
    "LEAKAGE_MAX_BITS",
    "BudgetError",
    "LeakageReport",
    "partition_design",
    "exact_leakage",
    "leakage_from_ranks",
    "exact_block_error",
    "exact_permuted_tvds",
    "natural_order",
    "permuted_order",
    "leakage_report",
]

LEAKAGE_MAX_N = 12
LEAKAGE_MAX_BITS = 16


class BudgetError(ValueError):
    """Requested enumeration exceeds the oracle budget."""


def _transform(code) -> gf2.BinMatrix:
    return code if isinstance(code, gf2.BinMatrix) else code.transform


def _pattern_probs(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    pats = gf2.all_erasure_patterns(n)
    w = pats.sum(axis=1)
    return pats, p**w * (1.0 - p) ** (n - w)


def partition_design(n: int, a, r, b) -> WiretapDesign:
    """A design from explicit sets, with no bound values attached."""
    a, r, b = (np.sort(np.asarray(list(s), dtype=np.int64).reshape(-1)) for s in (a, r, b))
    allidx = np.concatenate([a, r, b])
    if len(allidx) != n or not np.array_equal(np.sort(allidx), np.arange(n)):
        raise ValueError("A, R, B must partition 0..n-1")
    return WiretapDesign(n, a, r, b, np.nan, np.nan, np.nan, "manual")


def exact_leakage(code, design: WiretapDesign, p_e, frozen=None) -> float:
    """TVD between the joint law of (message, eavesdropper output) and the product of marginals.

    The message is uniform on ``{0,1}**k`` and written to ``A`` in increasing
    index order, ``R`` gets uniform bits and ``B`` gets ``frozen`` (zeros by
    default).  Eve sees each codeword bit or an erasure, independently with
    probability ``p_e``.
    """
    g = _transform(code)
    n = g.rows
    p = getattr(p_e, "erasure_prob", p_e)
    a, r, b = design.set_a, design.set_r, design.set_b
    k, nr = len(a), len(r)
    if n > LEAKAGE_MAX_N or k + nr > LEAKAGE_MAX_BITS:
        raise BudgetError(f"leakage oracle needs n <= {LEAKAGE_MAX_N} and k + r <= "
                          f"{LEAKAGE_MAX_BITS}; got n={n}, k + r={k + nr}")
    if k == 0:
        return 0.0
    dense = g.to_dense().astype(np.int64)
    weights = np.int64(1) << np.arange(n, dtype=np.int64)
    # codeword of a unit input, as an n-bit integer
    col_code = (dense * weights[:, None]).sum(axis=0)
    base = 0
    if frozen is not None:
        fb = np.asarray(frozen, dtype=np.int64)
        if fb.shape != (len(b),):
            raise ValueError("frozen pattern must have one bit per frozen index")
        for i, bit in zip(b, fb):
            if bit:
                base ^= int(col_code[i])

    def span_codes(idx):
        bits = gf2.all_erasure_patterns(len(idx))
        codes = np.zeros(len(bits), dtype=np.int64)
        for j, i in enumerate(idx):
            codes ^= np.where(bits[:, j], col_code[i], 0)
        return codes

    x = base ^ span_codes(a)[:, None] ^ span_codes(r)[None, :]    # [m, v]
    total_mv = x.size
    m_index = np.broadcast_to(np.arange(x.shape[0])[:, None], x.shape).ravel()
    pats, probs = _pattern_probs(n, p)
    leak = 0.0
    for pat, pr in zip(pats, probs):
        if pr == 0.0:
            continue
        umask = int((~pat).astype(np.int64) @ weights)
        keys = (x & umask).ravel()
        uniq, zi = np.unique(keys, return_inverse=True)
        nz = len(uniq)
        joint = np.bincount(m_index * nz + zi, minlength=x.shape[0] * nz)
        joint = joint.reshape(x.shape[0], nz) / total_mv
        prod = np.outer(np.full(x.shape[0], 1.0 / x.shape[0]), joint.sum(axis=0))
        leak += pr * 0.5 * np.abs(joint - prod).sum()
    return float(leak)


def leakage_from_ranks(code, design: WiretapDesign, p_e) -> float:
    """Closed-form leakage of a linear scheme, for cross-checking ``exact_leakage``.

    Given the unerased rows ``U``, Eve's view is the message image plus a
    uniform element of ``span(g[U, R])``, so the leakage for that pattern is
    ``1 - 2**-d`` with ``d = rank g[U, A|R] - rank g[U, R]``.
    """
    g = _transform(code).to_dense()
    n = g.shape[0]
    p = getattr(p_e, "erasure_prob", p_e)
    ar = np.concatenate([design.set_a, design.set_r])
    pats, probs = _pattern_probs(n, p)
    leak = 0.0
    for pat, pr in zip(pats, probs):
        rows = g[~pat]
        if rows.shape[0] == 0:
            continue
        d = (gf2.rank(gf2.BinMatrix.from_dense(rows[:, ar]))
             - gf2.rank(gf2.BinMatrix.from_dense(rows[:, design.set_r])))
        leak += pr * (1.0 - 2.0**-d)
    return float(leak)


def exact_block_error(code, design: WiretapDesign, p_b, remark1: bool = False) -> float:
    """Probability that successive decoding with known frozen bits fails.

    Decoding fails on a pattern iff some decoded index is undecodable given
    the earlier indices and the frozen bits; an erased bit counts as an
    error.  Decoded indices are ``A | R``, or with ``remark1`` only those not
    beyond ``max(A)``.
    """
    g = _transform(code)
    n = g.rows
    if n > EXHAUSTIVE_MAX_N:
        raise BudgetError(f"block-error oracle limited to n <= {EXHAUSTIVE_MAX_N}")
    p = getattr(p_b, "erasure_prob", p_b)
    keep = design.set_g
    targets = keep
    if remark1:
        if design.k_e == 0:
            return 0.0
        targets = keep[keep <= design.set_a.max()]
    if len(targets) == 0:
        return 0.0
    sub = gf2.BinMatrix.from_dense(g.to_dense()[:, keep])
    pats, probs = _pattern_probs(n, p)
    und = gf2.undecodable_batch_subset(sub, pats)
    fail = und[:, np.isin(keep, targets)].any(axis=1)
    return float(probs[fail].sum())


def exact_permuted_tvds(code, order, p_e) -> np.ndarray:
    """TVD of each input along ``order`` given the earlier inputs in ``order``."""
    return permuted_profile(code, order, p_e, method="exhaustive").tvd


def natural_order(design: WiretapDesign) -> np.ndarray:
    """``A | B`` in increasing index order, then ``R``."""
    return np.concatenate([np.sort(np.concatenate([design.set_a, design.set_b])),
                           design.set_r])


def permuted_order(design: WiretapDesign, eve: BitChannelProfile) -> np.ndarray:
    """``B`` in index order, ``A`` by increasing marginal TVD, then ``R``."""
    t = eve.tvd
    a = design.set_a[np.argsort(t[design.set_a], kind="stable")]
    return np.concatenate([bound1_order(design.set_b, a), design.set_r])


@dataclass(frozen=True)
class LeakageReport:
    exact_leakage: float
    bound1_natural: float
    bound1_permuted: float
    bound2: float
    exact_pe: float
    pe_bound: float
    exact_pe_remark1: float
    pe_bound_remark1: float
    config: dict = field(default_factory=dict)

    def chain_ok(self, tol: float = 1e-9) -> dict:
        return {
            "leakage<=bound1_natural": self.exact_leakage <= self.bound1_natural + tol,
            "bound1_natural<=bound2": self.bound1_natural <= self.bound2 + tol,
            "leakage<=bound1_permuted": self.exact_leakage <= self.bound1_permuted + tol,
            "pe<=pe_bound": self.exact_pe <= self.pe_bound + tol,
            "remark1_pe<=pe": self.exact_pe_remark1 <= self.exact_pe + tol,
            "remark1_bound<=pe_bound": self.pe_bound_remark1 <= self.pe_bound + tol,
            "leakage_in_[0,1]": -tol <= self.exact_leakage <= 1 + tol,
        }

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "exact_leakage", "bound1_natural", "bound1_permuted", "bound2",
            "exact_pe", "pe_bound", "exact_pe_remark1", "pe_bound_remark1")}
        d["config"] = self.config
        d["checks"] = self.chain_ok()
        return d


def leakage_report(code, design: WiretapDesign, p_b, p_e, config: dict | None = None) -> LeakageReport:
    """Exact leakage and block error next to every bound, for one design."""
    p_b = getattr(p_b, "erasure_prob", p_b)
    p_e = getattr(p_e, "erasure_prob", p_e)
    eve = exhaustive_profile(code, p_e)
    bob = exhaustive_profile(code, p_b)
    n_ab = design.k_e + len(design.set_b)
    b1_nat = 0.5 * float(exact_permuted_tvds(code, natural_order(design), p_e)[:n_ab].sum())
    b1_perm = 0.5 * float(exact_permuted_tvds(code, permuted_order(design, eve), p_e)[:n_ab].sum())
    return LeakageReport(
        exact_leakage=exact_leakage(code, design, p_e),
        bound1_natural=b1_nat,
        bound1_permuted=b1_perm,
        bound2=bound2_value(design.set_a, design.set_b, eve),
        exact_pe=exact_block_error(code, design, p_b),
        pe_bound=pe_bound(design.set_g, bob),
        exact_pe_remark1=exact_block_error(code, design, p_b, remark1=True),
        pe_bound_remark1=pe_bound(design.set_g, bob, remark1=True, a=design.set_a),
        config=dict(config or {}, p_b=p_b, p_e=p_e, set_a=design.set_a.tolist(),
                    set_r=design.set_r.tolist(), set_b=design.set_b.tolist()),
    )
