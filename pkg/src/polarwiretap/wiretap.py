"""Wiretap code design over a degraded BEC wiretap channel.

A design splits the inputs into three disjoint sets: ``A`` carries the
confidential message, ``R`` carries uniform random bits and ``B`` is frozen
to zero.  ``G = A | R`` are the inputs the legitimate receiver decodes.

The greedy design picks ``G`` as the largest prefix of inputs sorted by
the receiver's Bhattacharyya parameter whose sum stays below ``eps``, then
``A`` as the largest prefix of ``G`` sorted by eavesdropper TVD such that
half the TVD sum over ``A | B`` stays below ``delta``.  ``design_bound1``
repeats the second step with TVDs conditioned along a chosen decode order,
which are estimated on the column-permuted transform.

All index sets are 0-based numpy arrays in increasing order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bitchannel import DEFAULT_SAMPLES, BitChannelProfile, permuted_profile

__all__ = [
    "SecrecyOperatingPoint",
    "WiretapDesign",
    "design_bound2",
    "design_bound1",
    "design_asymptotic",
    "bound1_order",
    "bound2_value",
    "pe_bound",
    "secrecy_capacity",
    "dispersions",
    "q_function",
    "q_inverse",
    "second_order_bounds",
]


@dataclass(frozen=True)
class SecrecyOperatingPoint:
    """One design problem: BEC erasures, blocklength and the two budgets."""

    p_b: float
    p_e: float
    n: int
    eps: float
    delta: float

    def __post_init__(self):
        for name in ("p_b", "p_e"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.p_b > self.p_e:
            raise ValueError("eavesdropper channel must be degraded: need p_b <= p_e")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for name in ("eps", "delta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name}={v} outside (0, 1)")

    @property
    def p0(self) -> float:
        """Erasure probability of the BEC that degrades Bob's output into Eve's."""
        return 0.0 if self.p_b == 1.0 else (self.p_e - self.p_b) / (1.0 - self.p_b)


@dataclass(frozen=True)
class WiretapDesign:
    n: int
    set_a: np.ndarray
    set_r: np.ndarray
    set_b: np.ndarray
    delta0: float
    leakage_bound: float
    pe_bound: float
    variant: str
    order: np.ndarray | None = None
    ordered_tvd: np.ndarray | None = field(default=None, repr=False)
    info: dict = field(default_factory=dict, compare=False)

    @property
    def set_g(self) -> np.ndarray:
        return np.sort(np.concatenate([self.set_a, self.set_r]))

    @property
    def k_b(self) -> int:
        return len(self.set_a) + len(self.set_r)

    @property
    def k_e(self) -> int:
        return len(self.set_a)

    @property
    def secrecy_rate(self) -> float:
        return self.k_e / self.n

    @property
    def feasible(self) -> bool:
        return self.k_e > 0

    def to_dict(self) -> dict:
        d = {
            "variant": self.variant,
            "n": self.n,
            "index_base": 0,
            "set_a": self.set_a.tolist(),
            "set_r": self.set_r.tolist(),
            "set_b": self.set_b.tolist(),
            "k_b": self.k_b,
            "k_e": self.k_e,
            "secrecy_rate": self.secrecy_rate,
            "delta0": self.delta0,
            "leakage_bound": self.leakage_bound,
            "pe_bound": self.pe_bound,
            "feasible": self.feasible,
        }
        if self.order is not None:
            d["order"] = self.order.tolist()
        d.update(self.info)
        return d


def _idx(values) -> np.ndarray:
    return np.sort(np.asarray(list(values), dtype=np.int64).reshape(-1))


def _sorted_by(values: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """``idx`` sorted by increasing ``values[idx]``, ties by index."""
    idx = np.sort(idx)
    return idx[np.argsort(values[idx], kind="stable")]


def _largest_prefix(start: float, terms: np.ndarray, budget: float) -> int:
    """Largest k with ``start + sum(terms[:k]) < budget`` (terms nonnegative)."""
    return int(np.count_nonzero(start + np.cumsum(terms) < budget))


def _good_set(z: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    order_b = _sorted_by(z, np.arange(len(z)))
    k_b = _largest_prefix(0.0, z[order_b], eps)
    return order_b[:k_b], order_b[k_b:]


def _check_profiles(bob: BitChannelProfile, eve: BitChannelProfile, n: int | None = None):
    if bob.n != eve.n:
        raise ValueError(f"profile lengths differ: {bob.n} vs {eve.n}")
    if n is not None and bob.n != n:
        raise ValueError(f"profiles have n={bob.n}, operating point has n={n}")


def design_bound2(bob: BitChannelProfile, eve: BitChannelProfile, op: SecrecyOperatingPoint,
                  z: float = 0.0) -> WiretapDesign:
    """Greedy design certified by the marginal-TVD leakage bound.

    ``z > 0`` shifts Monte-Carlo estimates by ``z`` standard errors toward
    the pessimistic side for both budgets before thresholding.
    """
    _check_profiles(bob, eve, op.n)
    zb = bob.shifted(z).bhattacharyya
    te = eve.shifted(-z).tvd
    good, frozen = _good_set(zb, op.eps)
    order_e = _sorted_by(te, good)
    delta0 = 0.5 * float(te[frozen].sum())
    k_e = 0 if delta0 > op.delta else _largest_prefix(delta0, 0.5 * te[order_e], op.delta)
    a = order_e[:k_e]
    r = order_e[k_e:]
    return WiretapDesign(
        n=op.n, set_a=np.sort(a), set_r=np.sort(r), set_b=np.sort(frozen),
        delta0=delta0,
        leakage_bound=delta0 + 0.5 * float(te[a].sum()),
        pe_bound=float(zb[good].sum()),
        variant="bound2",
        info={"z": z},
    )


def bound1_order(set_b, good_sorted) -> np.ndarray:
    """Frozen inputs in natural order, then ``good_sorted`` as given."""
    return np.concatenate([_idx(set_b), np.asarray(good_sorted, dtype=np.int64)])


def design_bound1(code, bob: BitChannelProfile, eve: BitChannelProfile,
                  op: SecrecyOperatingPoint, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                  method: str = "monte-carlo", workers: int = 1,
                  z: float = 0.0) -> WiretapDesign:
    """Greedy design certified by the sequentially conditioned leakage bound.

    ``G`` and ``B`` come from the receiver profile as in ``design_bound2``.
    The decode order is ``B`` (natural order) followed by ``G`` sorted by
    increasing marginal eavesdropper TVD; along that order each input's TVD
    is taken given only the inputs before it, estimated on the permuted
    transform with ``method`` (``"monte-carlo"`` or ``"exhaustive"``).
    """
    _check_profiles(bob, eve, op.n)
    zb = bob.shifted(z).bhattacharyya
    good, frozen = _good_set(zb, op.eps)
    order_e = _sorted_by(eve.shifted(-z).tvd, good)
    order = bound1_order(frozen, order_e)
    cond = permuted_profile(code, order, op.p_e, samples=samples, seed=seed,
                            method=method, workers=workers)
    t_cond = cond.shifted(-z).tvd
    nb = len(frozen)
    delta0 = 0.5 * float(t_cond[:nb].sum())
    tail = t_cond[nb:]
    k_e = 0 if delta0 > op.delta else _largest_prefix(delta0, 0.5 * tail, op.delta)
    a = order_e[:k_e]
    info = {"z": z, "method": cond.method}
    if cond.method == "monte-carlo":
        info.update(samples=samples, seed=seed)
    return WiretapDesign(
        n=op.n, set_a=np.sort(a), set_r=np.sort(order_e[k_e:]), set_b=np.sort(frozen),
        delta0=delta0,
        leakage_bound=delta0 + 0.5 * float(tail[:k_e].sum()),
        pe_bound=float(zb[good].sum()),
        variant="bound1",
        order=order,
        ordered_tvd=t_cond,
        info=info,
    )


def design_asymptotic(bob: BitChannelProfile, eve: BitChannelProfile, beta: float,
                      delta_n: float) -> WiretapDesign:
    """Threshold-set design for vanishing leakage.

    ``G = {i : Z_b,i < 2**(-n**beta) / n}``, ``P = {i : T_e,i <= delta_n}``;
    ``A = G & P``, ``R = ~P``, ``B = P - G``.  The reported leakage bound is
    the TVD sum over ``P``.
    """
    _check_profiles(bob, eve)
    if not 0.0 < beta < 0.5:
        raise ValueError("beta must lie in (0, 1/2)")
    n = bob.n
    zb, te = bob.bhattacharyya, eve.tvd
    good = zb < 2.0 ** (-(n**beta)) / n
    poor = te <= delta_n
    a = np.flatnonzero(good & poor)
    r = np.flatnonzero(~poor)
    b = np.flatnonzero(poor & ~good)
    g = np.concatenate([a, r])
    return WiretapDesign(
        n=n, set_a=a, set_r=r, set_b=b,
        delta0=float(te[b].sum()),
        leakage_bound=float(te[poor].sum()),
        pe_bound=float(zb[g].sum()),
        variant="asymptotic",
        info={"beta": beta, "delta_n": delta_n},
    )


def bound2_value(a, b, eve: BitChannelProfile) -> float:
    """Half the marginal eavesdropper TVD sum over ``A | B``."""
    a, b = _idx(a), _idx(b)
    if np.intersect1d(a, b).size:
        raise ValueError("A and B must be disjoint")
    idx = np.concatenate([a, b])
    return 0.5 * float(eve.tvd[idx].sum())


def pe_bound(g, bob: BitChannelProfile, remark1: bool = False, a=None) -> float:
    """Union bound on the receiver's block error: ``sum_{i in G} Z_i``.

    With ``remark1`` only ``A`` and the inputs of ``G - A`` not beyond
    ``max(A)`` are counted, since decoding stops at the last message bit.
    """
    g = _idx(g)
    if remark1:
        if a is None:
            raise ValueError("remark1 needs the message set A")
        a = _idx(a)
        if a.size == 0:
            return 0.0
        g = g[g <= a.max()]
    return float(bob.bhattacharyya[g].sum())


def secrecy_capacity(op: SecrecyOperatingPoint) -> float:
    return op.p_e - op.p_b


def dispersions(op: SecrecyOperatingPoint) -> tuple[float, float, float]:
    """``(V_b, V_e, V_c)`` for the degraded BEC pair."""
    c_s = op.p_e - op.p_b
    return op.p_b * (1 - op.p_b), op.p_e * (1 - op.p_e), c_s * (1 - c_s)


def q_function(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def q_inverse(p: float, tol: float = 1e-10) -> float:
    """Inverse Gaussian tail by bisection on [-10, 10]."""
    if not 0.0 < p < 1.0:
        raise ValueError("Q^-1 needs p in (0, 1)")
    lo, hi = -10.0, 10.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def second_order_bounds(op: SecrecyOperatingPoint) -> tuple[float, float]:
    """Normal-approximation ``(upper, lower)`` on the maximal secrecy rate.

    The O(log n / n) remainders are dropped.
    """
    if op.eps + op.delta >= 1.0:
        raise ValueError("second-order bounds need eps + delta < 1")
    c_s = secrecy_capacity(op)
    v_b, v_e, v_c = dispersions(op)
    q_joint = q_inverse(op.eps + op.delta)
    if q_joint < 0:
        warnings.warn("eps + delta > 1/2: the upper bound exceeds the secrecy capacity",
                      stacklevel=2)
    upper = c_s - math.sqrt(v_c / op.n) * q_joint
    lower = (c_s - math.sqrt(v_b / op.n) * q_inverse(op.eps)
             - math.sqrt(v_e / op.n) * q_inverse(op.delta))
    return upper, lower
