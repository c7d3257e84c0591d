"""Discrete memoryless channels and their quality functionals.

``t_information`` follows the un-halved convention: it is the L1 distance
between the joint input/output law and the product of its marginals, which
is twice the total variation distance.  All logarithms are base 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Dmc",
    "Bec",
    "bec_dmc",
    "bsc_dmc",
    "bec_postprocessor",
    "t_information",
    "tvd_of_channel",
    "bhattacharyya",
    "capacity_uniform",
    "degrade",
    "bec_metrics",
    "dispersion",
    "conditional_dispersion",
]

_ROW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Dmc:
    """Discrete memoryless channel; ``transition[x, y] = W(y|x)``."""

    transition: np.ndarray

    def __post_init__(self):
        t = np.array(self.transition, dtype=float)
        if t.ndim != 2:
            raise ValueError("transition matrix must be 2-D")
        if (t < 0).any() or (t > 1).any():
            raise ValueError("transition probabilities must lie in [0, 1]")
        if not np.allclose(t.sum(axis=1), 1.0, rtol=0, atol=_ROW_TOL):
            raise ValueError("each row of the transition matrix must sum to 1")
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dmc) and np.array_equal(self.transition, other.transition)

    def __hash__(self) -> int:
        return hash((self.transition.shape, self.transition.tobytes()))

    @property
    def input_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]


@dataclass(frozen=True)
class Bec:
    """Binary erasure channel, kept in closed form."""

    erasure_prob: float

    def __post_init__(self):
        if not 0.0 <= self.erasure_prob <= 1.0:
            raise ValueError(f"erasure probability {self.erasure_prob} outside [0, 1]")

    def as_dmc(self) -> Dmc:
        return bec_dmc(self.erasure_prob)


def bec_dmc(p: float) -> Dmc:
    """BEC(p) over outputs ``(0, ?, 1)``."""
    return Dmc(np.array([[1 - p, p, 0.0], [0.0, p, 1 - p]]))


def bsc_dmc(q: float) -> Dmc:
    return Dmc(np.array([[1 - q, q], [q, 1 - q]]))


def bec_postprocessor(p0: float) -> Dmc:
    """Erases each non-erased symbol of ``(0, ?, 1)`` with probability ``p0``."""
    return Dmc(np.array([[1 - p0, p0, 0.0], [0.0, 1.0, 0.0], [0.0, p0, 1 - p0]]))


def _check_distribution(w: Dmc, p_x) -> np.ndarray:
    p_x = np.asarray(p_x, dtype=float)
    if p_x.shape != (w.input_size,):
        raise ValueError(f"input distribution must have length {w.input_size}")
    if (p_x < 0).any() or abs(p_x.sum() - 1.0) > 1e-9:
        raise ValueError("input distribution must be nonnegative and sum to 1")
    return p_x


def t_information(w: Dmc, p_x) -> float:
    """``sum_{x,y} |p(x,y) - p(x) p(y)|`` for input law ``p_x``."""
    p_x = _check_distribution(w, p_x)
    joint = p_x[:, None] * w.transition
    p_y = joint.sum(axis=0)
    return float(np.abs(joint - np.outer(p_x, p_y)).sum())


def tvd_of_channel(w: Dmc, assume_symmetric: bool = True, grid: int = 101) -> float:
    """TVD of the channel, maximized over input laws.

    With ``assume_symmetric`` the uniform input is taken as the maximizer.
    Otherwise binary-input channels are searched over ``grid`` evenly spaced
    input biases; larger alphabets are searched along every edge of the
    simplex with the same grid, plus the uniform law.
    """
    k = w.input_size
    uniform = np.full(k, 1.0 / k)
    if assume_symmetric:
        return t_information(w, uniform)
    best = t_information(w, uniform)
    biases = np.linspace(0.0, 1.0, grid)
    for a in range(k):
        for b in range(a + 1, k):
            for t in biases:
                p = np.zeros(k)
                p[a], p[b] = t, 1.0 - t
                best = max(best, t_information(w, p))
    return best


def bhattacharyya(w: Dmc) -> float:
    if w.input_size != 2:
        raise ValueError("Bhattacharyya parameter needs a binary-input channel")
    return float(np.sqrt(w.transition[0] * w.transition[1]).sum())


def _xlogx_ratio(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz] / q[nz])
    return out


def capacity_uniform(w: Dmc) -> float:
    """Mutual information in bits at the uniform input."""
    p_x = np.full(w.input_size, 1.0 / w.input_size)
    joint = p_x[:, None] * w.transition
    prod = np.outer(p_x, joint.sum(axis=0))
    return float(_xlogx_ratio(joint, prod).sum())


def degrade(w: Dmc, p: Dmc) -> Dmc:
    """Channel ``w`` followed by ``p``."""
    if p.input_size != w.output_size:
        raise ValueError(
            f"cannot compose: {w.output_size} outputs into a channel with {p.input_size} inputs")
    q = w.transition @ p.transition
    return Dmc(q / q.sum(axis=1, keepdims=True))


def bec_metrics(c: Bec) -> tuple[float, float, float]:
    """``(T, Z, C)`` of a BEC in closed form."""
    e = c.erasure_prob
    return (1.0 - e, e, 1.0 - e)


def dispersion(w: Dmc) -> float:
    """Variance of the information density at the uniform input."""
    p_x = np.full(w.input_size, 1.0 / w.input_size)
    p_y = p_x @ w.transition
    total = 0.0
    for x in range(w.input_size):
        row = w.transition[x]
        nz = row > 0
        dens = np.log2(row[nz] / p_y[nz])
        mean = (row[nz] * dens).sum()
        total += p_x[x] * ((row[nz] * dens**2).sum() - mean**2)
    return float(total)


def conditional_dispersion(w: Dmc, p: Dmc) -> float:
    """Dispersion of ``I(X; Y | Z)`` for ``X -> w -> Y -> p -> Z``, uniform input.

    Each conditional variance is taken of
    ``log p(z, y | x) / (p(z | x) p(y | z))`` under ``p(z, y | x)``.
    """
    if p.input_size != w.output_size:
        raise ValueError("post-processing channel does not match the output alphabet")
    k = w.input_size
    p_x = np.full(k, 1.0 / k)
    joint_yz = w.transition[:, :, None] * p.transition[None, :, :]  # [x, y, z]
    p_z_given_x = joint_yz.sum(axis=1)                              # [x, z]
    p_yz = (p_x[:, None, None] * joint_yz).sum(axis=0)              # [y, z]
    p_z = p_yz.sum(axis=0)
    total = 0.0
    for x in range(k):
        jx = joint_yz[x]
        nz = jx > 0
        y_idx, z_idx = np.nonzero(nz)
        p_y_given_z = p_yz[y_idx, z_idx] / p_z[z_idx]
        dens = np.log2(jx[nz] / (p_z_given_x[x, z_idx] * p_y_given_z))
        mean = (jx[nz] * dens).sum()
        total += p_x[x] * ((jx[nz] * dens**2).sum() - mean**2)
    return float(total)
