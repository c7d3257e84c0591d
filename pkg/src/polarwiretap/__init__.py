"""Polar-like wiretap codes over degraded binary erasure channels.

Modules
-------
gf2
    Bit-packed GF(2) matrices, rank, inversion and batched decodability.
channel_metrics
    DMC helpers: TVD, Bhattacharyya parameter, capacity, dispersion.
bitchannel
    Per-index erasure probabilities by recursion, enumeration or sampling.
transforms
    Polar, Reed-Muller ordered, multi-kernel, ABS and random transforms.
wiretap
    Greedy wiretap designs under the two TVD leakage bounds, and the
    second-order benchmarks.
oracle
    Exact leakage and block error at small blocklengths.
"""

from .bitchannel import (
    BitChannelProfile,
    arikan_recursion,
    exhaustive_profile,
    kernel_recursion,
    mc_profile,
    permuted_profile,
)
from .channel_metrics import Bec, Dmc
from .gf2 import BinMatrix
from .transforms import (
    CodeConstruction,
    KernelSpec,
    abs_transform,
    load_kernel,
    mk_transform,
    polar_transform,
    rl_transform,
    rm_transform,
)
from .wiretap import (
    SecrecyOperatingPoint,
    WiretapDesign,
    design_bound1,
    design_bound2,
    second_order_bounds,
    secrecy_capacity,
)

__version__ = "0.1.0"

__all__ = [
    "Bec",
    "BinMatrix",
    "BitChannelProfile",
    "CodeConstruction",
    "Dmc",
    "KernelSpec",
    "SecrecyOperatingPoint",
    "WiretapDesign",
    "abs_transform",
    "arikan_recursion",
    "design_bound1",
    "design_bound2",
    "exhaustive_profile",
    "kernel_recursion",
    "load_kernel",
    "mc_profile",
    "mk_transform",
    "permuted_profile",
    "polar_transform",
    "rl_transform",
    "rm_transform",
    "second_order_bounds",
    "secrecy_capacity",
]
