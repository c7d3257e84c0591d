"""Greedy wiretap designs: the n=4 hand example, then polar n=1024 under both bounds."""

from polarwiretap import (
    SecrecyOperatingPoint,
    arikan_recursion,
    design_bound1,
    design_bound2,
    polar_transform,
    second_order_bounds,
    secrecy_capacity,
)

# n=4 by hand: Bob BEC(0.1), Eve BEC(0.5), eps=0.05, delta=0.6
op = SecrecyOperatingPoint(p_b=0.1, p_e=0.5, n=4, eps=0.05, delta=0.6)
d = design_bound2(arikan_recursion(0.1, 2), arikan_recursion(0.5, 2), op)
print("n=4:", "A =", d.set_a.tolist(), "R =", d.set_r.tolist(), "B =", d.set_b.tolist())
print("     R_s =", d.secrecy_rate, " leakage bound =", d.leakage_bound, " Pe bound =", d.pe_bound)

# tighten delta below the frozen-set leakage and the design collapses to rate 0
op_tight = SecrecyOperatingPoint(0.1, 0.5, 4, 0.05, 0.2)
print("delta=0.2 -> k_e =", design_bound2(arikan_recursion(0.1, 2), arikan_recursion(0.5, 2),
                                         op_tight).k_e)

# the two operating points of the sweep, at n=1024
for p_e in (0.3, 0.4):
    op = SecrecyOperatingPoint(0.05, p_e, 1024, 0.001, 0.01)
    bob, eve = arikan_recursion(0.05, 10), arikan_recursion(p_e, 10)
    d2 = design_bound2(bob, eve, op)
    # Bound 1 conditions each TVD on the earlier inputs; sampled on the permuted transform
    d1 = design_bound1(polar_transform(10), bob, eve, op, samples=20_000, seed=3)
    up, lo = second_order_bounds(op)
    print(f"p_e={p_e}: C_s={secrecy_capacity(op):.2f}  second-order [{lo:.4f}, {up:.4f}]")
    print(f"   bound2: k_b={d2.k_b} k_e={d2.k_e} delta0={d2.delta0:.4f}  R_s={d2.secrecy_rate:.4f}")
    print(f"   bound1: k_b={d1.k_b} k_e={d1.k_e} delta0={d1.delta0:.4f}  R_s={d1.secrecy_rate:.4f}")
