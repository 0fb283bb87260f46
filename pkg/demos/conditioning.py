"""Conditioning on prime sums: the partition of unity and the two sides of
the conditioned average (characters vs the random model), report only.

Run: python3 demos/conditioning.py
"""

import numpy as np

from lowmoments import PartitionParams, build_modulus_context, conditioned_average_char, conditioned_average_rmf
from lowmoments import select_parameters

SEED = 11


def main():
    plan = select_parameters(1e3, 1e6)
    print(f"plan for x=1e3, r=1e6: P={plan.P} M={plan.M} N={plan.N} delta={plan.delta:.4f} feasible={plan.feasible}")

    ctx = build_modulus_context(10007)
    params = PartitionParams(0.5, 3)
    print("\ncells j of S_0 at P=10 (M=0): sigma_j and E^j |sum_{n<=100} chi(n)|^2")
    print("   j   sigma_char   sigma_rand (se)        E^j char   E^j rand (se)")
    total_c = total_r = 0.0
    for j in range(-3, 5):
        c = conditioned_average_char(ctx, 10, params, [j], x=100)
        r = conditioned_average_rmf(10, params, [j], 100, 20_000, SEED, threads=4)
        total_c += c.sigma * c.value
        total_r += r.sigma * r.value
        z = (c.sigma - r.sigma) / r.sigma_se if r.sigma_se else np.nan
        print(f"  {j:2d}   {c.sigma:.5f}     {r.sigma:.5f} ({r.sigma_se:.5f})  z={z:5.2f}"
              f"   {c.value:9.3f}   {r.value:9.3f} ({r.value_se:.3f})")
    print(f"\nsum sigma_j E^j: characters {total_c:.6f}, random model {total_r:.3f} (both should be ~100)")


if __name__ == "__main__":
    main()
