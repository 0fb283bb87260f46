"""Steinhaus random multiplicative functions and random Euler products.

Run: python3 demos/random_models.py   (about a minute)
"""

import math

from lowmoments import bound, chaos_discrete_moment, discretization_defect, expected_defect, mertens_product, rmf_moment
from lowmoments.chaos import discrete_mean_exact

SEED = 7


def main():
    print("E|sum f(n)|^2 = x, by Monte Carlo:")
    for x in (10, 100, 1000):
        m = rmf_moment(x, 1, 10_000, SEED)
        print(f"  x={x:5d}  {m.value:9.2f} +- {m.std_error:.2f}")

    print("\nnormalised first moment m(x) = E|sum f(n)| / sqrt(x) (slow decay, hard to resolve):")
    for x in (1000, 10_000, 100_000):
        m = rmf_moment(x, 0.5, 2000, SEED, threads=4)
        shape = bound("helson", x=x, q=0.5)
        print(f"  x={x:6d}  m = {m.value / math.sqrt(x):.4f} +- {m.std_error / math.sqrt(x):.4f}"
              f"  ratio to shape = {m.value / shape.value:.3f}")

    print("\ndiscrete chaos average at q=1 against its exact mean, and q=0.7 against the shape:")
    for P in (1000, 10_000):
        e1 = chaos_discrete_moment(P, 1, 2000, SEED, threads=4)
        e7 = chaos_discrete_moment(P, 0.7, 2000, SEED, threads=4)
        shape = bound("chaos", P=P, q=0.7)
        print(f"  P={P:6d}  q=1: {e1.value:7.3f} +- {e1.std_error:.3f} (exact {discrete_mean_exact(P):.3f})"
              f"  q=0.7 ratio: {e7.value / shape.value:.3f}")

    print("\ndiscretisation defect relative to E|F_P(1/2)|^2:")
    for P in (100, 1000, 10_000):
        d = discretization_defect(P, 5000, SEED, threads=4)
        exact = expected_defect(P) / mertens_product(P)
        print(f"  P={P:6d}  Monte Carlo {d.ratio:.4f} +- {d.ratio_se:.4f}   exact {exact:.4f}")


if __name__ == "__main__":
    main()
