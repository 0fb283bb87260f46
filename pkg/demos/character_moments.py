"""Character sums mod a prime: orthogonality, the low-moment saving, tails.

Run: python3 demos/character_moments.py
"""

import math

from lowmoments import bound, build_modulus_context, bulk_character_sums, empirical_moment, tail_fraction


def main():
    print("mean |S|^2 over all characters equals floor(x):")
    ctx = build_modulus_context(10007)
    for x in (10, 1000, 5003):
        t = bulk_character_sums(ctx, x)
        print(f"  r=10007 x={x:5d}  mean |S|^2 = {empirical_moment(t, 1).value:.6f}")

    print("\nfirst moment at x = sqrt(r), normalised by sqrt(x), and its ratio to the thm1 shape:")
    for r in (10007, 100003, 1000003):
        x = math.isqrt(r)
        est = empirical_moment(bulk_character_sums(build_modulus_context(r), x), 0.5)
        shape = bound("thm1", x=x, r=r, q=0.5)
        print(f"  r={r:8d} x={x:5d}  m = {est.value / math.sqrt(x):.4f}  ratio = {est.value / shape.value:.4f}")

    print("\nmoment ladder at r=100003, x=316 (Holder: M(q) <= M(1)^q):")
    t = bulk_character_sums(build_modulus_context(100003), 316)
    m1 = empirical_moment(t, 1).value
    for q in (0.25, 0.5, 0.75):
        mq = empirical_moment(t, q).value
        print(f"  q={q:.2f}  M(q) = {mq:10.4f}   M(1)^q = {m1**q:10.4f}")

    print("\ntail fractions |S| >= lambda sqrt(x) against the Chebyshev bound 1/lambda^2:")
    for lam in (2, 4, 8):
        print(f"  lambda={lam}  fraction = {tail_fraction(t, lam, normalized=False):.5f}  bound = {1 / lam**2:.5f}")


if __name__ == "__main__":
    main()
