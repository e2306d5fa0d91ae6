"""Collision testing on a hard family.

The test sees nothing until predictions repeat, roughly at ``n ~ sqrt(|V|)``.

Run with ``python3 demos/birthday_lab.py``.
"""

import math

from multical import birthday_experiment, build_hard_family, fsce_exact
from multical.lowerbound import collision_consistency_test


def main():
    family = build_hard_family(4, 0.25, seed=0)
    size = family.size
    print(f"|V| = {size}, fsce of the family {fsce_exact(family.full_support()).value:.3f}")
    print(f"{'n':>4} {'p1':>7} {'p2':>7} {'gap':>7} {'n^2/2|V|':>9}")
    for n in sorted({2, 5, int(math.sqrt(size)), 20, math.ceil(3 * math.sqrt(size)), 60}):
        r = birthday_experiment(family, n, 1000, collision_consistency_test, seed=n)
        print(f"{n:>4} {r.p1:>7.3f} {r.p2:>7.3f} {r.gap:>7.3f} {n * n / (2 * size):>9.3f}")


if __name__ == "__main__":
    main()
