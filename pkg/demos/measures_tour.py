"""Compare calibration measures on calibrated and miscalibrated data.

Run with ``python3 demos/measures_tour.py``.
"""

import numpy as np

from multical import (
    EmpiricalDistribution,
    Prior,
    classwise_ce,
    ece_canonical,
    fsce_exact,
    gen_calibrated,
    gen_subset_violation,
    psce_oracle,
    ssce_m,
)


def report(name, emp):
    rows = [
        ("classwise", classwise_ce(emp).value),
        ("ece", ece_canonical(emp).value),
        ("ssce m=2", ssce_m(emp, 2).value),
        ("psce m=2", psce_oracle(emp, 2).value),
        ("fsce", fsce_exact(emp).value),
    ]
    print(name)
    for label, value in rows:
        print(f"  {label:<10} {value:.4f}")


def main():
    prior = Prior.fixed_points([[0.2, 0.3, 0.5], [0.6, 0.3, 0.1], [1 / 3] * 3])
    report("calibrated, 3 fixed predictions, n=2000", gen_calibrated(prior, 2000, seed=0))
    emp, alpha = gen_subset_violation(3, [0, 1], 0.4, n=2000, seed=0)
    report(f"planted subset violation (certified {alpha:.3f}), n=2000", emp)
    rng = np.random.default_rng(0)
    print("ssce never exceeds psce, which never exceeds fsce:")
    for _ in range(3):
        V = rng.dirichlet(np.ones(4), size=12)
        e = EmpiricalDistribution(V, rng.integers(4, size=12))
        print(f"  {ssce_m(e, 2).value:.4f} <= {psce_oracle(e, 2).value:.4f} <= {fsce_exact(e).value:.4f}")


if __name__ == "__main__":
    main()
