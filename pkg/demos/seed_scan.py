"""How the library's default seed was chosen.

Scans seeds 1, 2, 3, ... and accepts the first one whose Bernoulli
stream jointly satisfies, at horizon 2**24:

  1. the adversarial doubling construction succeeds at all three
     data-driven steps (2, 4, 6) over 7 construction steps;
  2. empirical normality defects stay within the 4-sigma binomial bound
     4*sqrt(2^-|K| (1-2^-|K|) / |F_n|) for every nonempty K in {1,2,3},
     both for the classical windows at n = 10^6 and for the staircase
     doubling boxes at |F_n| = 2^20;
  3. the prefix mean over the first 10^6 bits lies in [0.497, 0.503].

Condition 1 dominates the rejection rate: the step-6 probe needs some
direction whose 16 added cells all read zero, roughly a
candidates * 2^-16 event per seed.  Conditions 2 and 3 hold for almost
every seed and merely guard against a freak stream.

Run:  python3 demos/seed_scan.py [max_seed]
"""

import math
import sys

from normlab.folner import FolnerSpec
from normlab.sampler import adversarial_doubling, bernoulli_seq, empirical_genericity

HORIZON = 1 << 24
STEPS = 7
K_FAMILY = [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]


def four_sigma(size: int, k: int) -> float:
    p = 2.0 ** -k
    return 4.0 * math.sqrt(p * (1.0 - p) / size)


def passes_genericity(x) -> bool:
    for spec, n, size in (
        (FolnerSpec.classical(), 10 ** 6, 10 ** 6),
        (FolnerSpec.doubling(), 20, 1 << 20),
    ):
        rep = empirical_genericity(x, spec, K_FAMILY, [n])
        for row in rep.rows:
            if float(row.defect) > four_sigma(size, len(row.K)):
                print(f"    genericity miss: {spec.variant} K={row.K} "
                      f"defect={float(row.defect):.5f}")
                return False
    return True


def main(max_seed: int) -> int:
    for seed in range(1, max_seed + 1):
        x = bernoulli_seq(seed, HORIZON)
        res = adversarial_doubling(x, STEPS)
        tail = res.trace[-1]
        print(f"seed {seed}: successes={res.successes} dirs={res.directions} "
              f"final={tail.fraction}")
        if res.successes < 3:
            continue
        mean = x.to_array()[: 10 ** 6].mean()
        print(f"  prefix mean = {mean:.6f}")
        if not 0.497 <= mean <= 0.503:
            continue
        if not passes_genericity(x):
            continue
        print(f"selected seed: {seed}")
        return seed
    print("no seed accepted in range")
    return -1


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 1000)
