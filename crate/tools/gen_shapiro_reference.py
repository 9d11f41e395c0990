"""Freeze scipy's Shapiro-Wilk W and p for seeded samples.

The samples are regenerated on the Rust side with the same SplitMix64 and
Box-Muller construction (textca-oracles `SplitMix64`), so only seeds and
results are stored. `head` and `sum` let the Rust test confirm that both
generators agree before comparing statistics.

Usage: python3 tools/gen_shapiro_reference.py > crates/core/tests/fixtures/shapiro_reference.json
"""

import json
import math

import scipy
from scipy import stats

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def normal(self):
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def sample(self, family, n):
        out = []
        for _ in range(n):
            if family == "normal":
                out.append(self.normal())
            elif family == "lognormal":
                out.append(math.exp(self.normal()))
            elif family == "uniform":
                out.append(self.uniform())
            elif family == "exponential":
                out.append(-math.log(1.0 - self.uniform()))
            else:
                raise ValueError(family)
        return out


SIZES = [3, 10, 100, 5000]
FAMILIES = ["normal", "lognormal", "uniform", "exponential", "lognormal"]


def main():
    cases = []
    for i in range(50):
        n = SIZES[i % len(SIZES)]
        family = FAMILIES[i % len(FAMILIES)]
        seed = 20_000 + 7 * i
        x = SplitMix64(seed).sample(family, n)
        res = stats.shapiro(x)
        cases.append(
            {
                "seed": seed,
                "family": family,
                "n": n,
                "head": x[:3],
                "sum": math.fsum(x),
                "w": float(res.statistic),
                "p": float(res.pvalue),
            }
        )
    doc = {"generator": "scipy.stats.shapiro", "scipy": scipy.__version__, "cases": cases}
    print(json.dumps(doc, indent=1))


if __name__ == "__main__":
    main()
