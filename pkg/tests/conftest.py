import numpy as np
import pytest

from stftpr.generators import certified_instance


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


@pytest.fixture(scope="session")
def certified_sweep():
    """Seeded certified instances covering every (n, hop, windows) combination.

    n in {4, 8, 12, 16}, every divisor as hop, window counts hop..hop+2, four
    seeds each (one with a sparse contiguous support): 216 instances total.
    """
    cases = []
    for n in (4, 8, 12, 16):
        for hop in divisors(n):
            for extra in (0, 1, 2):
                num_windows = hop + extra
                for s in range(4):
                    seed = 1_000_000 + 10_000 * n + 1_000 * hop + 100 * num_windows + s
                    rng = np.random.default_rng(seed)
                    if s == 3 and n > 4:
                        supp = range(int(rng.integers(2, n)))
                    else:
                        supp = None
                    x, fam = certified_instance(n, hop, num_windows, rng, support=supp)
                    cases.append((n, hop, num_windows, x, fam))
    return cases
