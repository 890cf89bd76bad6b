"""Regenerate the synthetic light.PAST-like yearly count fixture.

The real yearly counts come from a licensed corpus, so the shipped file is a
deterministic stand-in that reproduces the published marginals: 8869 tokens
over 1810-2009, quantile bins 1810-1863 (897 tokens), 1864-1886 (890) and
1994-2009 (884).  ``count_a`` is the regular form (lighted), ``count_b`` the
irregular one (lit).

    python scripts/make_light_fixture.py > src/fitdrift/data/light_past_synthetic.csv
"""

import numpy as np

SEGMENTS = [  # (first year, last year, tokens, minimum tokens in last year)
    (1810, 1863, 897, 11),
    (1864, 1886, 890, 14),
    (1887, 1993, 6198, 3),
    (1994, 2009, 884, 1),
]
EMPTY_YEARS = {1811, 1814, 1819, 1822}


def spread(years, total, rng):
    weights = rng.gamma(4.0, 1.0, size=len(years))
    raw = weights / weights.sum() * total
    counts = np.floor(raw).astype(int)
    order = np.argsort(raw - counts)[::-1]
    counts[order[: total - counts.sum()]] += 1
    return counts


def main():
    rng = np.random.default_rng(8869)
    rows = []
    for first, last, tokens, min_last in SEGMENTS:
        years = [y for y in range(first, last + 1) if y not in EMPTY_YEARS]
        counts = spread(years, tokens, rng)
        while counts[-1] < min_last:
            donor = int(np.argmax(counts[:-1]))
            counts[donor] -= 1
            counts[-1] += 1
        rows += list(zip(years, counts))
    print("year,count_a,count_b")
    for year, total in rows:
        share = 0.08 + 0.5 / (1.0 + np.exp((year - 1880) / 25.0))
        regular = int(rng.binomial(total, share))
        print(f"{year},{regular},{total - regular}")


if __name__ == "__main__":
    main()
