"""Shared helpers for the test suite: seeded random rationals, parameters
and polynomials (SplitMix64-backed so runs are reproducible)."""

from fractions import Fraction

from gaussmoments.moments import GaussianParams, MixtureParams
from gaussmoments.rng import SplitMix64


def rand_fraction(rng: SplitMix64, span: int = 5, max_den: int = 4) -> Fraction:
    num = rng.below(2 * span + 1) - span
    den = rng.below(max_den) + 1
    return Fraction(num, den)


def rand_nonzero_fraction(rng: SplitMix64, span: int = 5) -> Fraction:
    while True:
        x = rand_fraction(rng, span)
        if x != 0:
            return x


def rand_gaussian(rng: SplitMix64, n: int) -> GaussianParams:
    mean = tuple(rand_fraction(rng) for _ in range(n))
    cov = tuple(rand_fraction(rng) for _ in range(n * (n + 1) // 2))
    return GaussianParams(mean, cov)


def rand_mixture(rng: SplitMix64, n: int, k: int,
                 distinct_first: bool = False) -> MixtureParams:
    comps = [rand_gaussian(rng, n) for _ in range(k)]
    if distinct_first:
        while len({c.mean[0] for c in comps}) < k:
            comps = [rand_gaussian(rng, n) for _ in range(k)]
    weights = [Fraction(rng.below(5) + 1, 12) for _ in range(k - 1)]
    weights.append(1 - sum(weights))
    return MixtureParams(tuple(comps), tuple(weights))


def rand_poly(ring, rng: SplitMix64, max_terms: int = 6, max_exp: int = 3,
              trunc=None, field_rand=None):
    terms = {}
    nvars = len(ring.vars)
    for _ in range(rng.below(max_terms) + 1):
        e = tuple(rng.below(max_exp + 1) for _ in range(nvars))
        terms[e] = field_rand(rng) if field_rand else rand_fraction(rng)
    return ring.from_terms(terms, trunc=trunc)
