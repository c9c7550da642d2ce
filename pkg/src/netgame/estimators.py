"""Naive and bias-correcting estimators of the degree distribution.

A random neighbor over-represents high-degree classes, so observed neighbor
shares are a biased sample of the population shares.  The naive rule reports
the observed shares as-is; the sophisticated rule divides each observed share
by its degree and renormalizes, which inverts the sampling bias exactly and
maximizes the multinomial likelihood of the observed neighbor counts.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .population import SHARE_TOL, ModelError, ObservedShares

NAIVE = "naive"
SOPHISTICATED = "sophisticated"
RULES = (NAIVE, SOPHISTICATED)


@dataclass(frozen=True)
class Estimate:
    """A probability vector over degree classes together with the rule used."""

    values: tuple
    rule: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.rule not in RULES:
            raise ModelError(f"unknown updating rule {self.rule!r}")
        if abs(sum(self.values) - 1) > SHARE_TOL:
            raise ModelError("estimated shares must sum to 1")
        if any(v < 0 or v > 1 for v in self.values):
            raise ModelError("estimated shares must lie in [0, 1]")


def naive_estimate(obs: ObservedShares) -> Estimate:
    """The observed neighbor shares taken at face value."""
    return Estimate(tuple(obs.values), NAIVE)


def debias_shares(values, degrees) -> tuple:
    """Divide shares by their degree and renormalize (the bias-inverting map).

    Applied to the biased neighbor shares this returns the true population
    shares exactly; classes with zero observed mass stay at zero.
    """
    if len(values) != len(degrees):
        raise ModelError("shares and degrees must have equal length")
    weights = [v / d for v, d in zip(values, degrees)]
    total = sum(weights)
    if total == 0:
        raise ModelError("cannot debias an all-zero share vector")
    return tuple(w / total for w in weights)


def sophisticated_mle(obs: ObservedShares, degrees) -> Estimate:
    """Degree-debiased maximum-likelihood estimate of the population shares."""
    return Estimate(debias_shares(obs.values, degrees), SOPHISTICATED)


def log_likelihood(delta, counts, degrees) -> float:
    """Multinomial log-likelihood of neighbor counts under candidate shares.

    The per-draw probability of class k is the degree-weighted share
    d_k * delta_k / sum(d * delta) -- what a random neighbor draw actually
    follows -- so the argmax over the simplex is ``sophisticated_mle``.  This
    evaluator exists as an independent check of that closed form.  Candidate
    shares on the simplex boundary yield -inf when the vanishing class was
    observed at least once.
    """
    if not len(delta) == len(counts) == len(degrees):
        raise ModelError("delta, counts and degrees must have equal length")
    for c in counts:
        if c != int(c) or c < 0:
            raise ModelError(f"counts must be non-negative integers, got {c!r}")
    weights = [float(d) * float(s) for d, s in zip(degrees, delta)]
    total = sum(weights)
    if total <= 0:
        raise ModelError("candidate shares must have positive total degree mass")
    n = sum(int(c) for c in counts)
    ll = math.lgamma(n + 1) - sum(math.lgamma(int(c) + 1) for c in counts)
    for c, w in zip(counts, weights):
        if c == 0:
            continue
        p = w / total
        if p <= 0:
            return float("-inf")
        ll += c * math.log(p)
    return ll


def observed_high_share(delta2, epsilon):
    """Share of high-degree neighbors observed when the true share is ``delta2``.

    Two-degree-class shorthand for :func:`netgame.population.biased_neighbor_share`
    with excess ratio ``epsilon`` = d_2/d_1 - 1.
    """
    return (1 + epsilon) * delta2 / (1 + epsilon * delta2)


def bias_surface(epsilon, grid=None) -> list:
    """Naive-minus-sophisticated estimate of the high share across true shares.

    With two degree classes the sophisticated estimate recovers the true share
    exactly while the naive one reports the biased neighbor share, so the gap
    is ``observed_high_share(x, epsilon) - x``: zero at both endpoints, a
    single interior maximum, and pointwise increasing in the excess ratio.
    Returns (true share, gap) pairs over a 1001-point grid by default.
    """
    if epsilon < 0:
        raise ModelError("excess ratio must be non-negative")
    if grid is None:
        grid = [Fraction(i, 1000) if isinstance(epsilon, Fraction) else i / 1000
                for i in range(1001)]
    return [(x, observed_high_share(x, epsilon) - x) for x in grid]


def bias_argmax(epsilon) -> float:
    """True high share at which the naive bias peaks: (sqrt(1+eps) - 1)/eps."""
    if epsilon <= 0:
        raise ModelError("excess ratio must be positive")
    return (math.sqrt(1 + epsilon) - 1) / epsilon
