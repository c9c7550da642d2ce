"""Degree populations, biased neighbor sampling, and the observed-share lattice.

Agents live on a large random network in which the chance of meeting someone
as a neighbor is proportional to that person's degree.  This module holds the
population primitives everything else builds on: the degree support with its
true shares, the game parameters, and the finite lattice of neighbor-share
vectors an agent with a given degree can possibly observe.

Values may be floats or :class:`fractions.Fraction`; every operation here is
plain arithmetic, so exact inputs give exact outputs.
"""

from dataclasses import InitVar, dataclass
from fractions import Fraction

SHARE_TOL = 1e-12
_COUNT_TOL = 1e-9


class ModelError(ValueError):
    """A model, parameter set, or observation violates its invariants."""


class StabilityError(ModelError):
    """Complementarities too strong relative to costs: no stable equilibrium."""


@dataclass(frozen=True)
class DegreeModel:
    """Degree support ``d_1 < ... < d_K`` with the true population shares."""

    degrees: tuple
    shares: tuple

    def __post_init__(self):
        degrees = []
        for d in self.degrees:
            if d != int(d) or int(d) < 1:
                raise ModelError(f"degrees must be positive integers, got {d!r}")
            degrees.append(int(d))
        object.__setattr__(self, "degrees", tuple(degrees))
        object.__setattr__(self, "shares", tuple(self.shares))
        if len(self.degrees) < 2:
            raise ModelError("need at least two degree classes")
        if len(self.shares) != len(self.degrees):
            raise ModelError("degrees and shares must have equal length")
        if any(a >= b for a, b in zip(self.degrees, self.degrees[1:])):
            raise ModelError("degrees must be distinct and strictly increasing")
        for s in self.shares:
            if not 0 < s < 1:
                raise ModelError(f"shares must lie strictly inside (0, 1), got {s!r}")
        if abs(sum(self.shares) - 1) > SHARE_TOL:
            raise ModelError("shares must sum to 1")

    @property
    def K(self) -> int:
        return len(self.degrees)

    @property
    def exact(self) -> bool:
        return any(isinstance(s, Fraction) for s in self.shares)

    @property
    def rho(self) -> tuple:
        """Degree ratios d_k / d_1, a scale-free measure of degree spread."""
        d1 = self.degrees[0]
        if self.exact:
            return tuple(Fraction(d, d1) for d in self.degrees)
        return tuple(d / d1 for d in self.degrees)

    @property
    def epsilon(self):
        """Excess ratio d_2/d_1 - 1.  Defined only for two degree classes."""
        if self.K != 2:
            raise ModelError("the excess ratio is defined only when K == 2")
        return self.rho[1] - 1


@dataclass(frozen=True)
class GameParams:
    """Preference mean, complementarity level, action cost, sophistication share.

    The complementarity level ``alpha`` is normalized by the lowest degree (the
    per-link weight is ``alpha / d_1``), which keeps the game comparable when
    every degree is scaled up.  Construction is rejected when ``alpha * d_K/d_1``
    exceeds ``cost`` for the model these parameters are meant for; strictly
    below is what guarantees a unique solution of the finite type system, and
    sitting exactly on the boundary still leaves every large-sample closed form
    finite (their denominators involve share-weighted moments, which stay
    strictly below the top ratio) while finite solves fail loudly.
    """

    mean_preference: float | Fraction
    alpha: float | Fraction
    cost: float | Fraction
    sigma: float | Fraction
    model: InitVar[DegreeModel]

    def __post_init__(self, model):
        if self.mean_preference < 0:
            raise ModelError("mean preference must be non-negative")
        if self.alpha < 0:
            raise ModelError("complementarity level must be non-negative")
        if self.cost <= 0:
            raise ModelError("action cost must be positive")
        if not 0 <= self.sigma <= 1:
            raise ModelError("sophistication share must lie in [0, 1]")
        rho_max = model.rho[-1]
        if self.alpha * rho_max > self.cost:
            raise StabilityError(
                "stability requires alpha * d_K/d_1 <= cost; got "
                f"alpha={self.alpha}, d_K/d_1={rho_max}, cost={self.cost}"
            )


@dataclass(frozen=True)
class ObservedShares:
    """Shares of each degree class among one agent's ``sample_size`` neighbors."""

    values: tuple
    sample_size: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        n = self.sample_size
        if n != int(n) or int(n) < 1:
            raise ModelError(f"sample size must be a positive integer, got {n!r}")
        object.__setattr__(self, "sample_size", int(n))
        if len(self.values) < 2:
            raise ModelError("need at least two degree classes")
        if abs(sum(self.values) - 1) > SHARE_TOL:
            raise ModelError("observed shares must sum to 1")
        for v in self.values:
            if not 0 <= v <= 1:
                raise ModelError(f"observed shares must lie in [0, 1], got {v!r}")
            scaled = v * self.sample_size
            if abs(scaled - round(scaled)) > _COUNT_TOL:
                raise ModelError(
                    "each share times the sample size must be a whole neighbor count"
                )

    @property
    def counts(self) -> tuple:
        """Neighbor counts per degree class."""
        return tuple(int(round(v * self.sample_size)) for v in self.values)

    @classmethod
    def from_counts(cls, counts, exact: bool = False) -> "ObservedShares":
        n = sum(counts)
        if exact:
            values = tuple(Fraction(int(c), int(n)) for c in counts)
        else:
            values = tuple(c / n for c in counts)
        return cls(values, int(n))


def biased_neighbor_share(model: DegreeModel) -> tuple:
    """Chance that a random neighbor belongs to each degree class.

    Weighting the true shares by degree is what tilts neighbor samples toward
    the well connected (the friendship paradox): class k turns up with
    probability d_k * s_k / sum(d * s) rather than s_k, so classes above the
    mean degree are over-represented.
    """
    weights = [d * s for d, s in zip(model.degrees, model.shares)]
    total = sum(weights)
    return tuple(w / total for w in weights)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def feasible_observed_shares(d_i: int, K: int, exact: bool = False) -> list:
    """Every neighbor-share vector an agent with ``d_i`` neighbors can observe.

    These are the compositions of d_i into K classes scaled by 1/d_i, so the
    cardinality is C(d_i + K - 1, K - 1).  Ordered by the share of the highest
    class, ties broken by the next class down, and so on.
    """
    if d_i < 1:
        raise ModelError("sample size must be at least 1")
    if K < 2:
        raise ModelError("need at least two degree classes")
    ordered = sorted(_compositions(int(d_i), int(K)), key=lambda c: tuple(reversed(c)))
    return [ObservedShares.from_counts(c, exact=exact) for c in ordered]


def degree_ratios(model: DegreeModel) -> tuple:
    """Degree ratios with their first two moments under the true shares.

    The ratio of the moments E[rho^2]/E[rho] is the mean degree ratio of a
    random *neighbor*; it exceeds E[rho] whenever the degrees vary at all.
    """
    rho = model.rho
    e1 = sum(s * r for s, r in zip(model.shares, rho))
    e2 = sum(s * r * r for s, r in zip(model.shares, rho))
    return rho, e1, e2
