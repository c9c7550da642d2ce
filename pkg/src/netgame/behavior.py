"""Actions and payoffs induced by equilibrium expectations.

Utility is linear-quadratic: theta*x plus a complementarity term in which own
action, own degree and the expected action of others multiply, minus c*x^2/2.
The best response is therefore linear in the held expectation, and inflated
expectations translate one-for-one into inflated actions.
"""

from dataclasses import dataclass

from .equilibrium import EquilibriumSolution, type_probabilities
from .population import DegreeModel, GameParams, degree_ratios


def best_response(theta, degree, expectation, model: DegreeModel, params: GameParams):
    """Optimal action theta/c + (alpha/d_1) * degree * expectation / c."""
    a = params.alpha / model.degrees[0]
    return theta / params.cost + a * degree * expectation / params.cost


def utility(action, theta, degree, expectation, model: DegreeModel, params: GameParams):
    """Payoff theta*x + (alpha/d_1)*x*degree*expectation - c*x^2/2."""
    a = params.alpha / model.degrees[0]
    return (theta * action
            + a * action * degree * expectation
            - params.cost * action * action / 2)


def expected_utility_under_truth(action, theta, degree, true_expectation,
                                 model: DegreeModel, params: GameParams):
    """Payoff of a (possibly misperception-driven) action at the expectation
    that actually prevails.

    Never exceeds the payoff of the best response to ``true_expectation``;
    the gap is the cost of acting on a wrong estimate.
    """
    return utility(action, theta, degree, true_expectation, model, params)


@dataclass(frozen=True)
class AgentOutcome:
    """Action and payoffs of one agent given the expectation it holds."""

    theta: float
    degree: int
    rule: str
    action: float
    realized_expectation: float
    utility: float
    expected_utility_under_truth: float


def evaluate_agent(theta, degree, rule, expectation, true_expectation,
                   model: DegreeModel, params: GameParams) -> AgentOutcome:
    """Best-respond to ``expectation`` and score the action both ways:
    at the held expectation and at the one that actually prevails."""
    action = best_response(theta, degree, expectation, model, params)
    return AgentOutcome(
        theta=theta,
        degree=degree,
        rule=rule,
        action=action,
        realized_expectation=expectation,
        utility=utility(action, theta, degree, expectation, model, params),
        expected_utility_under_truth=expected_utility_under_truth(
            action, theta, degree, true_expectation, model, params),
    )


def population_average_action(model: DegreeModel, params: GameParams,
                              expectation_or_solution):
    """Average best response across the population at theta = E[theta].

    A scalar input means every agent holds that expectation, so the average is
    E[theta]/c + (alpha/c) * E[rho] * expectation; at the full-information
    benchmark this reproduces the benchmark expectation itself.  For a solved
    finite system the per-type best responses are weighted by the true type
    probabilities (rule blocks mixed by the sophistication share).
    """
    if isinstance(expectation_or_solution, EquilibriumSolution):
        sol = expectation_or_solution
        types = sol.system.types
        w = type_probabilities(model, types, sigma=params.sigma)
        total = 0.0
        for t, weight, exp in zip(types, w, sol.xi):
            action = best_response(params.mean_preference, t.degree, exp,
                                   model, params)
            total += float(weight) * float(action)
        return total
    expectation = expectation_or_solution
    _, e1, _ = degree_ratios(model)
    return (params.mean_preference / params.cost
            + params.alpha * e1 * expectation / params.cost)
