#pragma once

#include <optional>
#include <span>
#include <vector>

#include "momentlock/grid.hpp"
#include "momentlock/maxent.hpp"

namespace momentlock {

/// One risky lognormal asset (log R1 ~ N(mu, sigma^2)) against a riskless
/// bond (log R2 = r), CRRA investor with relative risk aversion gamma.
struct PortfolioProblem {
    double gamma = 3.0;
    double mu = 0.07;
    double sigma = 0.2;
    double r = 0.01;
    int m = 1;                        // positive grid points; I_M = 2M+1, h = 1/sqrt(M)
    int order = 0;                    // matched moment order L; 0 = initial rule only
    RuleKind rule = RuleKind::trapezoid;
    SolverConfig solver;
};

struct StockDiscretization {
    std::vector<double> grid;    // standard-normal grid points x
    std::vector<double> atoms;   // gross returns exp(mu + sigma x)
    std::vector<double> probs;
    MaxEntSolution fit;          // meaningful when order >= 2
};

/// Standard-normal grid {mh}, trapezoid (or Simpson) initial probabilities,
/// optional moment fine-tune against the exact normal moments up to `order`,
/// atoms mapped through exp(mu + sigma x).
StockDiscretization discretize_stock_return(const PortfolioProblem& p);

/// (1/(1-gamma)) sum_i p_i (theta R1_i + (1-theta) R2)^{1-gamma}.
/// Throws DomainViolation when a portfolio-return atom is nonpositive.
double expected_utility(std::span<const double> atoms, std::span<const double> probs,
                        const PortfolioProblem& p, double theta);

struct PortfolioSolution {
    double theta = 0.0;
    double utility = 0.0;
    /// Percent deviation of theta (rounded to 4 decimals, as tabulated) from
    /// the supplied reference; NaN when no reference was given.
    double rel_error_vs_reference = 0.0;
};

/// Maximizes expected utility over the feasible theta interval: golden
/// section brackets the maximum, then bisection on the first-order condition
/// E[(theta X + R2)^{-gamma} X] = 0 refines it.
PortfolioSolution solve_portfolio(const PortfolioProblem& p,
                                  std::optional<double> reference_theta = std::nullopt);

/// Small-risk closed form theta ~ R2 E[X] / (gamma var[X] - E[X]^2) for the
/// excess return X = R1 - R2.
double taylor_theta_approx(const PortfolioProblem& p, double mean_excess,
                           double var_excess);

}  // namespace momentlock
