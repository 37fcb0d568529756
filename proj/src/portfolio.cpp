#include "momentlock/portfolio.hpp"

#include <cmath>
#include <limits>

#include "momentlock/density.hpp"
#include "momentlock/numerics.hpp"

namespace momentlock {

namespace {

struct FeasibleInterval {
    double lo, hi;
};

// theta range keeping theta X_i + R2 > 0 at every atom.
FeasibleInterval feasible_interval(std::span<const double> atoms, double gross_riskless) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (double a : atoms) {
        const double excess = a - gross_riskless;
        if (excess > 0.0) lo = std::max(lo, -gross_riskless / excess);
        if (excess < 0.0) hi = std::min(hi, gross_riskless / -excess);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw DomainViolation("portfolio problem unbounded: excess returns one-signed");
    return {lo, hi};
}

double foc(std::span<const double> atoms, std::span<const double> probs,
           const PortfolioProblem& p, double gross_riskless, double theta) {
    std::vector<double> terms(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double excess = atoms[i] - gross_riskless;
        terms[i] = probs[i] * std::pow(theta * excess + gross_riskless, -p.gamma) * excess;
    }
    return compensated_sum(terms);
}

}  // namespace

StockDiscretization discretize_stock_return(const PortfolioProblem& p) {
    if (p.m < 1) throw InvalidParams("portfolio discretization needs M >= 1");
    if (!(p.sigma > 0.0)) throw InvalidParams("sigma must be positive");
    if (p.gamma == 1.0)
        throw Unsupported("log-utility (gamma = 1) portfolio objective not covered");
    const double h = 1.0 / std::sqrt(static_cast<double>(p.m));
    const DiscreteSet grid = symmetric_grid(p.m, h);
    const Density normal = Density::std_normal();
    const QuadratureRule rule = p.rule == RuleKind::simpson ? simpson_weights(grid)
                                                            : trapezoid_weights(grid);
    const InitialDiscretization q = initial_discretization(normal, grid, rule);

    StockDiscretization out;
    out.grid = grid.coords();
    out.atoms.resize(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i)
        out.atoms[i] = std::exp(p.mu + p.sigma * out.grid[i]);

    if (p.order >= 2) {
        const MomentDefiningFunction t = MomentDefiningFunction::polynomial(p.order);
        const MomentTargets targets = targets_from_density(normal, t);
        out.fit = solve_dual(q, t, targets, p.solver);
        out.probs = out.fit.probs;
    } else {
        out.probs.assign(q.probs().begin(), q.probs().end());
    }
    return out;
}

double expected_utility(std::span<const double> atoms, std::span<const double> probs,
                        const PortfolioProblem& p, double theta) {
    if (atoms.size() != probs.size()) throw InvalidParams("atom/probability size mismatch");
    const double gross_riskless = std::exp(p.r);
    std::vector<double> terms(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double portfolio_return =
            theta * atoms[i] + (1.0 - theta) * gross_riskless;
        if (!(portfolio_return > 0.0))
            throw DomainViolation("portfolio gross return nonpositive at an atom");
        terms[i] = probs[i] * std::pow(portfolio_return, 1.0 - p.gamma);
    }
    return compensated_sum(terms) / (1.0 - p.gamma);
}

PortfolioSolution solve_portfolio(const PortfolioProblem& p,
                                  std::optional<double> reference_theta) {
    const StockDiscretization disc = discretize_stock_return(p);
    const double gross_riskless = std::exp(p.r);
    const FeasibleInterval iv = feasible_interval(disc.atoms, gross_riskless);
    const double pad = 1e-9 * (iv.hi - iv.lo);
    double a = iv.lo + pad;
    double b = iv.hi - pad;

    // Golden-section bracket of the maximum.
    const double inv_phi = 2.0 / (1.0 + std::sqrt(5.0));
    const auto utility = [&](double theta) {
        return expected_utility(disc.atoms, disc.probs, p, theta);
    };
    double ga = a, gb = b;
    double u = gb - inv_phi * (gb - ga);
    double v = ga + inv_phi * (gb - ga);
    double fu = utility(u), fv = utility(v);
    while (gb - ga > 1e-7) {
        if (fu >= fv) {
            gb = v;
            v = u;
            fv = fu;
            u = gb - inv_phi * (gb - ga);
            fu = utility(u);
        } else {
            ga = u;
            u = v;
            fu = fv;
            v = ga + inv_phi * (gb - ga);
            fv = utility(v);
        }
    }

    // Bisection of the first-order condition inside a padded golden bracket;
    // falls back to the whole feasible interval if the pad lost the root.
    double lo = std::max(a, ga - 1e-3);
    double hi = std::min(b, gb + 1e-3);
    const auto first_order = [&](double theta) {
        return foc(disc.atoms, disc.probs, p, gross_riskless, theta);
    };
    if (!(first_order(lo) > 0.0 && first_order(hi) < 0.0)) {
        lo = a;
        hi = b;
        if (!(first_order(lo) > 0.0 && first_order(hi) < 0.0))
            throw DomainViolation("first-order condition has no sign change");
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (first_order(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }

    PortfolioSolution sol;
    sol.theta = 0.5 * (lo + hi);
    sol.utility = utility(sol.theta);
    if (reference_theta) {
        const double rounded = std::round(sol.theta * 1e4) / 1e4;
        sol.rel_error_vs_reference = (rounded - *reference_theta) / *reference_theta * 100.0;
    } else {
        sol.rel_error_vs_reference = std::numeric_limits<double>::quiet_NaN();
    }
    return sol;
}

double taylor_theta_approx(const PortfolioProblem& p, double mean_excess,
                           double var_excess) {
    const double denom = p.gamma * var_excess - mean_excess * mean_excess;
    if (!(denom > 0.0))
        throw DegenerateDenominator("gamma var[X] - E[X]^2 must be positive");
    return std::exp(p.r) * mean_excess / denom;
}

}  // namespace momentlock
