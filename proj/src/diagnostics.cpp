#include "momentlock/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "momentlock/numerics.hpp"

namespace momentlock {

namespace {

constexpr std::size_t kSupSamples = 100000;  // sup-norm sampling resolution

double weighted_sum(std::span<const double> w, const std::function<double(double)>& g,
                    const DiscreteSet& set) {
    std::vector<double> terms(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        terms[i] = w[i] * g(set.at(static_cast<int>(i)));
    return compensated_sum(terms);
}

double fit_slope_upper_half(std::span<const double> log_m, std::span<const double> log_e) {
    const std::size_t n = log_m.size();
    const std::size_t lo = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(n - lo);
    for (std::size_t i = lo; i < n; ++i) {
        sx += log_m[i];
        sy += log_e[i];
        sxx += log_m[i] * log_m[i];
        sxy += log_m[i] * log_e[i];
    }
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

}  // namespace

ErrorReport expectation_errors(const Density& d, const std::function<double(double)>& g,
                               const InitialDiscretization& q,
                               const MaxEntSolution& solution) {
    if (solution.probs.size() != q.probs().size())
        throw InvalidParams("solution and initial discretization sizes differ");
    ErrorReport r;
    r.exact = expectation_oracle(d, g);
    r.e_q = std::abs(r.exact - weighted_sum(q.probs(), g, q.set()));
    r.e_p = std::abs(r.exact - weighted_sum(solution.probs, g, q.set()));
    double sup = 0.0;
    for (std::size_t i = 0; i <= kSupSamples; ++i)
        sup = std::max(sup, std::abs(g(lerp_grid(d.support_lo(), d.support_hi(), i,
                                                 kSupSamples))));
    r.sup_g = sup;
    r.pinsker_bound_value = r.e_q + sup * std::sqrt(2.0 * solution.kl);
    return r;
}

double ChebyshevFit::evaluate(double x) const {
    const double t = (2.0 * x - (lo + hi)) / (hi - lo);
    double b1 = 0.0, b2 = 0.0;
    for (int k = degree; k >= 1; --k) {
        const double next = 2.0 * t * b1 - b2 + coeffs[static_cast<std::size_t>(k)];
        b2 = b1;
        b1 = next;
    }
    return t * b1 - b2 + coeffs[0];
}

ChebyshevFit chebyshev_fit(const std::function<double(double)>& g, double lo, double hi,
                           int degree) {
    if (degree < 1) throw InvalidParams("Chebyshev degree must be >= 1");
    if (!(lo < hi)) throw InvalidParams("chebyshev_fit needs lo < hi");
    ChebyshevFit fit;
    fit.degree = degree;
    fit.lo = lo;
    fit.hi = hi;

    const std::size_t n = static_cast<std::size_t>(degree);
    fit.nodes.resize(n + 1);
    std::vector<double> values(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        fit.nodes[j] = 0.5 * (lo + hi) +
                       0.5 * (hi - lo) * std::cos(j * std::numbers::pi / degree);
        values[j] = g(fit.nodes[j]);
        if (!std::isfinite(values[j]))
            throw NonFiniteValue("integrand not finite at a Chebyshev node");
    }

    // Discrete cosine sums for Chebyshev-Lobatto points; first/last terms and
    // the k = 0, L coefficients take half weight.
    fit.coeffs.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        double acc = 0.5 * (values[0] + (k % 2 == 0 ? values[n] : -values[n]));
        for (std::size_t j = 1; j < n; ++j)
            acc += values[j] * std::cos(k * j * std::numbers::pi / degree);
        fit.coeffs[k] = 2.0 * acc / degree;
    }
    fit.coeffs[0] *= 0.5;
    fit.coeffs[n] *= 0.5;

    double sup = 0.0;
    for (std::size_t i = 0; i <= kSupSamples; ++i) {
        const double x = lerp_grid(lo, hi, i, kSupSamples);
        sup = std::max(sup, std::abs(g(x) - fit.evaluate(x)));
    }
    fit.sup_residual = sup;
    return fit;
}

double moment_error(const InitialDiscretization& q, const MomentDefiningFunction& t,
                    const MomentTargets& targets) {
    if (targets.values.size() != static_cast<std::size_t>(t.size()))
        throw InvalidParams("target dimension does not match T");
    double sq = 0.0;
    for (int l = 0; l < t.size(); ++l) {
        std::vector<double> terms(q.probs().size());
        for (int i = 0; i < q.set().size(); ++i)
            terms[static_cast<std::size_t>(i)] =
                q.probs()[static_cast<std::size_t>(i)] *
                t.evaluate(q.set().point(i))[static_cast<std::size_t>(l)];
        const double defect =
            compensated_sum(terms) - targets.values[static_cast<std::size_t>(l)];
        sq += defect * defect;
    }
    return std::sqrt(sq);
}

ConvergenceStudy convergence_study(const Density& d,
                                   const std::function<double(double)>& g,
                                   RuleKind rule, int order,
                                   std::span<const int> m_range,
                                   const SolverConfig& cfg) {
    if (m_range.empty()) throw InvalidParams("empty M range");
    const double exact = expectation_oracle(d, g);
    const MomentDefiningFunction t = MomentDefiningFunction::polynomial(order);
    const MomentTargets targets = targets_from_density(d, t);

    ConvergenceStudy study;
    study.rows.reserve(m_range.size());
    for (int m : m_range) {
        ConvergenceRow row;
        row.m = m;
        row.points = 2 * m + 1;
        row.few_points_warning = row.points < 2 * (order + 1);
        const DiscreteSet set = uniform_grid(d.support_lo(), d.support_hi(), m);
        const QuadratureRule weights = rule == RuleKind::simpson
                                           ? simpson_weights(set)
                                           : trapezoid_weights(set);
        const InitialDiscretization q = initial_discretization(d, set, weights);
        row.e_q = std::abs(exact - weighted_sum(q.probs(), g, set));
        try {
            const MaxEntSolution sol = solve_dual(q, t, targets, cfg);
            row.e_p = std::abs(exact - weighted_sum(sol.probs, g, set));
            row.kl = sol.kl;
            row.pinsker_bound = std::sqrt(2.0 * sol.kl);
            row.moment_residual = sol.moment_residual;
        } catch (const Error& err) {
            row.error = err.kind();
            row.e_p = row.kl = row.pinsker_bound = row.moment_residual =
                std::numeric_limits<double>::quiet_NaN();
        }
        study.rows.push_back(std::move(row));
    }

    std::vector<double> log_m, log_q, log_p;
    bool p_ok = true;
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const ConvergenceRow& row = study.rows[i];
        log_m.push_back(std::log(static_cast<double>(row.m)));
        log_q.push_back(std::log(row.e_q));
        if (i >= study.rows.size() / 2 && (!row.error.empty() || !(row.e_p > 0.0)))
            p_ok = false;  // only the upper half enters the fit
        log_p.push_back(row.e_p > 0.0 ? std::log(row.e_p) : 0.0);
    }
    study.slope_q = fit_slope_upper_half(log_m, log_q);
    study.slope_p = p_ok ? fit_slope_upper_half(log_m, log_p)
                         : std::numeric_limits<double>::quiet_NaN();
    return study;
}

}  // namespace momentlock
