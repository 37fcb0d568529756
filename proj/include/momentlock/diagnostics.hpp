#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "momentlock/density.hpp"
#include "momentlock/grid.hpp"
#include "momentlock/maxent.hpp"
#include "momentlock/moments.hpp"

namespace momentlock {

struct ErrorReport {
    double e_q = 0.0;                  // |int f g - sum q g|
    double e_p = 0.0;                  // |int f g - sum p g|
    double pinsker_bound_value = 0.0;  // e_q + sup|g| sqrt(2 H(P;Q))
    double sup_g = 0.0;                // sup|g| over the support, sampled
    double exact = 0.0;                // oracle integral of f g
};

/// Both approximation errors for one integrand, plus the computable bound
/// e_p <= e_q + sup|g| sqrt(2 H). sup|g| is taken over a uniform 1e5-point
/// sample of the support.
ErrorReport expectation_errors(const Density& d, const std::function<double(double)>& g,
                               const InitialDiscretization& q,
                               const MaxEntSolution& solution);

/// Degree-L Chebyshev interpolant of g on [lo, hi] through the L+1 nodes
/// (lo+hi)/2 + (hi-lo)/2 cos(j pi / L), coefficients in the Chebyshev basis.
struct ChebyshevFit {
    int degree = 0;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> coeffs;  // a_0..a_L, p(x) = sum a_k T_k(mapped x)
    std::vector<double> nodes;
    double sup_residual = 0.0;   // max |g - p| over a uniform 1e5-point sample

    double evaluate(double x) const;  // Clenshaw recurrence
};

ChebyshevFit chebyshev_fit(const std::function<double(double)>& g, double lo, double hi,
                           int degree);

/// Euclidean norm of the moment defect of Q itself.
double moment_error(const InitialDiscretization& q, const MomentDefiningFunction& t,
                    const MomentTargets& targets);

struct ConvergenceRow {
    int m = 0;
    int points = 0;
    double e_q = 0.0;
    double e_p = 0.0;
    double kl = 0.0;
    double pinsker_bound = 0.0;
    double moment_residual = 0.0;
    bool few_points_warning = false;  // I_M < 2(L+1) rule of thumb
    std::string error;                // typed solver error name, empty on success
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double slope_q = 0.0;  // log e_q vs log M least squares, upper half of range
    double slope_p = 0.0;  // NaN when the upper half has failed solves
};

/// Per-M errors of the initial rule and its moment-matched refinement, with
/// log-log convergence slopes fitted over the upper half of m_range (small-M
/// cells can be pre-asymptotic or pathological).
ConvergenceStudy convergence_study(const Density& d,
                                   const std::function<double(double)>& g,
                                   RuleKind rule, int order,
                                   std::span<const int> m_range,
                                   const SolverConfig& cfg = {});

}  // namespace momentlock
