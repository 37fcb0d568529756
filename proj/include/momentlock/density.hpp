#pragma once

#include <functional>
#include <string>

#include "momentlock/errors.hpp"

namespace momentlock {

enum class DensityKind { uniform, beta, std_normal, custom };

/// A continuous density on an interval of the real line. Immutable; the
/// built-in families carry analytic polynomial moments, custom densities are
/// an evaluation callback plus an explicit support and get their moments from
/// the quadrature oracle.
class Density {
public:
    static Density uniform(double lo, double hi);
    static Density beta(double a, double b);
    static Density std_normal();
    static Density custom(std::function<double(double)> pdf, double lo, double hi,
                          std::string name = "custom");

    DensityKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    /// f(x); zero outside the support.
    double pdf(double x) const;

    /// Integration bounds for the oracle. The standard normal is truncated at
    /// +-12 (tail mass < 1e-30, far below the 1e-12 oracle tolerance).
    double support_lo() const noexcept { return lo_; }
    double support_hi() const noexcept { return hi_; }
    bool unbounded_support() const noexcept { return unbounded_; }

    double param_a() const noexcept { return a_; }
    double param_b() const noexcept { return b_; }

private:
    Density() = default;

    DensityKind kind_ = DensityKind::uniform;
    std::string name_;
    double lo_ = 0.0;
    double hi_ = 1.0;
    bool unbounded_ = false;
    double a_ = 0.0;  // beta shape / uniform lo
    double b_ = 0.0;  // beta shape / uniform hi
    double log_norm_ = 0.0;  // log B(a,b) for beta
    std::function<double(double)> pdf_;
};

/// E[X^l] in closed form for the built-in families:
/// uniform [c,d]: (d^{l+1}-c^{l+1})/((l+1)(d-c)); beta(a,b): prod_j (a+j)/(a+b+j);
/// standard normal: 0 for odd l, (l-1)!! for even l.
/// Throws Unsupported for custom densities (use expectation_oracle).
double exact_polynomial_moment(const Density& d, int order);

/// Ground-truth integral of f*g by adaptive Gauss-Kronrod 7-15 with interval
/// bisection, independent of the trapezoid/Simpson machinery under test.
/// Throws NoConvergence if the segment budget is exhausted above `abs_tol`.
double expectation_oracle(const Density& d, const std::function<double(double)>& g,
                          double abs_tol = 1e-12);

}  // namespace momentlock
