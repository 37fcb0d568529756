#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "momentlock/density.hpp"
#include "momentlock/grid.hpp"

namespace momentlock {

using MomentVector = std::vector<double>;

/// The moment-defining function T: R^K -> R^L whose expectations are pinned.
/// The polynomial family T_l(x) = x^l (K = 1) covers the shipped experiments;
/// custom component lists support arbitrary K through the solver.
class MomentDefiningFunction {
public:
    using Component = std::function<double(std::span<const double>)>;

    static MomentDefiningFunction polynomial(int degree);
    static MomentDefiningFunction custom(std::vector<Component> components,
                                         std::vector<std::string> names = {});
    /// Convenience for K = 1 custom components.
    static MomentDefiningFunction custom1d(
        std::vector<std::function<double(double)>> components,
        std::vector<std::string> names = {});

    int size() const noexcept { return length_; }  // L
    bool is_polynomial() const noexcept { return components_.empty(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    /// (T_1(x), ..., T_L(x)); throws NonFiniteValue on NaN/infinite components.
    MomentVector evaluate(std::span<const double> point) const;
    MomentVector evaluate(double x) const { return evaluate({&x, 1}); }

private:
    MomentDefiningFunction() = default;
    int length_ = 0;
    std::vector<Component> components_;  // empty for the polynomial family
    std::vector<std::string> names_;
};

inline MomentVector evaluate_T(const MomentDefiningFunction& t, double x) {
    return t.evaluate(x);
}

struct MomentTargets {
    enum class Source { analytic, oracle, user };
    MomentVector values;
    Source source = Source::user;
};

/// T-bar = integral of f*T: analytic for polynomial moments of the built-in
/// families, oracle quadrature otherwise.
MomentTargets targets_from_density(const Density& d, const MomentDefiningFunction& t);

enum class Feasibility { feasible, unverified, infeasible };

/// Componentwise box test of T-bar against T(D): strictly inside every
/// component range -> feasible (necessary condition only); strictly outside
/// some range -> infeasible; on the boundary -> unverified. True interiority
/// in conv T(D) is certified a posteriori by solver convergence.
Feasibility feasibility_precheck(const MomentDefiningFunction& t, const DiscreteSet& set,
                                 const MomentTargets& targets);

const char* to_string(Feasibility f);

}  // namespace momentlock
