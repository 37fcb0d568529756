#include "momentlock/moments.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace momentlock {

MomentDefiningFunction MomentDefiningFunction::polynomial(int degree) {
    if (degree < 1) throw InvalidParams("polynomial moment degree must be >= 1");
    MomentDefiningFunction t;
    t.length_ = degree;
    t.names_.reserve(degree);
    for (int l = 1; l <= degree; ++l) t.names_.push_back("x^" + std::to_string(l));
    return t;
}

MomentDefiningFunction MomentDefiningFunction::custom(std::vector<Component> components,
                                                      std::vector<std::string> names) {
    if (components.empty()) throw InvalidParams("T needs at least one component");
    MomentDefiningFunction t;
    t.length_ = static_cast<int>(components.size());
    t.components_ = std::move(components);
    if (names.empty()) {
        for (int l = 1; l <= t.length_; ++l) t.names_.push_back("T" + std::to_string(l));
    } else {
        if (names.size() != static_cast<std::size_t>(t.length_))
            throw InvalidParams("component name count mismatch");
        t.names_ = std::move(names);
    }
    return t;
}

MomentDefiningFunction MomentDefiningFunction::custom1d(
    std::vector<std::function<double(double)>> components,
    std::vector<std::string> names) {
    std::vector<Component> lifted;
    lifted.reserve(components.size());
    for (auto& c : components)
        lifted.push_back([fn = std::move(c)](std::span<const double> x) {
            return fn(x[0]);
        });
    return custom(std::move(lifted), std::move(names));
}

MomentVector MomentDefiningFunction::evaluate(std::span<const double> point) const {
    MomentVector out(static_cast<std::size_t>(length_));
    if (is_polynomial()) {
        if (point.size() != 1)
            throw InvalidParams("polynomial moments are defined on scalar points");
        double pw = 1.0;
        for (int l = 0; l < length_; ++l) {
            pw *= point[0];
            out[static_cast<std::size_t>(l)] = pw;
        }
    } else {
        for (int l = 0; l < length_; ++l)
            out[static_cast<std::size_t>(l)] = components_[static_cast<std::size_t>(l)](point);
    }
    for (int l = 0; l < length_; ++l)
        if (!std::isfinite(out[static_cast<std::size_t>(l)]))
            throw NonFiniteValue("component " + names_[static_cast<std::size_t>(l)] +
                                 " is not finite at the evaluation point");
    return out;
}

MomentTargets targets_from_density(const Density& d, const MomentDefiningFunction& t) {
    MomentTargets targets;
    targets.values.resize(static_cast<std::size_t>(t.size()));
    if (t.is_polynomial() && d.kind() != DensityKind::custom) {
        for (int l = 1; l <= t.size(); ++l)
            targets.values[static_cast<std::size_t>(l - 1)] = exact_polynomial_moment(d, l);
        targets.source = MomentTargets::Source::analytic;
        return targets;
    }
    for (int l = 0; l < t.size(); ++l) {
        targets.values[static_cast<std::size_t>(l)] = expectation_oracle(
            d, [&t, l](double x) { return t.evaluate(x)[static_cast<std::size_t>(l)]; });
    }
    targets.source = MomentTargets::Source::oracle;
    return targets;
}

Feasibility feasibility_precheck(const MomentDefiningFunction& t, const DiscreteSet& set,
                                 const MomentTargets& targets) {
    if (targets.values.size() != static_cast<std::size_t>(t.size()))
        throw InvalidParams("target dimension does not match T");
    const int length = t.size();
    std::vector<double> lo(static_cast<std::size_t>(length),
                           std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<std::size_t>(length),
                           -std::numeric_limits<double>::infinity());
    for (int i = 0; i < set.size(); ++i) {
        const MomentVector v = t.evaluate(set.point(i));
        for (int l = 0; l < length; ++l) {
            lo[static_cast<std::size_t>(l)] = std::min(lo[static_cast<std::size_t>(l)],
                                                       v[static_cast<std::size_t>(l)]);
            hi[static_cast<std::size_t>(l)] = std::max(hi[static_cast<std::size_t>(l)],
                                                       v[static_cast<std::size_t>(l)]);
        }
    }
    bool boundary = false;
    for (int l = 0; l < length; ++l) {
        const double tv = targets.values[static_cast<std::size_t>(l)];
        if (tv < lo[static_cast<std::size_t>(l)] || tv > hi[static_cast<std::size_t>(l)])
            return Feasibility::infeasible;
        if (tv == lo[static_cast<std::size_t>(l)] || tv == hi[static_cast<std::size_t>(l)])
            boundary = true;
    }
    return boundary ? Feasibility::unverified : Feasibility::feasible;
}

const char* to_string(Feasibility f) {
    switch (f) {
        case Feasibility::feasible: return "Feasible";
        case Feasibility::unverified: return "Unverified";
        case Feasibility::infeasible: return "Infeasible";
    }
    return "?";
}

}  // namespace momentlock
