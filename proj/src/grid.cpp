#include "momentlock/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momentlock/numerics.hpp"

namespace momentlock {

namespace {

constexpr double kSpacingRelTol = 1e-12;

// Common spacing of a 1-D set, or throws NonUniformGrid.
double uniform_spacing(const DiscreteSet& set) {
    if (set.dim() != 1)
        throw NonUniformGrid("Newton-Cotes weights need a one-dimensional grid");
    const auto& x = set.coords();
    const double h = x[1] - x[0];
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double gap = x[i + 1] - x[i];
        if (std::abs(gap - h) > kSpacingRelTol * std::max(std::abs(h), std::abs(gap)))
            throw NonUniformGrid("grid spacing varies by more than 1e-12 relative");
    }
    return h;
}

}  // namespace

DiscreteSet DiscreteSet::from_points(std::vector<double> points, int index_m) {
    if (points.size() < 2) throw InvalidParams("a discrete set needs at least 2 points");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw InvalidParams("1-D grid points must be strictly increasing");
    DiscreteSet s;
    s.coords_ = std::move(points);
    s.dim_ = 1;
    s.index_m_ = index_m;
    return s;
}

DiscreteSet DiscreteSet::from_rows(std::vector<double> coords, int dim, int index_m) {
    if (dim < 1) throw InvalidParams("point dimension must be >= 1");
    if (coords.empty() || coords.size() % dim != 0)
        throw InvalidParams("coordinate buffer does not hold whole points");
    const std::size_t n = coords.size() / dim;
    if (n < 2) throw InvalidParams("a discrete set needs at least 2 points");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::equal(coords.begin() + i * dim, coords.begin() + (i + 1) * dim,
                           coords.begin() + j * dim))
                throw InvalidParams("duplicate grid point");
    DiscreteSet s;
    s.coords_ = std::move(coords);
    s.dim_ = dim;
    s.index_m_ = index_m;
    return s;
}

double DiscreteSet::at(int i) const {
    if (dim_ != 1) throw InvalidParams("scalar access on a multi-dimensional set");
    return coords_[static_cast<std::size_t>(i)];
}

DiscreteSet uniform_grid(double lo, double hi, int m) {
    if (!(lo < hi)) throw InvalidParams("uniform_grid needs lo < hi");
    if (m < 1) throw InvalidParams("uniform_grid needs M >= 1");
    const std::size_t n = 2 * static_cast<std::size_t>(m);
    std::vector<double> pts(n + 1);
    for (std::size_t i = 0; i <= n; ++i) pts[i] = lerp_grid(lo, hi, i, n);
    return DiscreteSet::from_points(std::move(pts), m);
}

DiscreteSet symmetric_grid(int m, double h) {
    if (m < 1) throw InvalidParams("symmetric_grid needs M >= 1");
    if (!(h > 0.0)) throw InvalidParams("symmetric_grid needs h > 0");
    std::vector<double> pts(2 * static_cast<std::size_t>(m) + 1);
    for (int k = -m; k <= m; ++k) pts[static_cast<std::size_t>(k + m)] = k * h;
    return DiscreteSet::from_points(std::move(pts), m);
}

QuadratureRule QuadratureRule::trapezoid(const DiscreteSet& set) {
    const double h = uniform_spacing(set);
    std::vector<double> w(static_cast<std::size_t>(set.size()), h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return QuadratureRule(RuleKind::trapezoid, std::move(w));
}

QuadratureRule QuadratureRule::simpson(const DiscreteSet& set) {
    const double h = uniform_spacing(set);
    const std::size_t n = static_cast<std::size_t>(set.size());
    if (n % 2 == 0)
        throw EvenPointCount("Simpson weights need an odd point count (2M+1)");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
    w.front() = h / 3.0;
    w.back() = h / 3.0;
    return QuadratureRule(RuleKind::simpson, std::move(w));
}

QuadratureRule QuadratureRule::custom(std::vector<double> weights) {
    if (weights.empty()) throw InvalidParams("empty weight vector");
    for (double w : weights)
        if (!(w >= 0.0))
            throw NegativeWeight("custom quadrature weights must be nonnegative");
    return QuadratureRule(RuleKind::custom, std::move(weights));
}

QuadratureRule trapezoid_weights(const DiscreteSet& set) {
    return QuadratureRule::trapezoid(set);
}

QuadratureRule simpson_weights(const DiscreteSet& set) {
    return QuadratureRule::simpson(set);
}

InitialDiscretization::InitialDiscretization(DiscreteSet set, std::vector<double> probs)
    : set_(std::move(set)), probs_(std::move(probs)) {
    if (probs_.size() != static_cast<std::size_t>(set_.size()))
        throw InvalidParams("probability vector length does not match the grid");
    for (double q : probs_)
        if (!(q >= 0.0) || !std::isfinite(q))
            throw InvalidParams("initial probabilities must be finite and nonnegative");
    const double total = compensated_sum(probs_);
    if (!(total > 0.0))
        throw DegenerateDiscretization("all initial probabilities vanish");
    for (double& q : probs_) q /= total;
}

InitialDiscretization initial_discretization(const Density& d, const DiscreteSet& set,
                                             const QuadratureRule& rule) {
    if (set.dim() != 1)
        throw InvalidParams("densities are one-dimensional; use the direct constructor");
    if (rule.weights().size() != static_cast<std::size_t>(set.size()))
        throw InvalidParams("rule size does not match the grid");
    std::vector<double> q(rule.weights().size());
    for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = rule.weights()[i] * d.pdf(set.at(static_cast<int>(i)));
    return InitialDiscretization(set, std::move(q));
}

}  // namespace momentlock
