#pragma once

#include <span>
#include <vector>

#include "momentlock/density.hpp"
#include "momentlock/errors.hpp"

namespace momentlock {

/// Finite set of discretization points. One-dimensional sets are strictly
/// increasing; higher-dimensional sets store row-major K-tuples with no
/// duplicate rows (the solver itself is dimension-agnostic).
class DiscreteSet {
public:
    /// K = 1 set; points must be strictly increasing, at least two of them.
    static DiscreteSet from_points(std::vector<double> points, int index_m = 0);

    /// General K >= 1 set from row-major coordinates.
    static DiscreteSet from_rows(std::vector<double> coords, int dim, int index_m = 0);

    int size() const noexcept { return static_cast<int>(coords_.size()) / dim_; }
    int dim() const noexcept { return dim_; }
    int index_m() const noexcept { return index_m_; }

    std::span<const double> point(int i) const {
        return {coords_.data() + static_cast<std::size_t>(i) * dim_,
                static_cast<std::size_t>(dim_)};
    }

    /// Scalar coordinate of point i; requires dim() == 1.
    double at(int i) const;

    /// The raw coordinates; equals the point vector when dim() == 1.
    const std::vector<double>& coords() const noexcept { return coords_; }

private:
    DiscreteSet() = default;
    std::vector<double> coords_;
    int dim_ = 1;
    int index_m_ = 0;
};

/// 2M+1 equally spaced points covering [lo, hi], both endpoints exact.
DiscreteSet uniform_grid(double lo, double hi, int m);

/// {m*h : m = 0, +-1, ..., +-M}, 2M+1 points centered at zero.
DiscreteSet symmetric_grid(int m, double h);

enum class RuleKind { trapezoid, simpson, custom };

/// Nonnegative quadrature weights attached to a DiscreteSet.
class QuadratureRule {
public:
    static QuadratureRule trapezoid(const DiscreteSet& set);
    static QuadratureRule simpson(const DiscreteSet& set);
    /// User weights; any negative weight is rejected at construction.
    static QuadratureRule custom(std::vector<double> weights);

    RuleKind kind() const noexcept { return kind_; }
    std::span<const double> weights() const noexcept { return weights_; }

private:
    QuadratureRule(RuleKind kind, std::vector<double> w)
        : kind_(kind), weights_(std::move(w)) {}
    RuleKind kind_;
    std::vector<double> weights_;
};

QuadratureRule trapezoid_weights(const DiscreteSet& set);
QuadratureRule simpson_weights(const DiscreteSet& set);

/// Initial discretization Q: q_i proportional to w_i f(x_i), renormalized to
/// sum to one. Grid points where w*f vanishes keep an exact zero so index
/// alignment with the grid is preserved; the solver pins p_i = 0 there.
class InitialDiscretization {
public:
    InitialDiscretization(DiscreteSet set, std::vector<double> probs);

    const DiscreteSet& set() const noexcept { return set_; }
    std::span<const double> probs() const noexcept { return probs_; }

private:
    DiscreteSet set_;
    std::vector<double> probs_;
};

InitialDiscretization initial_discretization(const Density& d, const DiscreteSet& set,
                                             const QuadratureRule& rule);

}  // namespace momentlock
