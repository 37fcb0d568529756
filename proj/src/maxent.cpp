#include "momentlock/maxent.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <string>

#include "momentlock/numerics.hpp"

namespace momentlock {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Stationarity on the tilted moment defect: absolute floor plus the
// instance's own cancellation-noise scale.
constexpr double kDefectTol = 3e-13;
constexpr double kDefectNoiseFactor = 64.0;
// Accept a returned iterate whose original-coordinate moment defect is below
// this even when the dual optimum is unattained (boundary targets).
constexpr double kResidualTol = 1e-8;
constexpr int kMaxHalvings = 31;

struct ShiftedEval {
    double log_j;
    double j;
    Eigen::VectorXd tilted;  // u_i = q_i e^{s_i} / sum, the tilted probabilities
    Eigen::VectorXd defect;  // grad J / J = E_u[T'] - Tbar'
    Eigen::MatrixXd gram;    // hess J / J
    Eigen::VectorXd noise;   // per-component defect cancellation scale
};

// One evaluation of J and its derivatives at lambda, exponents shifted by
// their maximum. centered has rows T'(x_i) - Tbar'.
ShiftedEval evaluate(const Eigen::MatrixXd& centered, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& lambda) {
    ShiftedEval e;
    Eigen::VectorXd s = centered * lambda;
    const double shift = s.maxCoeff();
    Eigen::VectorXd w = (s.array() - shift).exp() * q.array();
    const double total = w.sum();
    e.tilted = w / total;
    e.log_j = shift + std::log(total);
    e.j = std::exp(e.log_j);
    e.defect = centered.transpose() * e.tilted;
    e.gram = centered.transpose() * e.tilted.asDiagonal() * centered;
    e.noise = kDefectNoiseFactor * kEps *
              (centered.cwiseAbs().transpose() * e.tilted);
    return e;
}

bool stationary(const ShiftedEval& e) {
    for (Eigen::Index l = 0; l < e.defect.size(); ++l)
        if (std::abs(e.defect[l]) > std::max(kDefectTol, e.noise[l])) return false;
    return true;
}

// Newton system solve with the kappa-escalation fallback.
Eigen::VectorXd newton_step(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad,
                            double kappa) {
    for (double k = kappa; k <= 1e-3; k *= 10.0) {
        Eigen::MatrixXd reg = hess;
        reg.diagonal().array() += k;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
        if (ldlt.info() != Eigen::Success) continue;
        Eigen::VectorXd step = ldlt.solve(grad);
        if (step.allFinite()) return step;
    }
    throw SingularHessian("kappa I + hess J not factorizable up to kappa = 1e-3");
}

}  // namespace

double dual_objective(const Eigen::MatrixXd& t_values, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& targets, const Eigen::VectorXd& lambda) {
    Eigen::VectorXd s = t_values * lambda;
    s.array() -= targets.dot(lambda);
    const double shift = s.maxCoeff();
    return std::exp(shift) * (q.array() * (s.array() - shift).exp()).sum();
}

Eigen::VectorXd dual_gradient(const Eigen::MatrixXd& t_values, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& targets,
                              const Eigen::VectorXd& lambda) {
    Eigen::VectorXd s = t_values * lambda;
    s.array() -= targets.dot(lambda);
    const double shift = s.maxCoeff();
    Eigen::VectorXd w = (s.array() - shift).exp() * q.array();
    Eigen::MatrixXd centered = t_values.rowwise() - targets.transpose();
    return std::exp(shift) * (centered.transpose() * w);
}

Eigen::MatrixXd dual_hessian(const Eigen::MatrixXd& t_values, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& lambda) {
    Eigen::VectorXd s = t_values * lambda;
    s.array() -= targets.dot(lambda);
    const double shift = s.maxCoeff();
    Eigen::VectorXd w = (s.array() - shift).exp() * q.array();
    Eigen::MatrixXd centered = t_values.rowwise() - targets.transpose();
    return std::exp(shift) * (centered.transpose() * w.asDiagonal() * centered);
}

MaxEntSolution solve_dual_values(const Eigen::MatrixXd& t_values,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& targets,
                                 const SolverConfig& cfg) {
    const Eigen::Index total_points = t_values.rows();
    const Eigen::Index n_constraints = t_values.cols();
    if (q.size() != total_points)
        throw InvalidParams("probability vector length does not match T values");
    if (targets.size() != n_constraints)
        throw InvalidParams("target dimension does not match T values");

    // Active subproblem: points with q_i > 0.
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(total_points));
    for (Eigen::Index i = 0; i < total_points; ++i) {
        if (!(q[i] >= 0.0) || !std::isfinite(q[i]))
            throw InvalidParams("initial probabilities must be finite and nonnegative");
        if (q[i] > 0.0) active.push_back(i);
    }
    const Eigen::Index n = static_cast<Eigen::Index>(active.size());
    if (n < n_constraints + 1)
        throw TooFewPoints(std::to_string(n) + " active points cannot carry " +
                           std::to_string(n_constraints) + "+1 constraints");

    Eigen::MatrixXd t_act(n, n_constraints);
    Eigen::VectorXd q_act(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        t_act.row(r) = t_values.row(active[static_cast<std::size_t>(r)]);
        q_act[r] = q[active[static_cast<std::size_t>(r)]];
    }
    q_act /= q_act.sum();

    // Necessary-condition box check over the full set.
    for (Eigen::Index l = 0; l < n_constraints; ++l) {
        const double lo = t_values.col(l).minCoeff();
        const double hi = t_values.col(l).maxCoeff();
        if (targets[l] < lo || targets[l] > hi)
            throw DivergedInfeasible("target " + std::to_string(l + 1) +
                                     " outside the range of T on the grid");
    }

    // Whitening: lambda-space transform making hess J(0) the identity. The
    // returned probabilities are invariant under this affine change of T.
    Eigen::MatrixXd centered;
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (cfg.scaling) {
        Eigen::VectorXd mean = t_act.transpose() * q_act;
        Eigen::MatrixXd dev = t_act.rowwise() - mean.transpose();
        Eigen::MatrixXd cov = dev.transpose() * q_act.asDiagonal() * dev;
        llt.compute(cov);
        bool singular = llt.info() != Eigen::Success;
        if (!singular) {
            const auto& fac = llt.matrixLLT();
            for (Eigen::Index l = 0; l < n_constraints && !singular; ++l)
                singular = !(fac(l, l) * fac(l, l) > 4.0 * kEps * cov(l, l));
        }
        if (singular)
            throw SingularHessian(
                "T components affinely dependent under Q (singular moment covariance)");
        Eigen::VectorXd target_w = llt.matrixL().solve(targets - mean);
        centered = llt.matrixL()
                       .solve(dev.transpose())
                       .transpose();
        centered.rowwise() -= target_w.transpose();
    } else {
        centered = t_act.rowwise() - targets.transpose();
    }

    const double log_q_min = std::log(q_act.minCoeff());

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n_constraints);
    ShiftedEval cur = evaluate(centered, q_act, lambda);
    int iterations = 0;
    bool attained = false;

    if (stationary(cur)) {
        iterations = 1;
        attained = true;
    } else {
        for (int it = 1; it <= cfg.max_iters; ++it) {
            iterations = it;
            Eigen::VectorXd step =
                newton_step(cur.j * cur.gram, cur.j * cur.defect, cfg.kappa);
            // Backtracking acceptance is monotone within roundoff of log J;
            // near the optimum the true per-step decrease sits below fp
            // resolution long before the gradient reaches its noise floor.
            const double slack = 16.0 * kEps * (1.0 + std::abs(cur.log_j));
            bool accepted = false;
            for (int h = 0; h < kMaxHalvings; ++h) {
                ShiftedEval trial = evaluate(centered, q_act, lambda - step);
                if (trial.log_j <= cur.log_j + slack) {
                    lambda -= step;
                    cur = std::move(trial);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            const double step_norm = accepted ? step.norm() : 0.0;
            if (step_norm < cfg.stop_tol && stationary(cur)) {
                attained = true;
                break;
            }
            // Weak duality: min J = e^{-H} >= min_i q_i whenever a feasible p
            // exists, so dipping below that proves T-bar outside conv T(D).
            if (cur.log_j < log_q_min - 0.7)
                throw DivergedInfeasible(
                    "J fell below min q: no feasible distribution matches the targets");
            if (lambda.norm() > cfg.lambda_blowup)
                throw DivergedInfeasible("dual variables exceeded the blow-up threshold");
        }
    }

    MaxEntSolution sol;
    sol.probs.assign(static_cast<std::size_t>(total_points), 0.0);
    for (Eigen::Index r = 0; r < n; ++r)
        sol.probs[static_cast<std::size_t>(active[static_cast<std::size_t>(r)])] =
            cur.tilted[r];

    Eigen::VectorXd residual = t_act.transpose() * cur.tilted - targets;
    sol.moment_residual = residual.cwiseAbs().maxCoeff();
    if (!attained && sol.moment_residual > kResidualTol)
        throw DivergedInfeasible("no convergence in " + std::to_string(cfg.max_iters) +
                                 " iterations; moment defect " +
                                 std::to_string(sol.moment_residual));

    Eigen::VectorXd lambda_orig =
        cfg.scaling ? Eigen::VectorXd(llt.matrixU().solve(lambda)) : lambda;
    sol.dual.lambda.assign(lambda_orig.data(), lambda_orig.data() + n_constraints);
    sol.dual.J_value = cur.j;
    sol.dual.grad_norm = (cur.j * cur.defect).cwiseAbs().maxCoeff();
    sol.dual.iterations = iterations;
    sol.dual.attained = attained;
    sol.kl = std::max(0.0, -cur.log_j);
    return sol;
}

MaxEntSolution solve_dual(const InitialDiscretization& q, const MomentDefiningFunction& t,
                          const MomentTargets& targets, const SolverConfig& cfg) {
    const DiscreteSet& set = q.set();
    Eigen::MatrixXd t_values(set.size(), t.size());
    for (int i = 0; i < set.size(); ++i) {
        const MomentVector v = t.evaluate(set.point(i));
        for (int l = 0; l < t.size(); ++l) t_values(i, l) = v[static_cast<std::size_t>(l)];
    }
    Eigen::VectorXd q_vec =
        Eigen::Map<const Eigen::VectorXd>(q.probs().data(),
                                          static_cast<Eigen::Index>(q.probs().size()));
    Eigen::VectorXd target_vec = Eigen::Map<const Eigen::VectorXd>(
        targets.values.data(), static_cast<Eigen::Index>(targets.values.size()));
    return solve_dual_values(t_values, q_vec, target_vec, cfg);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw InvalidParams("KL arguments differ in length");
    std::vector<double> terms;
    terms.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0)) throw InvalidParams("probabilities must be nonnegative");
        if (p[i] == 0.0) continue;  // 0 log 0 = 0
        if (q[i] <= 0.0)
            throw AbsoluteContinuityViolated("p puts mass where q vanishes (index " +
                                             std::to_string(i) + ")");
        terms.push_back(p[i] * std::log(p[i] / q[i]));
    }
    return compensated_sum(terms);
}

double pinsker_bound(std::span<const double> p, std::span<const double> q) {
    return std::sqrt(2.0 * std::max(0.0, kl_divergence(p, q)));
}

}  // namespace momentlock
