#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "momentlock/grid.hpp"
#include "momentlock/moments.hpp"

namespace momentlock {

struct SolverConfig {
    double kappa = 1e-7;          // Newton regularizer
    double stop_tol = 1e-10;      // step-norm termination, scaled coordinates
    int max_iters = 200;
    double lambda_blowup = 1e6;   // scaled-coordinate divergence threshold
    bool scaling = true;          // whiten T under Q before iterating
};

struct DualState {
    std::vector<double> lambda;   // dual variables, original T coordinates
    double J_value = 1.0;         // J at the returned lambda
    double grad_norm = 0.0;       // ||grad J||_inf, scaled coordinates
    int iterations = 0;
    /// False when the dual optimum is unattained (targets on the boundary of
    /// conv T(D)): the iterate then satisfies the moment constraints to 1e-8
    /// but the stationarity certificate, and with it the 1e-10 duality-gap
    /// guarantee, does not apply.
    bool attained = true;
};

struct MaxEntSolution {
    std::vector<double> probs;    // p over all grid points, zeros kept
    DualState dual;
    double kl = 0.0;              // H(P;Q) = -log(min J)
    double moment_residual = 0.0; // max-norm moment defect, original coordinates
};

/// J(lambda) = sum_i q_i exp(<lambda, T(x_i) - Tbar>), evaluated with the
/// max-exponent shift so large exponents cannot overflow intermediates.
double dual_objective(const Eigen::MatrixXd& t_values, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& targets, const Eigen::VectorXd& lambda);

/// grad J = sum_i q_i exp(<lambda, T_i - Tbar>) (T_i - Tbar)
Eigen::VectorXd dual_gradient(const Eigen::MatrixXd& t_values, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& targets,
                              const Eigen::VectorXd& lambda);

/// hess J = sum_i q_i exp(<lambda, T_i - Tbar>) (T_i - Tbar)(T_i - Tbar)^T
Eigen::MatrixXd dual_hessian(const Eigen::MatrixXd& t_values, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& lambda);

/// Regularized Newton on the dual: lambda_{n+1} = lambda_n -
/// [kappa I + hess J]^{-1} grad J from lambda_0 = 0, with backtracking
/// halving, then p_i = q_i exp(<lambda, T_i>) / sum_j q_j exp(<lambda, T_j>).
/// Rows of t_values are T(x_i); q is renormalized internally; points with
/// q_i = 0 are excluded from all sums and pinned to p_i = 0.
MaxEntSolution solve_dual_values(const Eigen::MatrixXd& t_values,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& targets,
                                 const SolverConfig& cfg = {});

MaxEntSolution solve_dual(const InitialDiscretization& q, const MomentDefiningFunction& t,
                          const MomentTargets& targets, const SolverConfig& cfg = {});

/// H(P;Q) = sum_{p_i > 0} p_i log(p_i / q_i), 0 log 0 = 0.
/// Throws AbsoluteContinuityViolated if p_i > 0 where q_i = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// sqrt(2 H(P;Q)), an upper bound on ||P - Q||_1 by Pinsker's inequality.
double pinsker_bound(std::span<const double> p, std::span<const double> q);

}  // namespace momentlock
