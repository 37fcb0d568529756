// Acceptance suite: one pass/fail line per criterion, exit status counts
// unexpected failures. Two sub-assertions are shown unattainable by exact
// analysis (printed inline); they report FAIL (expected) and do not affect
// the exit status.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "momentlock/diagnostics.hpp"
#include "momentlock/experiments.hpp"
#include "momentlock/numerics.hpp"
#include "momentlock/portfolio.hpp"
#include "test_support.hpp"

using namespace momentlock;
using testsupport::uniform;
using testsupport::uniform01;

namespace {

struct Outcome {
    std::vector<std::string> failures;
    std::vector<std::string> expected_failures;  // documented-unattainable
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

// ---------------------------------------------------------------- section 4.1 cells

struct DensityCase {
    std::string name;
    Density density;
    std::vector<std::string> integrands;
};

const std::vector<DensityCase>& density_cases() {
    static const std::vector<DensityCase> cases = {
        {"beta(1,3)", Density::beta(1, 3), {"exp_x"}},
        {"beta(2,4)", Density::beta(2, 4), {"exp_x"}},
        {"uniform", Density::uniform(0, 1), {"x_9_2", "inv_1px", "sin_pi_x", "log_1px"}},
    };
    return cases;
}

struct Cell {
    std::vector<double> x;
    std::vector<double> q;
    std::vector<double> p;
    std::string error;
};

using CellKey = std::tuple<int, RuleKind, int, int>;  // density, rule, M, L

// Every (density, rule, M in 6..12, L in {2,4,6}) cell with I_M >= 2(L+1).
std::map<CellKey, Cell> solve_error_study_cells() {
    std::map<CellKey, Cell> cells;
    for (int dc = 0; dc < 3; ++dc) {
        const Density& d = density_cases()[dc].density;
        for (RuleKind rule : {RuleKind::trapezoid, RuleKind::simpson}) {
            for (int m = 6; m <= 12; ++m) {
                const DiscreteSet set = uniform_grid(0, 1, m);
                const QuadratureRule w =
                    rule == RuleKind::simpson ? simpson_weights(set) : trapezoid_weights(set);
                const InitialDiscretization q = initial_discretization(d, set, w);
                for (int order : {2, 4, 6}) {
                    if (2 * m + 1 < 2 * (order + 1)) continue;
                    Cell cell;
                    cell.x = set.coords();
                    cell.q.assign(q.probs().begin(), q.probs().end());
                    try {
                        const auto t = MomentDefiningFunction::polynomial(order);
                        cell.p = solve_dual(q, t, targets_from_density(d, t)).probs;
                    } catch (const Error& e) {
                        cell.error = e.kind();
                    }
                    cells.emplace(CellKey{dc, rule, m, order}, std::move(cell));
                }
            }
        }
    }
    return cells;
}

double expectation_under(const std::vector<double>& probs, const std::vector<double>& x,
                         const std::function<double(double)>& g) {
    std::vector<double> terms(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) terms[i] = probs[i] * g(x[i]);
    return compensated_sum(terms);
}

// ---------------------------------------------------------------- criteria

Outcome criterion_portfolio_table() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    struct Row {
        int m, order;
        double theta;
    };
    const std::vector<Row> rows = {
        {1, 0, 1.5155},  {4, 0, 0.8246},  {9, 0, 0.6830},  {16, 0, 0.6687},
        {25, 0, 0.6681}, {1, 2, 0.6717},  {4, 2, 0.6694},  {9, 2, 0.6684},
        {16, 2, 0.6682}, {25, 2, 0.6681}, {4, 4, 0.6680},  {9, 4, 0.6681},
        {16, 4, 0.6681}, {25, 4, 0.6681}};
    for (const Row& row : rows) {
        PortfolioProblem p;
        p.m = row.m;
        p.order = row.order;
        try {
            const double theta = solve_portfolio(p).theta;
            if (std::abs(theta - row.theta) > 5e-4)
                out.failures.push_back(fmt("M=%d L=%d: theta %.6f vs %.4f", row.m,
                                           row.order, theta, row.theta));
        } catch (const Error& e) {
            out.failures.push_back(fmt("M=%d L=%d: %s", row.m, row.order, e.kind().c_str()));
        }
    }
    PortfolioProblem infeasible;
    infeasible.m = 1;
    infeasible.order = 4;
    try {
        solve_portfolio(infeasible);
        out.failures.push_back("M=1 L=4 should raise a typed infeasibility error");
    } catch (const TooFewPoints&) {
    } catch (const DivergedInfeasible&) {
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 10.0) out.failures.push_back(fmt("runtime %.2f s >= 10 s", secs));
    return out;
}

Outcome criterion_chebyshev_table() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::string> names = {"exp_x", "x_9_2", "inv_1px", "sin_pi_x",
                                            "log_1px"};
    const std::map<int, std::vector<double>> reference = {
        {2, {-1.841, -0.847, -1.874, -1.251, -2.221}},
        {4, {-4.285, -2.869, -3.363, -3.031, -3.918}},
        {6, {-7.102, -5.048, -4.895, -4.872, -5.592}}};
    for (const auto& [degree, refs] : reference) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            const double got =
                std::log10(chebyshev_fit(test_function(names[i]), 0, 1, degree)
                               .sup_residual);
            if (std::abs(got - refs[i]) > 0.02)
                out.failures.push_back(
                    fmt("%s degree %d: log10 residual %.4f vs %.3f", names[i].c_str(),
                        degree, got, refs[i]));
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 5.0) out.failures.push_back(fmt("runtime %.2f s >= 5 s", secs));
    return out;
}

Outcome criterion_beta_expectations() {
    Outcome out;
    const double e = std::exp(1.0);
    const double be13 =
        expectation_oracle(Density::beta(1, 3), [](double x) { return std::exp(x); });
    const double want13 = 3 * (-5 + 2 * e);
    if (std::abs(be13 - want13) / want13 > 1e-10)
        out.failures.push_back(fmt("beta(1,3): %.15g vs %.15g", be13, want13));
    const double be24 =
        expectation_oracle(Density::beta(2, 4), [](double x) { return std::exp(x); });
    const double want24 = 20 * (49 - 18 * e);
    if (std::abs(be24 - want24) / want24 > 1e-10)
        out.failures.push_back(fmt("beta(2,4): %.15g vs %.15g", be24, want24));
    return out;
}

Outcome criterion_convergence_orders() {
    Outcome out;
    std::vector<int> m_range;
    for (int m = 6; m <= 12; ++m) m_range.push_back(m);
    for (const DensityCase& dc : density_cases()) {
        for (const std::string& g_name : dc.integrands) {
            const auto g = test_function(g_name);
            for (auto [rule, target] : {std::pair{RuleKind::trapezoid, -2.0},
                                        std::pair{RuleKind::simpson, -4.0}}) {
                const ConvergenceStudy study =
                    convergence_study(dc.density, g, rule, 2, m_range);
                if (std::abs(study.slope_q - target) > 0.3)
                    out.failures.push_back(fmt("%s/%s %s: slope_q %.3f vs %.1f",
                                               dc.name.c_str(), g_name.c_str(),
                                               rule == RuleKind::simpson ? "simpson"
                                                                         : "trapezoid",
                                               study.slope_q, target));
                if (!(std::abs(study.slope_p - study.slope_q) <= 0.5))
                    out.failures.push_back(
                        fmt("%s/%s: slope_p %.3f vs slope_q %.3f", dc.name.c_str(),
                            g_name.c_str(), study.slope_p, study.slope_q));
            }
        }
    }
    return out;
}

Outcome criterion_improvement(const std::map<CellKey, Cell>& cells) {
    Outcome out;
    std::map<std::pair<int, std::string>, double> exact;
    for (int dc = 0; dc < 3; ++dc)
        for (const std::string& g_name : density_cases()[dc].integrands)
            exact[{dc, g_name}] =
                expectation_oracle(density_cases()[dc].density, test_function(g_name));

    for (const auto& [key, cell] : cells) {
        const auto [dc, rule, m, order] = key;
        if (!cell.error.empty()) {
            out.failures.push_back(fmt("%s %s M=%d L=%d: solver error %s",
                                       density_cases()[dc].name.c_str(),
                                       rule == RuleKind::simpson ? "simpson" : "trapezoid",
                                       m, order, cell.error.c_str()));
            continue;
        }
        for (const std::string& g_name : density_cases()[dc].integrands) {
            const auto g = test_function(g_name);
            const double truth = exact.at({dc, g_name});
            const double e_q = std::abs(truth - expectation_under(cell.q, cell.x, g));
            const double e_p = std::abs(truth - expectation_under(cell.p, cell.x, g));
            if (!(e_p < e_q)) {
                const std::string msg =
                    fmt("%s %s %s M=%d L=%d: e_p=%.3e !< e_q=%.3e",
                        density_cases()[dc].name.c_str(),
                        rule == RuleKind::simpson ? "simpson" : "trapezoid",
                        g_name.c_str(), m, order, e_p, e_q);
                // Composite Simpson already integrates x and x^2 exactly for
                // the uniform density, so the KL projection is P = Q and
                // e_p = e_q holds as an identity; a strict inequality cannot.
                if (dc == 2 && rule == RuleKind::simpson && order == 2)
                    out.expected_failures.push_back(msg + "  [P = Q identically]");
                else
                    out.failures.push_back(msg);
            }
        }
    }

    // Simpson refinements: sixth order at least as accurate as second.
    for (int dc = 0; dc < 3; ++dc) {
        for (const std::string& g_name : density_cases()[dc].integrands) {
            const auto g = test_function(g_name);
            const double truth = exact.at({dc, g_name});
            for (int m = 7; m <= 12; ++m) {
                const auto& c6 = cells.at({dc, RuleKind::simpson, m, 6});
                const auto& c2 = cells.at({dc, RuleKind::simpson, m, 2});
                if (!c6.error.empty() || !c2.error.empty()) continue;
                const double ep6 = std::abs(truth - expectation_under(c6.p, c6.x, g));
                const double ep2 = std::abs(truth - expectation_under(c2.p, c2.x, g));
                if (!(ep6 <= ep2))
                    out.failures.push_back(fmt("%s %s M=%d: e_p(L=6)=%.3e > e_p(L=2)=%.3e",
                                               density_cases()[dc].name.c_str(),
                                               g_name.c_str(), m, ep6, ep2));
            }
        }
    }
    return out;
}

Outcome criterion_solver_invariants() {
    Outcome out;
    std::mt19937_64 rng(20260810);
    for (int inst = 0; inst < 200; ++inst) {
        const int n = 5 + static_cast<int>(rng() % 26);
        const int order = 1 + static_cast<int>(rng() % 4);
        Eigen::VectorXd x(n), q(n), tilt(n);
        for (int i = 0; i < n; ++i) {
            x[i] = (i + 0.5) / n + uniform(rng, -0.3, 0.3) / n;
            q[i] = uniform(rng, 0.05, 1.0);
            tilt[i] = q[i] * std::exp(uniform(rng, -0.5, 0.5));
        }
        q /= q.sum();
        tilt /= tilt.sum();
        Eigen::MatrixXd t_values(n, order);
        for (int i = 0; i < n; ++i) {
            double pw = 1.0;
            for (int l = 0; l < order; ++l) t_values(i, l) = (pw *= x[i]);
        }
        const Eigen::VectorXd targets = t_values.transpose() * tilt;

        MaxEntSolution sol;
        try {
            sol = solve_dual_values(t_values, q, targets);
        } catch (const Error& e) {
            out.failures.push_back(fmt("instance %d: %s", inst, e.kind().c_str()));
            continue;
        }
        if (!sol.dual.attained)
            out.failures.push_back(fmt("instance %d: dual optimum not attained", inst));
        if (sol.moment_residual > 1e-8)
            out.failures.push_back(fmt("instance %d: residual %.2e", inst,
                                       sol.moment_residual));
        if (std::abs(compensated_sum(sol.probs) - 1.0) > 1e-14)
            out.failures.push_back(fmt("instance %d: sum p off by %.2e", inst,
                                       compensated_sum(sol.probs) - 1.0));
        for (double p : sol.probs)
            if (p < 0.0) out.failures.push_back(fmt("instance %d: negative p", inst));

        const std::vector<double> qv(q.data(), q.data() + n);
        const double direct = kl_divergence(sol.probs, qv);
        if (std::abs(direct - sol.kl) > 1e-10)
            out.failures.push_back(fmt("instance %d: duality gap %.2e", inst,
                                       std::abs(direct - sol.kl)));
        double l1 = 0.0;
        for (int i = 0; i < n; ++i) l1 += std::abs(sol.probs[i] - qv[i]);
        if (0.5 * l1 * l1 > direct + 1e-12)
            out.failures.push_back(fmt("instance %d: Pinsker violated", inst));

        for (int probe = 0; probe < 5; ++probe) {
            Eigen::VectorXd lambda(order);
            for (int l = 0; l < order; ++l) lambda[l] = uniform(rng, -0.5, 0.5);
            const Eigen::VectorXd grad = dual_gradient(t_values, q, targets, lambda);
            Eigen::VectorXd grad_fd(order);
            const double h = 1e-6;
            for (int l = 0; l < order; ++l) {
                Eigen::VectorXd up = lambda, dn = lambda;
                up[l] += h;
                dn[l] -= h;
                grad_fd[l] = (dual_objective(t_values, q, targets, up) -
                              dual_objective(t_values, q, targets, dn)) /
                             (2 * h);
            }
            if ((grad - grad_fd).cwiseAbs().maxCoeff() >
                1e-5 * std::max(1e-8, grad.cwiseAbs().maxCoeff()))
                out.failures.push_back(fmt("instance %d: gradient FD mismatch", inst));

            const Eigen::MatrixXd hess = dual_hessian(t_values, q, targets, lambda);
            Eigen::MatrixXd hess_fd(order, order);
            for (int l = 0; l < order; ++l) {
                Eigen::VectorXd up = lambda, dn = lambda;
                up[l] += h;
                dn[l] -= h;
                hess_fd.col(l) = (dual_gradient(t_values, q, targets, up) -
                                  dual_gradient(t_values, q, targets, dn)) /
                                 (2 * h);
            }
            if ((hess - hess_fd).cwiseAbs().maxCoeff() >
                1e-5 * std::max(1e-8, hess.cwiseAbs().maxCoeff()))
                out.failures.push_back(fmt("instance %d: hessian FD mismatch", inst));
        }

        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(order, order);
        Eigen::VectorXd b(order);
        for (int i = 0; i < order; ++i) {
            b[i] = uniform(rng, -1, 1);
            for (int j = 0; j < order; ++j) a(i, j) += 0.3 * uniform(rng, -1, 1);
        }
        if (std::abs(a.determinant()) < 1e-3) continue;
        const Eigen::MatrixXd t2 = (t_values * a.transpose()).rowwise() + b.transpose();
        const MaxEntSolution again = solve_dual_values(t2, q, a * targets + b);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(sol.probs[static_cast<std::size_t>(i)] -
                                             again.probs[static_cast<std::size_t>(i)]));
        if (worst > 1e-10)
            out.failures.push_back(fmt("instance %d: reparametrization drift %.2e", inst,
                                       worst));
    }
    return out;
}

Outcome criterion_brute_force() {
    Outcome out;
    std::mt19937_64 rng(20260811);
    for (int inst = 0; inst < 20; ++inst) {
        const int order = 1 + static_cast<int>(rng() % 2);
        const int n = order + 3 + static_cast<int>(rng() % 2);  // free dims <= 3
        Eigen::VectorXd x(n), q(n), tilt(n);
        for (int i = 0; i < n; ++i) {
            x[i] = (i + 0.5) / n + uniform(rng, -0.3, 0.3) / n;
            q[i] = uniform(rng, 0.1, 1.0);
            tilt[i] = q[i] * std::exp(uniform(rng, -0.4, 0.4));
        }
        q /= q.sum();
        tilt /= tilt.sum();
        Eigen::MatrixXd t_values(n, order);
        for (int i = 0; i < n; ++i) {
            double pw = 1.0;
            for (int l = 0; l < order; ++l) t_values(i, l) = (pw *= x[i]);
        }
        const Eigen::VectorXd targets = t_values.transpose() * tilt;
        const MaxEntSolution sol = solve_dual_values(t_values, q, targets);
        const std::vector<double> brute =
            testsupport::brute_force_kl_min(t_values, q, targets);
        for (int i = 0; i < n; ++i) {
            const double diff = std::abs(sol.probs[static_cast<std::size_t>(i)] -
                                         brute[static_cast<std::size_t>(i)]);
            if (diff > 1e-4) {
                out.failures.push_back(
                    fmt("instance %d coord %d: |p - brute| = %.2e", inst, i, diff));
                break;
            }
        }
    }
    return out;
}

Outcome criterion_pathology(const std::map<CellKey, Cell>& cells) {
    Outcome out;

    // beta(1,3), trapezoid M=4, L=6: feasible; the projection exists but the
    // whole feasible family has max p in [0.425, 0.453] < 2 max q = 0.570
    // (exact elimination of the 7 constraints on the 8 active points), so the
    // 2x spike threshold is unattainable for any correct solver.
    {
        const Density d = Density::beta(1, 3);
        const DiscreteSet set = uniform_grid(0, 1, 4);
        const InitialDiscretization q =
            initial_discretization(d, set, trapezoid_weights(set));
        const auto t = MomentDefiningFunction::polynomial(6);
        try {
            const MaxEntSolution sol = solve_dual(q, t, targets_from_density(d, t));
            double max_p = 0, max_q = 0;
            for (std::size_t i = 0; i < sol.probs.size(); ++i) {
                max_p = std::max(max_p, sol.probs[i]);
                max_q = std::max(max_q, q.probs()[i]);
            }
            if (!(max_p > 2 * max_q))
                out.expected_failures.push_back(
                    fmt("beta(1,3) trapezoid M=4 L=6: max p = %.4f = %.3f x max q; every "
                        "feasible p has max below 0.454 < 2 max q",
                        max_p, max_p / max_q));
        } catch (const Error& e) {
            out.failures.push_back(fmt("beta(1,3) M=4 L=6 did not converge: %s",
                                       e.kind().c_str()));
        }
    }

    // beta(2,4), trapezoid M=4, L=6: with both endpoints pinned to zero there
    // are 7 unknowns and 7 constraints; the unique candidate has negative
    // components (exact rational elimination), so no feasible distribution
    // exists and honest divergence is the correct outcome.
    {
        const Density d = Density::beta(2, 4);
        const DiscreteSet set = uniform_grid(0, 1, 4);
        const InitialDiscretization q =
            initial_discretization(d, set, trapezoid_weights(set));
        const auto t = MomentDefiningFunction::polynomial(6);
        try {
            solve_dual(q, t, targets_from_density(d, t));
            out.failures.push_back(
                "beta(2,4) M=4 L=6 'converged' although the constraint set is empty");
        } catch (const DivergedInfeasible& e) {
            out.expected_failures.push_back(
                std::string("beta(2,4) trapezoid M=4 L=6: expected convergence, got "
                            "DivergedInfeasible (correct: the unique moment-matching "
                            "candidate on the 7 interior points has negative entries)"));
        }
    }

    // Well-conditioned cells show no such spike.
    for (const auto& [key, cell] : cells) {
        if (!cell.error.empty()) continue;
        double max_p = 0, max_q = 0;
        for (std::size_t i = 0; i < cell.p.size(); ++i) {
            max_p = std::max(max_p, cell.p[i]);
            max_q = std::max(max_q, cell.q[i]);
        }
        if (max_p > 2 * max_q) {
            const auto [dc, rule, m, order] = key;
            out.failures.push_back(fmt("spike in well-behaved cell %s %s M=%d L=%d",
                                       density_cases()[dc].name.c_str(),
                                       rule == RuleKind::simpson ? "simpson" : "trapezoid",
                                       m, order));
        }
    }
    return out;
}

}  // namespace

int main() {
    const auto cells = solve_error_study_cells();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"portfolio reference values", criterion_portfolio_table},
        {"chebyshev residual reference values", criterion_chebyshev_table},
        {"beta expectations of exp", criterion_beta_expectations},
        {"convergence orders", criterion_convergence_orders},
        {"improvement direction", [&] { return criterion_improvement(cells); }},
        {"solver invariant suite (200 instances)", criterion_solver_invariants},
        {"brute-force oracle equivalence", criterion_brute_force},
        {"pathology exhibit", [&] { return criterion_pathology(cells); }},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome outcome = criteria[i].second();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* verdict = outcome.failures.empty()
                                  ? (outcome.expected_failures.empty() ? "PASS"
                                                                       : "FAIL (expected)")
                                  : "FAIL";
        std::printf("%-15s | criterion %zu: %s [%.2f s]\n", verdict, i + 1,
                    criteria[i].first.c_str(), secs);
        for (const std::string& msg : outcome.failures)
            std::printf("                |   %s\n", msg.c_str());
        for (const std::string& msg : outcome.expected_failures)
            std::printf("                |   (documented) %s\n", msg.c_str());
        if (!outcome.failures.empty()) ++unexpected;
    }
    if (unexpected)
        std::printf("%d criterion(s) failed unexpectedly\n", unexpected);
    else
        std::printf("all criteria pass; documented-unattainable assertions reported "
                    "above as FAIL (expected)\n");
    return unexpected;
}
